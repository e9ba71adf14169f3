#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dirnet {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Link-level radio parameters. Powers are carried in dBm, angles in radians.
struct RadioParams {
  double p_tx_dbm = 10.0;
  double n_thr_dbm = -78.0;  // receiver sensitivity, also the carrier-sense threshold
  double theta = deg_to_rad(52.0);  // half-power beamwidth
  double kappa = 2.0;
  double c_const = 6.3e6;
  double bandwidth_hz = 2.16e9;
  double snr_max_db = 20.0;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

struct AntennaSample {
  double angle;  // radians
  double gain_dbi;
};

/// Receive-side directivity: either the linear roll-off approximation or a
/// sampled 2D pattern over [0, pi].
class AntennaModel {
 public:
  enum class Kind { Analytic, Table };

  AntennaModel() = default;
  static AntennaModel analytic() { return {}; }
  /// Samples must start at angle 0 and be strictly increasing.
  static AntennaModel table(std::vector<AntennaSample> samples);

  Kind kind() const { return kind_; }
  const std::vector<AntennaSample>& samples() const { return samples_; }

  /// Linear gain at deviation angle `alpha` (folded into [0, pi]) for a beam of
  /// width `theta`.
  double gain(double alpha, double theta) const;
  /// Largest linear gain over all angles.
  double peak_gain(double theta) const;

 private:
  Kind kind_ = Kind::Analytic;
  std::vector<AntennaSample> samples_;
};

/// Loads an `angle_deg,gain_dbi` pattern file.
AntennaModel load_antenna_table(const std::string& path);
AntennaModel parse_antenna_table(const std::string& text);

double directivity_reduction(double alpha, double theta);
double max_directivity(double theta);

/// Received power in linear mW at distance `d` and deviation `alpha` from the
/// directional end's boresight.
double receive_power(const RadioParams& params, const AntennaModel& antenna,
                     double d, double alpha);

/// Boresight distance at which the received power falls to the sensitivity.
double coverage_radius(const RadioParams& params);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Border of a single beam's coverage lobe at deviation angle `alpha`.
Point2 beam_boundary(double R, double theta, double kappa, double alpha);
double beam_area(double R, double theta, double kappa);
/// Coverage footprint of both devices of a pair, overlap ignored.
double pair_coverage_area(double R, double theta, double kappa);

}  // namespace dirnet
