#pragma once

#include <functional>
#include <optional>
#include <string>

#include "dirnet/queueing.hpp"
#include "dirnet/radio.hpp"
#include "dirnet/simulator.hpp"

namespace dirnet {

enum class NoiseMode { ThresholdK, MeasuredInterference };
enum class MeanPairsSource { ClosedForm, Series };

std::string to_string(NoiseMode m);
NoiseMode noise_mode_from_string(const std::string& s);
std::string to_string(MeanPairsSource s);
MeanPairsSource mean_pairs_source_from_string(const std::string& s);

struct RateModel {
  int k_neighbors = 6;
  double snr_max_db = 20.0;
  NoiseMode noise_mode = NoiseMode::ThresholdK;

  void validate() const;
};

/// Noise-plus-interference power under the K-closest-neighbour rule, in mW.
double noise_power(double n_thr_dbm, int k);

/// Thermal noise floor kTB in mW at 290 K.
double thermal_noise_mw(double bandwidth_hz);

/// Shannon rate with the SNR capped at `radio.snr_max_db`, in bit/s.
double link_rate(const RadioParams& radio, double p_rx_mw, double p_n_mw);

struct ThroughputScenario {
  RadioParams radio;
  AntennaModel antenna;
  DeploymentParams deployment;
  RateModel rate;
  RejectionModel variant = RejectionModel::Exponential;
  MeanPairsSource mean_pairs_source = MeanPairsSource::ClosedForm;
  /// Separation at which the per-link rate is evaluated (boresight-aligned).
  double pair_distance = 0.2;
  double epsilon = 1e-12;
  /// Simulation settings for measured interference; deployment, radio and
  /// antenna are taken from the scenario.
  SimConfig measurement;
};

struct AreaRateResult {
  double gamma = 0.0;
  double mean_pairs = 0.0;
  double p_rx_mw = 0.0;
  double p_n_mw = 0.0;
  double link_rate = 0.0;  // bit/s
  double area_rate = 0.0;  // bit/s/m^2
};

AreaRateResult area_rate(const ThroughputScenario& scenario);

struct PowerOptimum {
  double p_opt_dbm = 0.0;
  double rate_opt = 0.0;
  bool flat = false;
};

/// Maximises `objective` over [lo, hi] (dBm): grid at `tol` spacing, then a
/// ternary search around the best grid point. Ties go to the lower power.
PowerOptimum optimize_power(const std::function<double(double)>& objective, double lo, double hi,
                            double tol);
PowerOptimum optimize_power(const ThroughputScenario& scenario, double lo, double hi, double tol);

}  // namespace dirnet
