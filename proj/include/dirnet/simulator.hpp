#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dirnet/radio.hpp"

namespace dirnet {

// ---------------------------------------------------------------------------
// Deployment
// ---------------------------------------------------------------------------

struct FixedDistance {
  double d = 1.0;
};

/// Pair distance drawn from a law truncated to [0, d_max].
struct TruncatedDistance {
  enum class Law {
    Uniform,      // f(d) = 1/d_max
    DiskUniform,  // f(d) = 2d/d_max^2, partner uniform in the disk of radius d_max
    Exponential,  // f(d) proportional to exp(-d/scale)
  };
  Law law = Law::Uniform;
  double d_max = 1.0;
  double scale = 1.0;  // only used by Law::Exponential
};

/// Both devices uniform in a box centred at the anchor; only the horizontal
/// (dx, dy) components are kept.
struct CuboidProjection {
  double dx = 0.3;
  double dy = 0.5;
  double dz = 0.6;
};

using PairModel = std::variant<FixedDistance, TruncatedDistance, CuboidProjection>;

/// Largest horizontal separation a pair model can produce.
double max_pair_span(const PairModel& model);
std::string describe(const PairModel& model);

struct DeploymentParams {
  double region_radius = 300.0;
  double lambda_density = 0.0;  // arrivals per second per m^2
  double mu = 1.0;
  PairModel pair_model = CuboidProjection{};

  double region_area() const;
  double lambda_total() const { return lambda_density * region_area(); }
  void validate() const;
};

struct PairPlacement {
  Point2 pos_a;
  Point2 pos_b;
  double boresight_ab = 0.0;  // direction from a towards b
  double boresight_ba = 0.0;

  double separation() const;
};

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

/// Per-replication generator. Variates are derived from raw 64-bit draws so
/// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Seed for replication `index` of a run seeded with `seed`.
  static std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

  double uniform();  // [0, 1)
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

PairPlacement place_pair(Rng& rng, const DeploymentParams& deployment);

struct DistanceEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo mean of the horizontal pair separation.
DistanceEstimate expected_pair_distance(const DeploymentParams& deployment,
                                        std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Admission
// ---------------------------------------------------------------------------

enum class CheckMode { OneWay, TwoWay };

std::string to_string(CheckMode m);
CheckMode check_mode_from_string(const std::string& s);

/// Power (mW) delivered by a directional transmitter at `tx` aimed along
/// `boresight` to an omnidirectional receiver at `rx`.
double interference_power(const RadioParams& radio, const AntennaModel& antenna,
                          Point2 tx, double boresight, Point2 rx);

/// True if the candidate may be admitted alongside `active`.
bool admission_check(const PairPlacement& candidate, std::span<const PairPlacement> active,
                     const RadioParams& radio, const AntennaModel& antenna, CheckMode mode);

/// True if either device of `source` delivers at least the sensitivity to
/// either device of `victim`.
bool pair_interferes(const PairPlacement& source, const PairPlacement& victim,
                     const RadioParams& radio, const AntennaModel& antenna);

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct SimConfig {
  DeploymentParams deployment;
  RadioParams radio;
  AntennaModel antenna;
  CheckMode check_mode = CheckMode::TwoWay;
  double warmup = 10.0;
  double horizon = 110.0;
  int replications = 20;
  std::uint64_t seed = 1;
  int jobs = 1;
  /// Number of evenly spaced post-warmup instants at which the aggregate
  /// interference at active devices is sampled. Zero disables sampling.
  int interference_snapshots = 0;
  /// When non-empty, each replication writes `<prefix>.rep<k>.csv`.
  std::string trace_prefix;

  void validate() const;
};

enum class EventKind { Arrival, Departure };

struct SimEvent {
  int replication = 0;
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  bool accepted = false;  // arrivals only
  std::uint64_t accepted_total = 0;
  std::uint64_t departed_total = 0;
  std::span<const PairPlacement> active;
};

/// Invoked after every processed event. Setting an observer forces the
/// replications to run sequentially.
using SimObserver = std::function<void(const SimEvent&)>;

struct ReplicationStats {
  double mean_pairs = 0.0;
  double p_accept = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t arrivals_observed = 0;
  std::uint64_t accepted_observed = 0;
  std::vector<double> state_histogram;  // time fraction spent in each state
  double mean_interference_mw = std::numeric_limits<double>::quiet_NaN();
  std::size_t final_active = 0;
};

struct SimStats {
  double mean_pairs = 0.0;
  double mean_pairs_per_m2 = 0.0;
  double p_accept = std::numeric_limits<double>::quiet_NaN();
  bool p_accept_defined = false;  // false when no post-warmup arrivals were seen
  std::vector<double> state_histogram;
  double ci_halfwidth_mean_pairs = 0.0;
  double ci_halfwidth_p_accept = 0.0;
  std::uint64_t arrivals_observed = 0;
  std::uint64_t accepted_observed = 0;
  double mean_interference_mw = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::vector<ReplicationStats> per_replication;
};

ReplicationStats run_replication(const SimConfig& config, int index,
                                 const SimObserver& observer = {});
SimStats run(const SimConfig& config, const SimObserver& observer = {});

/// Half-width of the two-sided 95% Student-t interval for the mean of
/// `values`; infinite for fewer than two values.
double t_confidence_halfwidth(std::span<const double> values);

}  // namespace dirnet
