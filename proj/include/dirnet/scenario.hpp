#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dirnet/queueing.hpp"
#include "dirnet/radio.hpp"
#include "dirnet/simulator.hpp"
#include "dirnet/throughput.hpp"

namespace dirnet {

/// Configuration problem; `line()` is 0 when the error is not tied to one line.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct SweepAxis {
  std::string name;  // config key of a scalar field
  std::vector<double> values;
};

struct Scenario {
  std::string name;
  RadioParams radio;
  DeploymentParams deployment;
  AntennaModel antenna;
  std::string antenna_source = "analytic";
  RateModel rate_model;
  RejectionModel variant = RejectionModel::Exponential;
  MeanPairsSource mean_pairs_source = MeanPairsSource::ClosedForm;
  CheckMode check_mode = CheckMode::TwoWay;

  std::uint64_t seed = 1;
  int replications = 20;
  double warmup_s = 10.0;
  double horizon_s = 110.0;
  double epsilon = 1e-12;

  double power_min_dbm = -20.0;
  double power_max_dbm = 20.0;
  double power_step_db = 1.0;
  double power_tol_db = 0.1;

  std::vector<SweepAxis> sweeps;  // cartesian product, first axis outermost
};

/// Keys accepted in a scenario file, in documentation order.
const std::vector<std::string>& scenario_keys();
/// Scalar keys that may appear in a `sweep` line.
const std::vector<std::string>& sweepable_keys();

Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

std::vector<std::string> preset_names();
const std::string& preset_text(const std::string& name);
Scenario load_preset(const std::string& name);

/// Overwrites one sweepable scalar (config units) and revalidates.
void set_scalar(Scenario& sc, const std::string& key, double value);
double get_scalar(const Scenario& sc, const std::string& key);

/// Throws ScenarioError naming the offending config key.
void validate(const Scenario& sc);

struct SweepPoint {
  std::size_t index = 0;
  std::string label;  // "key=value;key=value", empty without a sweep
  Scenario scenario;
};

std::vector<SweepPoint> expand_sweeps(const Scenario& sc);

SimConfig make_sim_config(const Scenario& sc);
ChainParams make_chain_params(const Scenario& sc);
/// Pair separation used for link rates: exact for fixed distances, otherwise
/// a 10^6-sample Monte Carlo mean seeded from the scenario seed.
double pair_distance_for_rate(const Scenario& sc);
ThroughputScenario make_throughput_scenario(const Scenario& sc, double pair_distance);

}  // namespace dirnet
