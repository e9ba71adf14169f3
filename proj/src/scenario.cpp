#include "dirnet/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dirnet {

namespace {

const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> table = {
      {"paper-fig4", R"(# Reference-scale deployment: population and acceptance vs arrival density.
name = paper-fig4
p_tx_dbm = 10
n_thr_dbm = -78
theta_deg = 52
r_d_m = 3000
mu_per_s = 1
lambda_per_m2 = 0.1
pair_model = cuboid:0.3,0.5,0.6
sweep = theta_deg: 13, 26, 52
sweep = lambda_per_m2: 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1, 2
)"},
      {"paper-fig5", R"(# Reference-scale area throughput vs transmit power for several densities.
name = paper-fig5
p_tx_dbm = 10
n_thr_dbm = -78
theta_deg = 30
r_d_m = 3000
mu_per_s = 1
lambda_per_m2 = 2
pair_model = cuboid:0.3,0.5,0.6
k_neighbors = 6
snr_max_db = 20
power_min_dbm = -20
power_max_dbm = 20
power_step_db = 1
sweep = lambda_per_m2: 0.5, 1, 2
)"},
      {"paper-fig6", R"(# Reference-scale area throughput vs transmit power for several beamwidths.
name = paper-fig6
p_tx_dbm = 10
n_thr_dbm = -78
theta_deg = 30
r_d_m = 3000
mu_per_s = 1
lambda_per_m2 = 2
pair_model = cuboid:0.3,0.5,0.6
k_neighbors = 6
snr_max_db = 20
power_min_dbm = -20
power_max_dbm = 20
power_step_db = 1
sweep = theta_deg: 4, 8, 15, 30, 52
)"},
      {"desk-fig4", R"(# Desk-scale cross-validation setting; the density gives an analytic E[N] of about 50.
name = desk-fig4
p_tx_dbm = 10
n_thr_dbm = -78
theta_deg = 52
r_d_m = 300
mu_per_s = 1
lambda_per_m2 = 0.00033297316
pair_model = cuboid:0.3,0.5,0.6
check_mode = two-way
variant = exponential
seed = 1
replications = 20
warmup_s = 10
horizon_s = 110
)"},
      {"desk-fig5", R"(# Desk-scale power sweep for two densities.
name = desk-fig5
p_tx_dbm = 10
n_thr_dbm = -78
theta_deg = 30
r_d_m = 300
mu_per_s = 1
lambda_per_m2 = 0.004
pair_model = cuboid:0.3,0.5,0.6
k_neighbors = 6
snr_max_db = 20
power_min_dbm = -20
power_max_dbm = 20
power_step_db = 1
replications = 4
sweep = lambda_per_m2: 0.001, 0.004
)"},
      {"desk-fig6", R"(# Desk-scale power sweep for several beamwidths.
name = desk-fig6
p_tx_dbm = 10
n_thr_dbm = -78
theta_deg = 30
r_d_m = 300
mu_per_s = 1
lambda_per_m2 = 0.004
pair_model = cuboid:0.3,0.5,0.6
k_neighbors = 6
snr_max_db = 20
power_min_dbm = -20
power_max_dbm = 20
power_step_db = 1
replications = 4
sweep = theta_deg: 8, 15, 30, 52
)"},
      {"desk-mminf", R"(# Transmit power barely above sensitivity: footprints vanish and the system is M/M/inf.
name = desk-mminf
p_tx_dbm = -77.9
n_thr_dbm = -78
theta_deg = 52
r_d_m = 300
mu_per_s = 1
lambda_per_m2 = 0.00017683882565766
pair_model = cuboid:0.3,0.5,0.6
check_mode = two-way
seed = 1
replications = 20
warmup_s = 10
horizon_s = 110
)"},
  };
  return table;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& key, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ScenarioError(key + ": expected a finite number, got '" + text + "'", line);
  return v;
}

long long parse_integer(const std::string& text, const std::string& key, int line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ScenarioError(key + ": expected an integer, got '" + text + "'", line);
  return v;
}

PairModel parse_pair_model(const std::string& text, int line) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ScenarioError("pair_model: expected kind:parameters, got '" + text + "'", line);
  const std::string kind = trim(text.substr(0, colon));
  std::vector<double> args;
  for (const auto& part : split(text.substr(colon + 1), ',')) args.push_back(parse_double(part, "pair_model", line));

  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw ScenarioError("pair_model: '" + kind + "' takes " + std::to_string(n) + " parameter(s)", line);
  };
  if (kind == "fixed") {
    need(1);
    return FixedDistance{args[0]};
  }
  if (kind == "uniform") {
    need(1);
    return TruncatedDistance{TruncatedDistance::Law::Uniform, args[0], 1.0};
  }
  if (kind == "disk") {
    need(1);
    return TruncatedDistance{TruncatedDistance::Law::DiskUniform, args[0], 1.0};
  }
  if (kind == "exponential") {
    need(2);
    return TruncatedDistance{TruncatedDistance::Law::Exponential, args[1], args[0]};
  }
  if (kind == "cuboid") {
    need(3);
    return CuboidProjection{args[0], args[1], args[2]};
  }
  throw ScenarioError("pair_model: unknown kind '" + kind +
                          "' (expected fixed, uniform, disk, exponential or cuboid)",
                      line);
}

template <class Fn>
auto parse_enum(const std::string& key, const std::string& value, int line, Fn&& fn) {
  try {
    return fn(value);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(key + ": " + e.what(), line);
  }
}

}  // namespace

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys = {
      "name",          "p_tx_dbm",      "n_thr_dbm",     "theta_deg",        "kappa",
      "c_const",       "bandwidth_hz",  "snr_max_db",    "r_d_m",            "lambda_per_m2",
      "mu_per_s",      "pair_model",    "antenna",       "check_mode",       "variant",
      "mean_pairs_source", "noise_mode", "k_neighbors",  "seed",             "replications",
      "warmup_s",      "horizon_s",     "epsilon",       "power_min_dbm",    "power_max_dbm",
      "power_step_db", "power_tol_db",  "sweep"};
  return keys;
}

const std::vector<std::string>& sweepable_keys() {
  static const std::vector<std::string> keys = {
      "p_tx_dbm", "n_thr_dbm", "theta_deg", "kappa",       "c_const",  "bandwidth_hz", "snr_max_db",
      "r_d_m",    "lambda_per_m2", "mu_per_s", "k_neighbors", "warmup_s", "horizon_s"};
  return keys;
}

void set_scalar(Scenario& sc, const std::string& key, double v) {
  if (key == "p_tx_dbm") sc.radio.p_tx_dbm = v;
  else if (key == "n_thr_dbm") sc.radio.n_thr_dbm = v;
  else if (key == "theta_deg") sc.radio.theta = deg_to_rad(v);
  else if (key == "kappa") sc.radio.kappa = v;
  else if (key == "c_const") sc.radio.c_const = v;
  else if (key == "bandwidth_hz") sc.radio.bandwidth_hz = v;
  else if (key == "snr_max_db") sc.radio.snr_max_db = sc.rate_model.snr_max_db = v;
  else if (key == "r_d_m") sc.deployment.region_radius = v;
  else if (key == "lambda_per_m2") sc.deployment.lambda_density = v;
  else if (key == "mu_per_s") sc.deployment.mu = v;
  else if (key == "k_neighbors") {
    if (v != std::floor(v)) throw ScenarioError("k_neighbors: must be an integer");
    sc.rate_model.k_neighbors = static_cast<int>(v);
  } else if (key == "warmup_s") sc.warmup_s = v;
  else if (key == "horizon_s") sc.horizon_s = v;
  else throw ScenarioError("sweep: '" + key + "' is not a sweepable scalar field");
}

double get_scalar(const Scenario& sc, const std::string& key) {
  if (key == "p_tx_dbm") return sc.radio.p_tx_dbm;
  if (key == "n_thr_dbm") return sc.radio.n_thr_dbm;
  if (key == "theta_deg") return std::round(rad_to_deg(sc.radio.theta) * 1e9) / 1e9;  // nano-degree resolution
  if (key == "kappa") return sc.radio.kappa;
  if (key == "c_const") return sc.radio.c_const;
  if (key == "bandwidth_hz") return sc.radio.bandwidth_hz;
  if (key == "snr_max_db") return sc.radio.snr_max_db;
  if (key == "r_d_m") return sc.deployment.region_radius;
  if (key == "lambda_per_m2") return sc.deployment.lambda_density;
  if (key == "mu_per_s") return sc.deployment.mu;
  if (key == "k_neighbors") return sc.rate_model.k_neighbors;
  if (key == "warmup_s") return sc.warmup_s;
  if (key == "horizon_s") return sc.horizon_s;
  throw ScenarioError("'" + key + "' is not a scalar field");
}

void validate(const Scenario& sc) {
  auto fail = [](const std::string& key, const std::string& why) { throw ScenarioError(key + ": " + why); };
  const double theta_deg = rad_to_deg(sc.radio.theta);
  if (!(theta_deg > 0.0 && theta_deg <= 180.0)) fail("theta_deg", "must lie in (0, 180]");
  if (!(sc.radio.kappa > 0.0)) fail("kappa", "must be positive");
  if (!(sc.radio.c_const > 0.0)) fail("c_const", "must be positive");
  if (!(sc.radio.p_tx_dbm > sc.radio.n_thr_dbm)) fail("p_tx_dbm", "must exceed n_thr_dbm");
  if (!(sc.radio.bandwidth_hz > 0.0)) fail("bandwidth_hz", "must be positive");
  if (!(sc.deployment.region_radius > 0.0)) fail("r_d_m", "must be positive");
  if (!(sc.deployment.lambda_density >= 0.0)) fail("lambda_per_m2", "must be >= 0");
  if (!(sc.deployment.mu > 0.0)) fail("mu_per_s", "must be positive");
  try {
    sc.deployment.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  if (sc.rate_model.k_neighbors < 1) fail("k_neighbors", "must be >= 1");
  if (sc.replications < 1) fail("replications", "must be >= 1");
  if (!(sc.warmup_s > 0.0)) fail("warmup_s", "must be positive");
  if (!(sc.horizon_s > sc.warmup_s)) fail("horizon_s", "must exceed warmup_s");
  if (!(sc.epsilon > 0.0 && sc.epsilon <= 1e-3)) fail("epsilon", "must lie in (0, 1e-3]");
  if (!(sc.power_min_dbm <= sc.power_max_dbm)) fail("power_max_dbm", "must be >= power_min_dbm");
  if (!(sc.power_step_db > 0.0)) fail("power_step_db", "must be positive");
  if (!(sc.power_tol_db > 0.0)) fail("power_tol_db", "must be positive");
  std::set<std::string> seen;
  for (const auto& axis : sc.sweeps) {
    if (std::find(sweepable_keys().begin(), sweepable_keys().end(), axis.name) == sweepable_keys().end())
      fail("sweep", "'" + axis.name + "' is not a sweepable scalar field");
    if (!seen.insert(axis.name).second) fail("sweep", "'" + axis.name + "' swept twice");
    if (axis.values.empty()) fail("sweep", "no values for '" + axis.name + "'");
  }
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Scenario sc;
  sc.name = origin;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ScenarioError("expected 'key = value'", line);
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    if (std::find(scenario_keys().begin(), scenario_keys().end(), key) == scenario_keys().end())
      throw ScenarioError("unknown key '" + key + "'", line);
    if (key != "sweep" && !seen.insert(key).second) throw ScenarioError("duplicate key '" + key + "'", line);
    if (value.empty()) throw ScenarioError(key + ": missing value", line);

    auto number = [&] { return parse_double(value, key, line); };
    auto integer = [&] { return parse_integer(value, key, line); };

    if (key == "name") sc.name = value;
    else if (key == "pair_model") sc.deployment.pair_model = parse_pair_model(value, line);
    else if (key == "antenna") {
      sc.antenna_source = value;
      if (value == "analytic") {
        sc.antenna = AntennaModel::analytic();
      } else if (value.rfind("table:", 0) == 0) {
        try {
          sc.antenna = load_antenna_table(value.substr(6));
        } catch (const std::exception& e) {
          throw ScenarioError(std::string("antenna: ") + e.what(), line);
        }
      } else {
        throw ScenarioError("antenna: expected 'analytic' or 'table:<path>'", line);
      }
    } else if (key == "check_mode") sc.check_mode = parse_enum(key, value, line, check_mode_from_string);
    else if (key == "variant") sc.variant = parse_enum(key, value, line, rejection_model_from_string);
    else if (key == "mean_pairs_source")
      sc.mean_pairs_source = parse_enum(key, value, line, mean_pairs_source_from_string);
    else if (key == "noise_mode") sc.rate_model.noise_mode = parse_enum(key, value, line, noise_mode_from_string);
    else if (key == "seed") {
      const long long s = integer();
      if (s < 0) throw ScenarioError("seed: must be >= 0", line);
      sc.seed = static_cast<std::uint64_t>(s);
    } else if (key == "replications") sc.replications = static_cast<int>(integer());
    else if (key == "k_neighbors") sc.rate_model.k_neighbors = static_cast<int>(integer());
    else if (key == "epsilon") sc.epsilon = number();
    else if (key == "power_min_dbm") sc.power_min_dbm = number();
    else if (key == "power_max_dbm") sc.power_max_dbm = number();
    else if (key == "power_step_db") sc.power_step_db = number();
    else if (key == "power_tol_db") sc.power_tol_db = number();
    else if (key == "sweep") {
      const auto colon = value.find(':');
      if (colon == std::string::npos) throw ScenarioError("sweep: expected 'name: v1, v2, ...'", line);
      SweepAxis axis;
      axis.name = trim(value.substr(0, colon));
      if (std::find(sweepable_keys().begin(), sweepable_keys().end(), axis.name) == sweepable_keys().end())
        throw ScenarioError("sweep: '" + axis.name + "' is not a sweepable scalar field", line);
      for (const auto& part : split(value.substr(colon + 1), ','))
        axis.values.push_back(parse_double(part, "sweep", line));
      if (axis.values.empty()) throw ScenarioError("sweep: no values", line);
      sc.sweeps.push_back(std::move(axis));
    } else {
      set_scalar(sc, key, number());
    }
  }

  for (const char* required : {"p_tx_dbm", "theta_deg", "r_d_m", "lambda_per_m2"})
    if (!seen.count(required)) throw ScenarioError(std::string("missing required key '") + required + "'");

  validate(sc);
  for (const auto& point : expand_sweeps(sc)) validate(point.scenario);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    return parse_scenario(buf.str(), path);
  } catch (const ScenarioError& e) {
    if (e.line() > 0) throw ScenarioError(path + ":" + std::to_string(e.line()) + ": " + e.what(), e.line());
    throw ScenarioError(path + ": " + e.what());
  }
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : presets()) names.push_back(name);
  return names;
}

const std::string& preset_text(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) throw ScenarioError("unknown preset '" + name + "'");
  return it->second;
}

Scenario load_preset(const std::string& name) { return parse_scenario(preset_text(name), name); }

std::vector<SweepPoint> expand_sweeps(const Scenario& sc) {
  std::vector<SweepPoint> points;
  std::size_t total = 1;
  for (const auto& axis : sc.sweeps) total *= axis.values.size();
  for (std::size_t i = 0; i < total; ++i) {
    SweepPoint p;
    p.index = i;
    p.scenario = sc;
    p.scenario.sweeps.clear();
    std::size_t rem = i;
    std::vector<std::string> parts(sc.sweeps.size());
    for (std::size_t a = sc.sweeps.size(); a-- > 0;) {
      const auto& axis = sc.sweeps[a];
      const double v = axis.values[rem % axis.values.size()];
      rem /= axis.values.size();
      set_scalar(p.scenario, axis.name, v);
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      parts[a] = axis.name + "=" + std::string(buf, res.ptr);
    }
    for (std::size_t a = 0; a < parts.size(); ++a) p.label += (a ? ";" : "") + parts[a];
    points.push_back(std::move(p));
  }
  return points;
}

SimConfig make_sim_config(const Scenario& sc) {
  SimConfig c;
  c.deployment = sc.deployment;
  c.radio = sc.radio;
  c.antenna = sc.antenna;
  c.check_mode = sc.check_mode;
  c.warmup = sc.warmup_s;
  c.horizon = sc.horizon_s;
  c.replications = sc.replications;
  c.seed = sc.seed;
  return c;
}

ChainParams make_chain_params(const Scenario& sc) {
  const double R = coverage_radius(sc.radio);
  return {sc.deployment.lambda_total(), sc.deployment.mu,
          gamma_from_geometry(R, sc.radio.kappa, sc.radio.theta, sc.deployment.region_area()), sc.variant};
}

double pair_distance_for_rate(const Scenario& sc) {
  if (const auto* fixed = std::get_if<FixedDistance>(&sc.deployment.pair_model)) return fixed->d;
  return expected_pair_distance(sc.deployment, 1'000'000, sc.seed).mean;
}

ThroughputScenario make_throughput_scenario(const Scenario& sc, double pair_distance) {
  ThroughputScenario t;
  t.radio = sc.radio;
  t.antenna = sc.antenna;
  t.deployment = sc.deployment;
  t.rate = sc.rate_model;
  t.variant = sc.variant;
  t.mean_pairs_source = sc.mean_pairs_source;
  t.pair_distance = pair_distance;
  t.epsilon = sc.epsilon;
  t.measurement = make_sim_config(sc);
  return t;
}

}  // namespace dirnet
