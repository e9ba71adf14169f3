#include "dirnet/throughput.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dirnet {

std::string to_string(NoiseMode m) {
  return m == NoiseMode::ThresholdK ? "threshold-k" : "measured-interference";
}

NoiseMode noise_mode_from_string(const std::string& s) {
  if (s == "threshold-k") return NoiseMode::ThresholdK;
  if (s == "measured-interference") return NoiseMode::MeasuredInterference;
  throw std::invalid_argument("unknown noise mode '" + s +
                              "' (expected threshold-k or measured-interference)");
}

std::string to_string(MeanPairsSource s) { return s == MeanPairsSource::ClosedForm ? "closed-form" : "series"; }

MeanPairsSource mean_pairs_source_from_string(const std::string& s) {
  if (s == "closed-form") return MeanPairsSource::ClosedForm;
  if (s == "series") return MeanPairsSource::Series;
  throw std::invalid_argument("unknown mean-pairs source '" + s + "' (expected closed-form or series)");
}

void RateModel::validate() const {
  if (k_neighbors < 1) throw std::invalid_argument("k_neighbors: must be >= 1");
  if (!std::isfinite(snr_max_db)) throw std::invalid_argument("snr_max_db: must be finite");
}

double noise_power(double n_thr_dbm, int k) {
  if (k < 1) throw std::invalid_argument("noise_power: k must be >= 1");
  return dbm_to_mw(n_thr_dbm) * static_cast<double>(k);
}

double thermal_noise_mw(double bandwidth_hz) { return dbm_to_mw(-174.0 + 10.0 * std::log10(bandwidth_hz)); }

double link_rate(const RadioParams& radio, double p_rx_mw, double p_n_mw) {
  if (!(p_n_mw > 0.0)) throw std::domain_error("link_rate: noise power must be > 0");
  const double snr = std::min(p_rx_mw / p_n_mw, dbm_to_mw(radio.snr_max_db));
  return radio.bandwidth_hz * std::log2(1.0 + snr);
}

AreaRateResult area_rate(const ThroughputScenario& sc) {
  RadioParams radio = sc.radio;
  radio.snr_max_db = sc.rate.snr_max_db;

  AreaRateResult out;
  const double area = sc.deployment.region_area();
  const double R = coverage_radius(radio);
  out.gamma = gamma_from_geometry(R, radio.kappa, radio.theta, area);

  const ChainParams chain{sc.deployment.lambda_total(), sc.deployment.mu, out.gamma, sc.variant};
  if (sc.mean_pairs_source == MeanPairsSource::ClosedForm) {
    out.mean_pairs = mean_pairs_closed_form(chain);
  } else {
    out.mean_pairs = mean_pairs(steady_state(chain, sc.epsilon));
  }

  out.p_rx_mw = receive_power(radio, sc.antenna, sc.pair_distance, 0.0);
  if (sc.rate.noise_mode == NoiseMode::ThresholdK) {
    out.p_n_mw = noise_power(radio.n_thr_dbm, sc.rate.k_neighbors);
  } else {
    SimConfig sim = sc.measurement;
    sim.deployment = sc.deployment;
    sim.radio = radio;
    sim.antenna = sc.antenna;
    if (sim.interference_snapshots == 0) sim.interference_snapshots = 20;
    const SimStats stats = run(sim);
    const double measured = std::isnan(stats.mean_interference_mw) ? 0.0 : stats.mean_interference_mw;
    out.p_n_mw = measured + thermal_noise_mw(radio.bandwidth_hz);
  }
  out.link_rate = link_rate(radio, out.p_rx_mw, out.p_n_mw);
  out.area_rate = out.link_rate * out.mean_pairs / area;
  return out;
}

PowerOptimum optimize_power(const std::function<double(double)>& objective, double lo, double hi,
                            double tol) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw std::invalid_argument("optimize_power: empty power range");
  if (!(tol > 0.0)) throw std::invalid_argument("optimize_power: tolerance must be positive");

  std::vector<double> grid;
  const auto steps = static_cast<long long>(std::floor((hi - lo) / tol + 1e-9));
  for (long long i = 0; i <= steps; ++i) grid.push_back(lo + static_cast<double>(i) * tol);
  if (hi - grid.back() > 1e-9 * tol) grid.push_back(hi);

  std::vector<double> values;
  values.reserve(grid.size());
  for (double p : grid) values.push_back(objective(p));

  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double scale = std::max({std::abs(*min_it), std::abs(*max_it), 1e-300});
  if (*max_it - *min_it <= 1e-12 * scale) return {lo, values.front(), true};

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;

  double a = best > 0 ? grid[best - 1] : grid[best];
  double b = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  for (int iter = 0; iter < 100 && b - a > 1e-6 * tol; ++iter) {
    const double m1 = a + (b - a) / 3.0;
    const double m2 = b - (b - a) / 3.0;
    if (objective(m1) >= objective(m2)) b = m2;
    else a = m1;
  }
  const double refined = 0.5 * (a + b);
  const double refined_value = objective(refined);
  if (refined_value > values[best]) return {refined, refined_value, false};
  return {grid[best], values[best], false};
}

PowerOptimum optimize_power(const ThroughputScenario& scenario, double lo, double hi, double tol) {
  auto objective = [&scenario](double p_dbm) {
    ThroughputScenario s = scenario;
    s.radio.p_tx_dbm = p_dbm;
    return area_rate(s).area_rate;
  };
  return optimize_power(objective, lo, hi, tol);
}

}  // namespace dirnet
