#include "dirnet/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace dirnet {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  // Report the error of the lowest failing index so failures are reproducible.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Table cmd_analyze(const Scenario& sc, const CommandOptions& opts) {
  Table t;
  t.columns = {"point",           "sweep",          "theta_deg",
               "p_tx_dbm",        "lambda_per_m2",  "lambda_total",
               "gamma",           "en_series_piecewise_linear", "en_series_logistic",
               "en_series_exponential", "en_closed_form", "en_per_m2",
               "p_accept",        "tail_bound"};
  const auto points = expand_sweeps(sc);
  std::vector<std::vector<Cell>> rows(points.size());
  parallel_for(points.size(), opts.jobs, [&](std::size_t i) {
    const Scenario& s = points[i].scenario;
    ChainParams chain = make_chain_params(s);
    double en[3] = {};
    double p_accept = 0.0;
    double tail = 0.0;
    const RejectionModel models[] = {RejectionModel::PiecewiseLinear, RejectionModel::Logistic,
                                     RejectionModel::Exponential};
    for (int k = 0; k < 3; ++k) {
      chain.variant = models[k];
      const SteadyState ss = steady_state(chain, s.epsilon);
      en[k] = mean_pairs(ss);
      if (models[k] == s.variant) {
        p_accept = acceptance_prob(ss, chain);
        tail = ss.tail_bound;
      }
    }
    chain.variant = s.variant;
    const double closed = mean_pairs_closed_form(chain);
    const double selected = en[static_cast<int>(s.variant)];
    rows[i] = {static_cast<std::int64_t>(points[i].index), points[i].label, get_scalar(s, "theta_deg"),
               s.radio.p_tx_dbm, s.deployment.lambda_density, chain.lambda_total, chain.gamma,
               en[0], en[1], en[2], closed, selected / s.deployment.region_area(), p_accept, tail};
  });
  for (auto& r : rows) t.add_row(std::move(r));
  return t;
}

bool is_low_confidence(const Scenario& sc, const SimStats& stats) {
  const double window = (sc.horizon_s - sc.warmup_s) * sc.deployment.mu;
  return sc.replications < 2 || window < 10.0 || !stats.p_accept_defined ||
         stats.arrivals_observed < 30 * static_cast<std::uint64_t>(sc.replications);
}

Table cmd_simulate(const Scenario& sc, const CommandOptions& opts) {
  Table t;
  t.columns = {"point",        "sweep",         "theta_deg",  "p_tx_dbm",         "lambda_per_m2",
               "check_mode",   "seed",          "replications", "warmup_s",       "horizon_s",
               "mean_pairs",   "ci_mean_pairs", "mean_pairs_per_m2", "p_accept",   "ci_p_accept",
               "arrivals_observed", "low_confidence"};
  const auto points = expand_sweeps(sc);
  std::vector<std::vector<Cell>> rows(points.size());
  // Parallelise across sweep points when there are several, otherwise across replications.
  const int inner_jobs = points.size() > 1 ? 1 : opts.jobs;
  parallel_for(points.size(), points.size() > 1 ? opts.jobs : 1, [&](std::size_t i) {
    const Scenario& s = points[i].scenario;
    SimConfig cfg = make_sim_config(s);
    cfg.jobs = inner_jobs;
    const SimStats st = run(cfg);
    rows[i] = {static_cast<std::int64_t>(points[i].index),
               points[i].label,
               get_scalar(s, "theta_deg"),
               s.radio.p_tx_dbm,
               s.deployment.lambda_density,
               to_string(s.check_mode),
               static_cast<std::int64_t>(s.seed),
               static_cast<std::int64_t>(s.replications),
               s.warmup_s,
               s.horizon_s,
               st.mean_pairs,
               st.ci_halfwidth_mean_pairs,
               st.mean_pairs_per_m2,
               st.p_accept,
               st.ci_halfwidth_p_accept,
               static_cast<std::int64_t>(st.arrivals_observed),
               is_low_confidence(s, st)};
  });
  for (auto& r : rows) t.add_row(std::move(r));
  return t;
}

Table cmd_sweep_power(const Scenario& sc, const CommandOptions& opts) {
  Table t;
  t.columns = {"point",     "sweep",      "theta_deg",     "lambda_per_m2",        "row_type",
               "p_tx_dbm",  "mean_pairs", "link_rate_bps", "area_rate_bps_per_m2", "flat"};
  const auto points = expand_sweeps(sc);
  const double distance = pair_distance_for_rate(sc);

  std::vector<double> grid;
  const auto steps = static_cast<long long>(std::floor((sc.power_max_dbm - sc.power_min_dbm) / sc.power_step_db + 1e-9));
  for (long long k = 0; k <= steps; ++k) grid.push_back(sc.power_min_dbm + static_cast<double>(k) * sc.power_step_db);
  if (sc.power_max_dbm - grid.back() > 1e-9) grid.push_back(sc.power_max_dbm);

  std::vector<std::vector<std::vector<Cell>>> blocks(points.size());
  parallel_for(points.size(), opts.jobs, [&](std::size_t i) {
    const Scenario& s = points[i].scenario;
    const ThroughputScenario base = make_throughput_scenario(s, distance);
    auto at = [&base](double p) {
      ThroughputScenario v = base;
      v.radio.p_tx_dbm = p;
      return area_rate(v);
    };
    const std::int64_t idx = static_cast<std::int64_t>(points[i].index);
    const double theta_deg = get_scalar(s, "theta_deg");
    for (double p : grid) {
      const AreaRateResult r = at(p);
      blocks[i].push_back({idx, points[i].label, theta_deg, s.deployment.lambda_density, std::string("sweep"), p,
                           r.mean_pairs, r.link_rate, r.area_rate, false});
    }
    const PowerOptimum opt = optimize_power(base, s.power_min_dbm, s.power_max_dbm, s.power_tol_db);
    const AreaRateResult r = at(opt.p_opt_dbm);
    blocks[i].push_back({idx, points[i].label, theta_deg, s.deployment.lambda_density, std::string("optimum"),
                         opt.p_opt_dbm, r.mean_pairs, r.link_rate, opt.rate_opt, opt.flat});
  });
  for (auto& block : blocks)
    for (auto& r : block) t.add_row(std::move(r));
  return t;
}

}  // namespace dirnet
