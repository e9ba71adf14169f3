#pragma once

#include <cstddef>
#include <functional>

#include "dirnet/output.hpp"
#include "dirnet/scenario.hpp"

namespace dirnet {

struct CommandOptions {
  int jobs = 1;
};

/// Analytic metrics per sweep point.
/// Columns: point, sweep, theta_deg, p_tx_dbm, lambda_per_m2, lambda_total, gamma,
/// en_series_piecewise_linear, en_series_logistic, en_series_exponential,
/// en_closed_form, en_per_m2, p_accept, tail_bound.
Table cmd_analyze(const Scenario& sc, const CommandOptions& opts = {});

/// Monte Carlo statistics per sweep point.
/// Columns: point, sweep, theta_deg, p_tx_dbm, lambda_per_m2, check_mode, seed,
/// replications, warmup_s, horizon_s, mean_pairs, ci_mean_pairs, mean_pairs_per_m2,
/// p_accept, ci_p_accept, arrivals_observed, low_confidence.
Table cmd_simulate(const Scenario& sc, const CommandOptions& opts = {});

/// Area-rate sweep over transmit power followed by one `optimum` row per sweep point.
/// Columns: point, sweep, theta_deg, lambda_per_m2, row_type, p_tx_dbm, mean_pairs,
/// link_rate_bps, area_rate_bps_per_m2, flat.
Table cmd_sweep_power(const Scenario& sc, const CommandOptions& opts = {});

/// `low_confidence` rule used by cmd_simulate.
bool is_low_confidence(const Scenario& sc, const SimStats& stats);

/// Runs `fn(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace dirnet
