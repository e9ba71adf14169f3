#include "dirnet/queueing.hpp"

#include <cmath>
#include <sstream>

#include "dirnet/lambert_w.hpp"
#include "dirnet/radio.hpp"

namespace dirnet {

std::string to_string(RejectionModel m) {
  switch (m) {
    case RejectionModel::PiecewiseLinear: return "piecewise-linear";
    case RejectionModel::Logistic: return "logistic";
    case RejectionModel::Exponential: return "exponential";
  }
  return "?";
}

RejectionModel rejection_model_from_string(const std::string& s) {
  if (s == "piecewise-linear") return RejectionModel::PiecewiseLinear;
  if (s == "logistic") return RejectionModel::Logistic;
  if (s == "exponential") return RejectionModel::Exponential;
  throw std::invalid_argument("unknown rejection model '" + s +
                              "' (expected piecewise-linear, logistic or exponential)");
}

void ChainParams::validate() const {
  if (!(lambda_total >= 0.0) || !std::isfinite(lambda_total))
    throw std::invalid_argument("lambda_total: must be finite and >= 0");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu: must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma: must be finite and >= 0");
}

double gamma_from_geometry(double R, double kappa, double theta, double area) {
  if (!(area > 0.0)) throw std::domain_error("gamma_from_geometry: area must be > 0");
  return pair_coverage_area(R, theta, kappa) / area;
}

double rejection_prob(long long n, double gamma, RejectionModel variant) {
  if (n <= 0 || gamma == 0.0) return 0.0;
  const double x = static_cast<double>(n) * gamma;
  switch (variant) {
    case RejectionModel::PiecewiseLinear: return std::min(x, 1.0);
    case RejectionModel::Logistic: return std::tanh(x);  // 2/(1+e^{-2x}) - 1
    case RejectionModel::Exponential: return -std::expm1(-2.0 * x);
  }
  return 0.0;
}

double acceptance_factor(long long n, double gamma, RejectionModel variant) {
  if (n <= 0 || gamma == 0.0) return 1.0;
  const double x = static_cast<double>(n) * gamma;
  switch (variant) {
    case RejectionModel::PiecewiseLinear: return x >= 1.0 ? 0.0 : 1.0 - x;
    case RejectionModel::Logistic: {
      const double e = std::exp(-2.0 * x);
      return 2.0 * e / (1.0 + e);
    }
    case RejectionModel::Exponential: return std::exp(-2.0 * x);
  }
  return 1.0;
}

SteadyState steady_state(const ChainParams& params, double epsilon, std::size_t max_states) {
  params.validate();
  if (!(epsilon > 0.0 && epsilon <= 1e-3))
    throw std::invalid_argument("steady_state: epsilon must lie in (0, 1e-3]");

  SteadyState ss;
  ss.variant = params.variant;
  ss.gamma = params.gamma;

  const double load = params.load();
  std::vector<double>& w = ss.probs;
  w.push_back(1.0);
  double sum = 1.0;
  double tail = 0.0;

  // Unnormalised weights grow like load^m/m! before the mode; rescale whenever
  // they approach the overflow range.
  constexpr double kRescaleAbove = 1e250;
  constexpr double kRescaleBy = 1e-250;

  for (std::size_t m = 0;; ++m) {
    const double ratio = load * acceptance_factor(static_cast<long long>(m), params.gamma, params.variant) /
                         static_cast<double>(m + 1);
    if (ratio < 1.0) {
      // Subsequent ratios never exceed this one, so the remainder is dominated
      // by a geometric series.
      const double bound = w[m] * ratio / (1.0 - ratio);
      if (bound <= epsilon * sum) {
        tail = bound;
        break;
      }
    }
    if (w.size() >= max_states) {
      std::ostringstream msg;
      msg << "steady_state: no truncation within " << max_states << " states at load "
          << load << " (gamma " << params.gamma << ")";
      throw NonConvergenceError(msg.str());
    }
    double next = w[m] * ratio;
    if (next > kRescaleAbove) {
      for (double& v : w) v *= kRescaleBy;
      sum *= kRescaleBy;
      next *= kRescaleBy;
    }
    w.push_back(next);
    sum += next;
  }

  const double norm = sum + tail;
  for (double& v : w) v /= norm;
  ss.tail_bound = tail / norm;
  return ss;
}

double mean_pairs(const SteadyState& ss) {
  double mean = 0.0;
  for (std::size_t n = 1; n < ss.probs.size(); ++n) mean += static_cast<double>(n) * ss.probs[n];
  return mean;
}

double acceptance_prob(const SteadyState& ss, const ChainParams& params) {
  double p = ss.probs.empty() ? 0.0 : ss.probs[0];
  for (std::size_t n = 1; n < ss.probs.size(); ++n)
    p += acceptance_factor(static_cast<long long>(n), params.gamma, params.variant) * ss.probs[n];
  return p;
}

double mean_pairs_closed_form(const ChainParams& params) {
  params.validate();
  const double load = params.load();
  if (params.gamma == 0.0 || load == 0.0) return load;
  const double g2 = 2.0 * params.gamma;
  return lambert_w0(g2 * load * std::exp(params.gamma)) / g2;
}

double telescoped_state_weight(long long m, const ChainParams& params) {
  if (params.variant != RejectionModel::Exponential)
    throw std::logic_error("telescoped_state_weight: requires the exponential rejection model");
  if (m < 0) throw std::domain_error("telescoped_state_weight: m must be >= 0");
  if (m == 0) return 1.0;
  const double load = params.load();
  if (load == 0.0) return 0.0;
  const double md = static_cast<double>(m);
  return std::exp(md * std::log(load) - params.gamma * md * (md - 1.0) - std::lgamma(md + 1.0));
}

}  // namespace dirnet
