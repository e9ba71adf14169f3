#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirnet {

/// Approximation used for the probability Q_n that an arrival is rejected
/// while n pairs are active.
enum class RejectionModel { PiecewiseLinear, Logistic, Exponential };

std::string to_string(RejectionModel m);
RejectionModel rejection_model_from_string(const std::string& s);

struct ChainParams {
  double lambda_total = 0.0;  // arrivals per second over the whole region
  double mu = 1.0;
  double gamma = 0.0;         // footprint-to-region area ratio
  RejectionModel variant = RejectionModel::Exponential;

  double load() const { return lambda_total / mu; }
  void validate() const;
};

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truncated stationary distribution of the aggregated birth-death chain.
struct SteadyState {
  std::vector<double> probs;  // pi_0 .. pi_M
  double tail_bound = 0.0;    // upper bound on the mass beyond M
  RejectionModel variant = RejectionModel::Exponential;
  double gamma = 0.0;

  std::size_t truncation_index() const { return probs.empty() ? 0 : probs.size() - 1; }
};

inline constexpr std::size_t kDefaultMaxStates = 10'000'000;

double gamma_from_geometry(double R, double kappa, double theta, double area);

double rejection_prob(long long n, double gamma, RejectionModel variant);
/// 1 - Q_n, evaluated without cancellation.
double acceptance_factor(long long n, double gamma, RejectionModel variant);

SteadyState steady_state(const ChainParams& params, double epsilon = 1e-12,
                         std::size_t max_states = kDefaultMaxStates);

double mean_pairs(const SteadyState& ss);
double acceptance_prob(const SteadyState& ss, const ChainParams& params);

/// Mean population from the Lambert-W closed form; the gamma -> 0 limit is the load.
double mean_pairs_closed_form(const ChainParams& params);

/// Unnormalised weight of state m under the exponential rejection model,
/// (load)^m exp(-gamma m (m-1)) / m!.
double telescoped_state_weight(long long m, const ChainParams& params);

}  // namespace dirnet
