#include "dirnet/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dirnet/commands.hpp"
#include "dirnet/lambert_w.hpp"

namespace dirnet {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

CheckResult make_result(std::string id, std::string description, double measured, double tolerance,
                        double time_limit) {
  CheckResult r;
  r.id = std::move(id);
  r.description = std::move(description);
  r.measured = measured;
  r.tolerance = tolerance;
  r.comparison = "<=";
  r.value_ok = measured <= tolerance;
  r.time_limit = time_limit;
  return r;
}

/// Product kept as mantissa * 2^exponent so long products never underflow.
struct ScaledValue {
  double mantissa = 1.0;
  long long exponent = 0;

  void multiply(double v) {
    int e = 0;
    mantissa = std::frexp(mantissa * v, &e);
    exponent += e;
  }
};

/// exp(x) in the same scaled representation, range-reduced in extended precision.
ScaledValue scaled_exp(double x) {
  const long double ln2 = 0.693147180559945309417232121458176568L;
  const long double k = std::nearbyint(static_cast<long double>(x) / ln2);
  const long double r = static_cast<long double>(x) - k * ln2;
  ScaledValue v;
  v.mantissa = static_cast<double>(std::exp(r));
  v.exponent = static_cast<long long>(k);
  return v;
}

double relative_gap(const ScaledValue& a, const ScaledValue& b) {
  const double ratio = std::ldexp(a.mantissa / b.mantissa, static_cast<int>(a.exponent - b.exponent));
  return std::abs(ratio - 1.0);
}

std::string fmt(double v) { return format_number(v); }

RadioParams reference_radio(double theta_deg) {
  RadioParams r;
  r.p_tx_dbm = 10.0;
  r.n_thr_dbm = -78.0;
  r.theta = deg_to_rad(theta_deg);
  r.kappa = 2.0;
  r.c_const = 6.3e6;
  return r;
}

ChainParams reference_chain(double theta_deg, double lambda_density, double region_radius) {
  const RadioParams radio = reference_radio(theta_deg);
  const double area = std::numbers::pi * region_radius * region_radius;
  return {lambda_density * area, 1.0,
          gamma_from_geometry(coverage_radius(radio), radio.kappa, radio.theta, area),
          RejectionModel::Exponential};
}

}  // namespace

CheckResult check_telescoping() {
  const Stopwatch sw;
  double worst = 0.0;
  std::string where;
  for (double gamma : {1e-4, 1e-2, 0.1, 1.0}) {
    for (int m = 1; m <= 200; ++m) {
      ScaledValue product;
      for (int n = 1; n <= m - 1; ++n) product.multiply(acceptance_factor(n, gamma, RejectionModel::Exponential));
      const double gap = relative_gap(product, scaled_exp(-gamma * m * (m - 1.0)));
      if (gap > worst) {
        worst = gap;
        where = "gamma=" + fmt(gamma) + " m=" + std::to_string(m);
      }
    }
  }
  CheckResult r = make_result("1", "telescoping product of acceptance factors", worst, 1e-12, 1.0);
  r.seconds = sw.seconds();
  r.detail = "max relative error at " + where;
  return r;
}

CheckResult check_mminf_reduction() {
  const Stopwatch sw;
  double worst_pmf = 0.0;
  double worst_mean = 0.0;
  for (double load : {0.5, 5.0, 50.0}) {
    const ChainParams p{load, 1.0, 0.0, RejectionModel::Exponential};
    const SteadyState ss = steady_state(p, 1e-12);
    const std::size_t upto = ss.probs.size() + 200;
    for (std::size_t m = 0; m < upto; ++m) {
      const double md = static_cast<double>(m);
      const double poisson = std::exp(md * std::log(load) - load - std::lgamma(md + 1.0));
      const double got = m < ss.probs.size() ? ss.probs[m] : 0.0;
      worst_pmf = std::max(worst_pmf, std::abs(got - poisson));
    }
    worst_mean = std::max(worst_mean, std::abs(mean_pairs(ss) - load));
  }
  CheckResult r = make_result("2", "gamma=0 reduces to Poisson(load)", std::max(worst_pmf, worst_mean), 1e-9, 1.0);
  r.seconds = sw.seconds();
  r.detail = "sup-norm " + fmt(worst_pmf) + ", mean error " + fmt(worst_mean);
  return r;
}

std::vector<CheckResult> check_lambert_w() {
  const Stopwatch sw;
  double worst = 0.0;
  double worst_x = 0.0;
  constexpr int kPoints = 4000;
  for (int i = 0; i <= kPoints; ++i) {
    const double x = std::pow(10.0, -12.0 + 21.0 * i / kPoints);
    const double w = lambert_w0(x);
    const double residual = std::abs(w * std::exp(w) - x) / std::max(1.0, x);
    if (residual > worst) {
      worst = residual;
      worst_x = x;
    }
  }
  CheckResult a = make_result("3a", "Lambert W residual on log grid [1e-12, 1e9]", worst, 1e-12, 1.0);
  a.seconds = sw.seconds();
  a.detail = "worst at x=" + fmt(worst_x);

  const Stopwatch sw1;
  const double w1 = lambert_w0(1.0);
  CheckResult b = make_result("3b", "W(1) = 0.56714329", std::abs(w1 - 0.56714329), 1e-8, 1.0);
  b.seconds = sw1.seconds();
  b.detail = "W(1)=" + fmt(w1);
  return {a, b};
}

CheckResult check_beam_area() {
  const Stopwatch sw;
  boost::math::quadrature::tanh_sinh<double> integrator;
  double worst = 0.0;
  std::string where;
  const double R = 1.0;
  for (double kappa : {2.0, 3.0, 4.0}) {
    for (double theta_deg : {4.0, 15.0, 30.0, 52.0}) {
      const double theta = deg_to_rad(theta_deg);
      // 2 * integral of x(a) y'(a) over [0, theta]; the second argument is the
      // distance to the nearer endpoint, used to evaluate 1 - a/theta accurately.
      auto integrand = [&](double a, double ac) {
        const double u = a > 0.5 * theta ? ac / theta : 1.0 - a / theta;
        if (u <= 0.0) return 0.0;
        const double d = R * std::pow(u, 1.0 / kappa);
        const double dd = -R / (kappa * theta) * std::pow(u, 1.0 / kappa - 1.0);
        const double x = d * std::cos(a);
        const double y_prime = dd * std::sin(a) + d * std::cos(a);
        return x * y_prime;
      };
      const double quad = 2.0 * integrator.integrate(integrand, 0.0, theta, 1e-14);
      const double gap = std::abs(beam_area(R, theta, kappa) - quad) / quad;
      if (gap > worst) {
        worst = gap;
        where = "kappa=" + fmt(kappa) + " theta=" + fmt(theta_deg) + "deg";
      }
    }
  }
  CheckResult r = make_result("4", "beam area closed form vs quadrature", worst, 1e-6, 5.0);
  r.seconds = sw.seconds();
  r.detail = "max relative gap at " + where;
  return r;
}

CheckResult check_closed_form_vs_series() {
  const Stopwatch sw;
  double worst = 0.0;
  std::string where;
  for (double gamma : {1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.3}) {
    for (double z : {10.0, 30.0, 100.0, 1e3, 1e4, 1e5}) {
      const ChainParams p{z / (2.0 * gamma), 1.0, gamma, RejectionModel::Exponential};
      const double series = mean_pairs(steady_state(p, 1e-12));
      const double gap = std::abs(mean_pairs_closed_form(p) - series) / series;
      if (gap > worst) {
        worst = gap;
        where = "gamma=" + fmt(gamma) + " 2*gamma*load=" + fmt(z);
      }
    }
  }
  CheckResult r = make_result("5", "closed-form E[N] vs series for 2*gamma*load >= 10", worst, 0.05, 10.0);
  r.seconds = sw.seconds();
  r.detail = "max relative gap at " + where;
  return r;
}

std::vector<CheckResult> check_cross_engine(const Scenario& sc, const ValidationOptions& opts) {
  const Stopwatch sw;
  Scenario s = sc;
  s.sweeps.clear();
  s.replications = std::max(s.replications, 20);
  s.horizon_s = std::max(s.horizon_s, s.warmup_s + 50.0 / s.deployment.mu);

  ChainParams chain = make_chain_params(s);
  chain.gamma *= opts.gamma_scale;
  const SteadyState ss = steady_state(chain, s.epsilon);
  const double en = mean_pairs(ss);
  const double pa = acceptance_prob(ss, chain);

  SimConfig cfg = make_sim_config(s);
  cfg.jobs = opts.jobs;
  const SimStats st = run(cfg);
  const double secs = sw.seconds();

  const double en_gap = en > 0.0 ? std::abs(st.mean_pairs - en) / en : std::abs(st.mean_pairs);
  CheckResult a = make_result("6a", "simulated E[N] vs analytic series", en_gap, 0.15, 300.0);
  a.seconds = secs;
  a.detail = "sim " + fmt(st.mean_pairs) + " +/- " + fmt(st.ci_halfwidth_mean_pairs) + ", analytic " + fmt(en) +
             " (gamma " + fmt(chain.gamma) + ", " + std::to_string(s.replications) + " reps)";

  const double pa_gap = st.p_accept_defined ? std::abs(st.p_accept - pa) : std::numeric_limits<double>::infinity();
  CheckResult b = make_result("6b", "simulated P_accept vs analytic", pa_gap, 0.05, 300.0);
  b.seconds = secs;
  b.detail = "sim " + fmt(st.p_accept) + " +/- " + fmt(st.ci_halfwidth_p_accept) + ", analytic " + fmt(pa);
  return {a, b};
}

std::vector<CheckResult> check_monotonicity() {
  const Stopwatch sw;
  int violations = 0;
  double prev_en = -1.0;
  double prev_pa = 2.0;
  for (int i = 0; i < 10; ++i) {
    const double lambda = 1e-3 * std::pow(2000.0, i / 9.0);
    const ChainParams p = reference_chain(52.0, lambda, 3000.0);
    const SteadyState ss = steady_state(p, 1e-12);
    const double en = mean_pairs(ss);
    const double pa = acceptance_prob(ss, p);
    if (en < prev_en) ++violations;
    if (pa > prev_pa) ++violations;
    prev_en = en;
    prev_pa = pa;
  }
  CheckResult a = make_result("7a", "P_accept non-increasing, E[N] non-decreasing in lambda", violations, 0.0, 10.0);
  a.seconds = sw.seconds();
  a.detail = "10-point sweep lambda in [1e-3, 2] per m^2, theta=52deg";

  const Stopwatch sw2;
  struct Row {
    double theta, gamma, en;
  };
  std::vector<Row> rows;
  for (double theta : {8.0, 30.0, 52.0}) {
    const ChainParams p = reference_chain(theta, 2.0, 3000.0);
    rows.push_back({theta, p.gamma, mean_pairs(steady_state(p, 1e-12))});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& l, const Row& r) { return l.gamma < r.gamma; });
  int order_violations = 0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(rows[i].en < rows[i - 1].en)) ++order_violations;
    detail << (i ? "; " : "") << "theta=" << rows[i].theta << " gamma=" << fmt(rows[i].gamma)
           << " E[N]=" << fmt(rows[i].en);
  }
  CheckResult b = make_result("7b", "E[N] ordered inversely to gamma across beamwidths", order_violations, 0.0, 10.0);
  b.seconds = sw2.seconds();
  b.detail = detail.str();
  return {a, b};
}

std::vector<CheckResult> check_power_optimum() {
  const Stopwatch sw;
  ThroughputScenario base;
  base.radio = reference_radio(30.0);
  base.deployment.region_radius = 3000.0;
  base.deployment.mu = 1.0;
  base.deployment.pair_model = CuboidProjection{0.3, 0.5, 0.6};
  base.rate = RateModel{6, 20.0, NoiseMode::ThresholdK};
  base.pair_distance = expected_pair_distance(base.deployment, 1'000'000, 1).mean;
  constexpr double lo = -20.0;
  constexpr double hi = 20.0;
  constexpr double tol = 0.1;

  auto optimum = [&](double lambda) {
    ThroughputScenario s = base;
    s.deployment.lambda_density = lambda;
    return optimize_power(s, lo, hi, tol);
  };
  const PowerOptimum dense = optimum(2.0);
  const PowerOptimum sparse = optimum(0.5);
  const double secs = sw.seconds();

  CheckResult a;
  a.id = "8a";
  a.description = "interior area-rate maximum over [-20, 20] dBm (theta=30deg, lambda=2)";
  a.measured = dense.p_opt_dbm;
  a.tolerance = tol;
  a.comparison = "interior";
  a.value_ok = !dense.flat && dense.p_opt_dbm > lo + tol && dense.p_opt_dbm < hi - tol;
  a.seconds = secs;
  a.time_limit = 30.0;
  a.detail = "p_opt=" + fmt(dense.p_opt_dbm) + " dBm, rate=" + fmt(dense.rate_opt) + " bit/s/m^2, E[d]=" +
             fmt(base.pair_distance) + " m";

  CheckResult b = make_result("8b", "p_opt(lambda=2) <= p_opt(lambda=0.5)", dense.p_opt_dbm - sparse.p_opt_dbm, 0.0, 30.0);
  b.seconds = secs;
  b.detail = "p_opt(2)=" + fmt(dense.p_opt_dbm) + " dBm, p_opt(0.5)=" + fmt(sparse.p_opt_dbm) + " dBm";
  return {a, b};
}

CheckResult check_determinism(const Scenario& sc, const ValidationOptions& opts) {
  const Stopwatch sw;
  auto render = [&] {
    std::ostringstream out;
    write_csv(out, cmd_simulate(sc, CommandOptions{opts.jobs}));
    return out.str();
  };
  const std::string first = render();
  const std::string second = render();
  CheckResult r = make_result("9", "cmd_simulate output identical across runs with a fixed seed",
                              first == second ? 0.0 : 1.0, 0.0, 60.0);
  r.seconds = sw.seconds();
  r.detail = std::to_string(first.size()) + " bytes, seed " + std::to_string(sc.seed);
  return r;
}

std::vector<CheckResult> run_validation(const Scenario& cross_engine, const ValidationOptions& opts) {
  std::vector<CheckResult> all;
  auto append = [&all](std::vector<CheckResult> v) { all.insert(all.end(), v.begin(), v.end()); };
  all.push_back(check_telescoping());
  all.push_back(check_mminf_reduction());
  append(check_lambert_w());
  all.push_back(check_beam_area());
  all.push_back(check_closed_form_vs_series());
  append(check_cross_engine(cross_engine, opts));
  append(check_monotonicity());
  append(check_power_optimum());
  all.push_back(check_determinism(cross_engine, opts));
  return all;
}

Table validation_table(const std::vector<CheckResult>& results) {
  Table t;
  t.columns = {"check", "description", "measured", "comparison", "tolerance",
               "seconds", "time_limit_s", "verdict", "detail"};
  for (const auto& r : results)
    t.add_row({r.id, r.description, r.measured, r.comparison, r.tolerance, r.seconds, r.time_limit,
               std::string(r.passed() ? "PASS" : "FAIL"), r.detail});
  return t;
}

}  // namespace dirnet
