#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "dirnet/lambert_w.hpp"
#include "dirnet/queueing.hpp"

using namespace dirnet;

namespace {

ChainParams chain(double a, double gamma, RejectionModel v = RejectionModel::Exponential) {
  ChainParams p;
  p.lambda_total = a;
  p.mu = 1.0;
  p.gamma = gamma;
  p.variant = v;
  return p;
}

constexpr RejectionModel kAll[] = {RejectionModel::PiecewiseLinear, RejectionModel::Logistic,
                                   RejectionModel::Exponential};

}  // namespace

TEST_CASE("rejection models") {
  CHECK(rejection_prob(0, 0.1, RejectionModel::PiecewiseLinear) == 0.0);
  CHECK(rejection_prob(3, 0.1, RejectionModel::PiecewiseLinear) == doctest::Approx(0.3));
  CHECK(rejection_prob(30, 0.1, RejectionModel::PiecewiseLinear) == 1.0);
  CHECK(rejection_prob(3, 0.1, RejectionModel::Logistic) == doctest::Approx(std::tanh(0.3)));
  CHECK(rejection_prob(3, 0.1, RejectionModel::Exponential) == doctest::Approx(0.4511883639059736).epsilon(1e-14));

  for (auto v : kAll) {
    double prev = -1.0;
    for (long long n = 0; n < 200; ++n) {
      const double q = rejection_prob(n, 0.013, v);
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
      CHECK(q >= prev);
      CHECK(acceptance_factor(n, 0.013, v) == doctest::Approx(1.0 - q).epsilon(1e-12));
      prev = q;
    }
  }
  // Accurate acceptance where 1 - Q underflows to zero in double.
  CHECK(acceptance_factor(1000, 0.1, RejectionModel::Exponential) == doctest::Approx(std::exp(-200.0)).epsilon(1e-12));
  CHECK(acceptance_factor(100, 0.1, RejectionModel::Logistic) > 0.0);
  // Tiny gamma: relative accuracy of Q itself.
  CHECK(rejection_prob(1, 1e-12, RejectionModel::Exponential) == doctest::Approx(2e-12).epsilon(1e-10));

  // Logistic never rejects more than either other model; all agree near zero
  // up to the factor 2 carried by the exponential form.
  for (long long n = 1; n < 100; ++n) {
    const double g = 0.004;
    const double pl = rejection_prob(n, g, RejectionModel::PiecewiseLinear);
    const double lg = rejection_prob(n, g, RejectionModel::Logistic);
    const double ex = rejection_prob(n, g, RejectionModel::Exponential);
    CHECK(lg <= pl);
    CHECK(lg <= ex);
  }
  const double x = 1e-4;
  CHECK(rejection_prob(1, x, RejectionModel::Logistic) / rejection_prob(1, x, RejectionModel::PiecewiseLinear) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rejection_prob(1, x, RejectionModel::Exponential) / rejection_prob(1, x, RejectionModel::PiecewiseLinear) ==
        doctest::Approx(2.0).epsilon(1e-3));

  CHECK(rejection_model_from_string("logistic") == RejectionModel::Logistic);
  CHECK(to_string(RejectionModel::PiecewiseLinear) == "piecewise-linear");
  CHECK_THROWS(rejection_model_from_string("linear"));
}

TEST_CASE("footprint ratio") {
  const double area = std::numbers::pi * 3000.0 * 3000.0;
  CHECK(gamma_from_geometry(44.5, 2.0, 52.0 * std::numbers::pi / 180.0, area) ==
        doctest::Approx(6.35635802469e-5).epsilon(1e-10));
}

TEST_CASE("stationary distribution, reference values") {
  const ChainParams p = chain(1.0, 0.1);
  const SteadyState ss = steady_state(p);
  REQUIRE(ss.probs.size() > 3);
  CHECK(ss.probs[0] == doctest::Approx(0.3976801324328632).epsilon(1e-12));
  CHECK(ss.probs[1] == doctest::Approx(0.3976801324328632).epsilon(1e-12));
  CHECK(ss.probs[2] == doctest::Approx(0.1627964771554548).epsilon(1e-12));
  CHECK(mean_pairs(ss) == doctest::Approx(0.8547780704477171).epsilon(1e-12));
  CHECK(acceptance_prob(ss, p) == doctest::Approx(0.8547780704477171).epsilon(1e-12));
  CHECK(rejection_prob(3, 0.1, p.variant) == doctest::Approx(0.4511883639059736).epsilon(1e-14));
}

TEST_CASE("stationary distribution, structural properties") {
  for (auto v : kAll) {
    for (double a : {0.5, 3.0, 40.0, 2000.0}) {
      for (double g : {0.0, 1e-4, 0.02, 0.5}) {
        const ChainParams p = chain(a, g, v);
        const SteadyState ss = steady_state(p, 1e-12);
        const double total = std::accumulate(ss.probs.begin(), ss.probs.end(), 0.0);
        CHECK(total + ss.tail_bound == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ss.tail_bound <= 1e-12);
        for (double q : ss.probs) CHECK(q >= 0.0);
        // Flow balance: accepted arrival rate equals departure rate.
        CHECK(a * acceptance_prob(ss, p) == doctest::Approx(mean_pairs(ss)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("zero footprint reduces to a Poisson population") {
  for (double a : {0.3, 7.0, 150.0, 1e4}) {
    const ChainParams p = chain(a, 0.0);
    const SteadyState ss = steady_state(p);
    CHECK(mean_pairs(ss) == doctest::Approx(a).epsilon(1e-10));
    CHECK(acceptance_prob(ss, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_pairs_closed_form(p) == a);
  }
  const SteadyState ss = steady_state(chain(2.0, 0.0));
  for (std::size_t n = 0; n < 10; ++n) {
    const double want = std::exp(-2.0 + n * std::log(2.0) - std::lgamma(n + 1.0));
    CHECK(ss.probs[n] == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("model ordering of the mean population") {
  for (double a : {5.0, 80.0, 3000.0}) {
    for (double g : {1e-3, 0.05}) {
      const double pl = mean_pairs(steady_state(chain(a, g, RejectionModel::PiecewiseLinear)));
      const double lg = mean_pairs(steady_state(chain(a, g, RejectionModel::Logistic)));
      const double ex = mean_pairs(steady_state(chain(a, g, RejectionModel::Exponential)));
      CHECK(lg >= pl);
      CHECK(lg >= ex);
      CHECK(pl <= a);
    }
  }
}

TEST_CASE("telescoped weights") {
  const ChainParams p = chain(1.0, 0.1);
  CHECK(telescoped_state_weight(3, p) == doctest::Approx(0.09146860601567107).epsilon(1e-13));
  CHECK(telescoped_state_weight(0, p) == 1.0);
  const SteadyState ss = steady_state(p);
  for (long long m = 1; m <= static_cast<long long>(ss.truncation_index()); ++m) {
    CHECK(ss.probs[m] / ss.probs[0] == doctest::Approx(telescoped_state_weight(m, p)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(telescoped_state_weight(2, chain(1.0, 0.1, RejectionModel::Logistic)), std::logic_error);
}

TEST_CASE("closed form") {
  CHECK(mean_pairs_closed_form(chain(1.0, 0.1)) == doctest::Approx(0.9195195994037942).epsilon(1e-13));
  CHECK(mean_pairs_closed_form(chain(5.65e7, 6.36e-5)) == doctest::Approx(54578.7355986088).epsilon(1e-12));
  // Decreasing in the footprint ratio, increasing in the load, bounded by
  // a e^gamma since W(x) <= x.
  double prev = std::numeric_limits<double>::infinity();
  for (double g = 1e-6; g < 1.0; g *= 1.7) {
    const double en = mean_pairs_closed_form(chain(500.0, g));
    CHECK(en < prev);
    prev = en;
  }
  prev = 0.0;
  for (double a = 0.01; a < 1e8; a *= 3.0) {
    const double en = mean_pairs_closed_form(chain(a, 0.01));
    CHECK(en > prev);
    CHECK(en <= a * std::exp(0.01));
    prev = en;
  }
  // Continuous at the gamma -> 0 limit.
  CHECK(mean_pairs_closed_form(chain(30.0, 1e-12)) == doctest::Approx(30.0).epsilon(1e-8));
}

TEST_CASE("closed form tracks the series in the small-footprint regime") {
  for (double g : {1e-5, 1e-3, 0.05}) {
    for (double x : {10.0, 1e3, 1e5}) {
      const double a = x / (2.0 * g);
      const ChainParams p = chain(a, g);
      const double series = mean_pairs(steady_state(p));
      const double closed = mean_pairs_closed_form(p);
      CHECK(std::abs(closed - series) / series <= 0.05);
    }
  }
}

TEST_CASE("truncation controls and errors") {
  const ChainParams p = chain(1e6, 0.0);
  CHECK_THROWS_AS(steady_state(p, 1e-12, 1000), NonConvergenceError);
  CHECK_THROWS(steady_state(chain(1.0, 0.1), 0.0));
  CHECK_THROWS(steady_state(chain(1.0, 0.1), 0.01));
  const SteadyState loose = steady_state(chain(50.0, 0.0), 1e-4);
  const SteadyState tight = steady_state(chain(50.0, 0.0), 1e-14);
  CHECK(loose.truncation_index() < tight.truncation_index());
  CHECK(loose.tail_bound <= 1e-4);

  ChainParams bad = chain(1.0, 0.1);
  bad.gamma = -1.0;
  CHECK_THROWS(bad.validate());
  bad = chain(-1.0, 0.1);
  CHECK_THROWS(bad.validate());
  bad = chain(1.0, 0.1);
  bad.mu = 0.0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("large loads stay finite") {
  const ChainParams p = chain(5.65e7, 6.36e-5);
  const SteadyState ss = steady_state(p);
  const double en = mean_pairs(ss);
  CHECK(std::isfinite(en));
  CHECK(en > 0.0);
  CHECK(std::abs(mean_pairs_closed_form(p) - en) / en <= 0.05);
}

TEST_CASE("lambert w") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(lambert_w0(1.0) == doctest::Approx(0.5671432904097839).epsilon(1e-15));
  CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isinf(lambert_w0(std::numeric_limits<double>::infinity())));
  CHECK_THROWS_AS(lambert_w0(-0.5), std::domain_error);
  for (double x : {-0.3678, -0.3, -0.25, -0.1, 1e-300, 1e-8, 0.5, 0.999, 1.0, 1.001, 2.5, 3.0, 10.0, 1e5, 1e100, 1e300}) {
    const double w = lambert_w0(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
  }
  double prev = -1.0;
  for (double x = -0.36; x < 1e6; x = x < 1.0 ? x + 0.01 : x * 1.1) {
    const double w = lambert_w0(x);
    CHECK(w > prev);
    prev = w;
  }
}
