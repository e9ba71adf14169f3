#include <cmath>

#include "doctest.h"
#include "dirnet/throughput.hpp"

using namespace dirnet;

namespace {

ThroughputScenario dense_scenario() {
  ThroughputScenario s;
  s.radio.theta = deg_to_rad(30.0);
  s.deployment.region_radius = 3000.0;
  s.deployment.lambda_density = 2.0;
  s.pair_distance = 0.21195408333613888;
  return s;
}

}  // namespace

TEST_CASE("noise models") {
  CHECK(noise_power(-78.0, 6) == doctest::Approx(9.509359154766681e-8).epsilon(1e-13));
  CHECK(mw_to_dbm(noise_power(-78.0, 6)) == doctest::Approx(-70.21848749616356).epsilon(1e-13));
  CHECK(noise_power(-78.0, 1) == doctest::Approx(dbm_to_mw(-78.0)));
  CHECK_THROWS(noise_power(-78.0, 0));
  CHECK(thermal_noise_mw(2.16e9) == doctest::Approx(std::pow(10.0, -17.4) * 2.16e9).epsilon(1e-12));
  CHECK(noise_mode_from_string("measured-interference") == NoiseMode::MeasuredInterference);
  CHECK(to_string(NoiseMode::ThresholdK) == "threshold-k");
  CHECK(mean_pairs_source_from_string("series") == MeanPairsSource::Series);
  CHECK_THROWS(noise_mode_from_string("kTB"));
}

TEST_CASE("link rate") {
  RadioParams r;
  CHECK(link_rate(r, 1.0, 1.0) == doctest::Approx(2.16e9));
  CHECK(link_rate(r, 0.0, 1.0) == 0.0);
  // Capped at 20 dB in linear units.
  const double cap = 2.16e9 * std::log2(101.0);
  CHECK(link_rate(r, 1e6, 1.0) == doctest::Approx(cap).epsilon(1e-14));
  CHECK(link_rate(r, 100.0, 1.0) == doctest::Approx(cap).epsilon(1e-14));
  r.snr_max_db = 10.0;
  CHECK(link_rate(r, 1e6, 1.0) == doctest::Approx(2.16e9 * std::log2(11.0)).epsilon(1e-14));
  CHECK_THROWS_AS(link_rate(r, 1.0, 0.0), std::domain_error);
  double prev = -1.0;
  for (double p = 1e-6; p < 1e3; p *= 1.5) {
    const double c = link_rate(r, p, 1.0);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("area rate") {
  const ThroughputScenario s = dense_scenario();
  const AreaRateResult res = area_rate(s);
  const double area = s.deployment.region_area();
  CHECK(res.area_rate == doctest::Approx(res.link_rate * res.mean_pairs / area).epsilon(1e-14));
  CHECK(res.p_n_mw == doctest::Approx(noise_power(-78.0, 6)));
  CHECK(res.p_rx_mw == doctest::Approx(receive_power(s.radio, s.antenna, s.pair_distance, 0.0)));
  const double R = coverage_radius(s.radio);
  CHECK(res.gamma == doctest::Approx(gamma_from_geometry(R, 2.0, s.radio.theta, area)));
  CHECK(res.mean_pairs ==
        doctest::Approx(mean_pairs_closed_form({s.deployment.lambda_total(), 1.0, res.gamma, s.variant})));
  // The rate model carries the cap.
  ThroughputScenario low_cap = s;
  low_cap.rate.snr_max_db = 5.0;
  low_cap.radio.snr_max_db = 40.0;
  CHECK(area_rate(low_cap).link_rate == doctest::Approx(2.16e9 * std::log2(1.0 + std::pow(10.0, 0.5))));

  ThroughputScenario series = s;
  series.deployment.region_radius = 300.0;
  series.deployment.lambda_density = 0.01;
  series.mean_pairs_source = MeanPairsSource::Series;
  const AreaRateResult sr = area_rate(series);
  ThroughputScenario cf = series;
  cf.mean_pairs_source = MeanPairsSource::ClosedForm;
  CHECK(std::abs(sr.mean_pairs / area_rate(cf).mean_pairs - 1.0) < 0.05);
}

TEST_CASE("area rate with measured interference") {
  ThroughputScenario s;
  s.deployment.region_radius = 300.0;
  s.deployment.lambda_density = 0.00033297316;
  s.rate.noise_mode = NoiseMode::MeasuredInterference;
  s.measurement.replications = 2;
  s.measurement.warmup = 5.0;
  s.measurement.horizon = 15.0;
  const AreaRateResult res = area_rate(s);
  CHECK(res.p_n_mw >= thermal_noise_mw(s.radio.bandwidth_hz));
  CHECK(std::isfinite(res.link_rate));
  CHECK(res.link_rate > 0.0);
  CHECK(area_rate(s).p_n_mw == res.p_n_mw);
}

TEST_CASE("power optimiser on synthetic objectives") {
  SUBCASE("interior peak") {
    const auto o = optimize_power([](double p) { return -(p - 3.37) * (p - 3.37); }, -20.0, 20.0, 0.1);
    CHECK(std::abs(o.p_opt_dbm - 3.37) <= 0.01);
    CHECK_FALSE(o.flat);
  }
  SUBCASE("endpoints") {
    CHECK(optimize_power([](double p) { return p; }, -20.0, 20.0, 0.1).p_opt_dbm == doctest::Approx(20.0));
    CHECK(optimize_power([](double p) { return -p; }, -20.0, 20.0, 0.1).p_opt_dbm == doctest::Approx(-20.0));
    // Range that is not a multiple of the tolerance still reaches the upper end.
    CHECK(optimize_power([](double p) { return p; }, 0.0, 1.05, 0.1).p_opt_dbm == doctest::Approx(1.05));
  }
  SUBCASE("flat objective") {
    const auto o = optimize_power([](double) { return 7.0; }, -20.0, 20.0, 0.1);
    CHECK(o.flat);
    CHECK(o.p_opt_dbm == -20.0);
    CHECK(o.rate_opt == 7.0);
  }
  SUBCASE("plateau goes to the lower power") {
    const auto o = optimize_power([](double p) { return p < 2.0 ? p : (p > 5.0 ? 7.0 - p : 2.0); }, -20.0, 20.0, 0.1);
    CHECK(o.p_opt_dbm >= 2.0 - 1e-9);
    CHECK(o.p_opt_dbm <= 2.1);
  }
  SUBCASE("grid phase does not move the optimum") {
    auto f = [](double p) { return std::exp(-0.05 * (p - 1.234) * (p - 1.234)); };
    const double base = optimize_power(f, -20.0, 20.0, 0.1).p_opt_dbm;
    for (double shift : {0.013, 0.037, 0.071}) {
      CHECK(std::abs(optimize_power(f, -20.0 + shift, 20.0, 0.1).p_opt_dbm - base) <= 0.1);
    }
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS(optimize_power([](double p) { return p; }, 1.0, 0.0, 0.1));
    CHECK_THROWS(optimize_power([](double p) { return p; }, 0.0, 1.0, 0.0));
  }
}

TEST_CASE("power optimiser on the area-rate objective") {
  const ThroughputScenario s = dense_scenario();
  const PowerOptimum o = optimize_power(s, -20.0, 20.0, 0.1);
  CHECK(o.p_opt_dbm >= -20.0);
  CHECK(o.p_opt_dbm <= 20.0);
  for (double p = -20.0; p <= 20.0; p += 0.5) {
    ThroughputScenario t = s;
    t.radio.p_tx_dbm = p;
    CHECK(area_rate(t).area_rate <= o.rate_opt * (1.0 + 1e-12));
  }
}
