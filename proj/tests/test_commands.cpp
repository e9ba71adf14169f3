#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "doctest.h"
#include "dirnet/commands.hpp"

using namespace dirnet;

namespace {

std::size_t col(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  REQUIRE(it != t.columns.end());
  return static_cast<std::size_t>(it - t.columns.begin());
}

double num(const Table& t, std::size_t row, const std::string& name) {
  const Cell& c = t.rows.at(row).at(col(t, name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? 1.0 : 0.0;
  throw std::runtime_error("not numeric: " + name);
}

std::string str(const Table& t, std::size_t row, const std::string& name) {
  return std::get<std::string>(t.rows.at(row).at(col(t, name)));
}

}  // namespace

TEST_CASE("output formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1e300) == "1e+300");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(std::stod(format_number(0.1 + 0.2)) == 0.1 + 0.2);

  Table t;
  t.columns = {"a", "b", "c", "d"};
  t.add_row({1.5, std::int64_t{2}, std::string("x,y"), true});
  t.add_row({std::nan(""), std::int64_t{-3}, std::string("plain"), false});
  CHECK_THROWS(t.add_row({1.0}));

  std::ostringstream csv;
  write_csv(csv, t);
  CHECK(csv.str() == "a,b,c,d\n1.5,2,\"x,y\",1\nnan,-3,plain,0\n");

  std::ostringstream js;
  write_json(js, t);
  const auto j = nlohmann::json::parse(js.str());
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["a"] == 1.5);
  CHECK(j[0]["c"] == "x,y");
  CHECK(j[0]["d"] == true);
  CHECK(j[1]["a"].is_null());
  CHECK(j[1]["b"] == -3);

  CHECK(output_format_from_string("json") == OutputFormat::Json);
  CHECK_THROWS(output_format_from_string("xml"));
}

TEST_CASE("parallel_for") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 13 || i == 40) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "13");
  }
}

TEST_CASE("analyze") {
  SUBCASE("single point, no sweep") {
    const Table t = cmd_analyze(load_preset("desk-fig4"));
    REQUIRE(t.rows.size() == 1);
    CHECK(str(t, 0, "sweep").empty());
    CHECK(num(t, 0, "theta_deg") == 52.0);
    CHECK(num(t, 0, "en_series_exponential") == doctest::Approx(50.0).epsilon(1e-6));
    CHECK(num(t, 0, "p_accept") == doctest::Approx(num(t, 0, "en_series_exponential") / num(t, 0, "lambda_total")).epsilon(1e-9));
    CHECK(num(t, 0, "tail_bound") <= 1e-12);
    CHECK(num(t, 0, "en_per_m2") == doctest::Approx(50.0 / (std::numbers::pi * 9e4)).epsilon(1e-6));
    CHECK(num(t, 0, "en_series_logistic") >= num(t, 0, "en_series_exponential"));
    CHECK(std::abs(num(t, 0, "en_closed_form") / 50.0 - 1.0) < 0.05);
  }
  SUBCASE("vanishing footprint") {
    const Table t = cmd_analyze(load_preset("desk-mminf"));
    for (const char* c : {"en_series_piecewise_linear", "en_series_logistic", "en_series_exponential", "en_closed_form"})
      CHECK(num(t, 0, c) == doctest::Approx(50.0).epsilon(1e-6));
    CHECK(num(t, 0, "p_accept") == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("sweep rows in order and independent of jobs") {
    const Scenario sc = load_preset("paper-fig4");
    const Table a = cmd_analyze(sc, {1});
    const Table b = cmd_analyze(sc, {4});
    REQUIRE(a.rows.size() == 24);
    CHECK(a.rows == b.rows);
    CHECK(str(a, 0, "sweep") == "theta_deg=13;lambda_per_m2=0.01");
    // Per-area population grows with the arrival density at fixed beamwidth.
    for (std::size_t r = 1; r < 8; ++r) CHECK(num(a, 16 + r, "en_per_m2") > num(a, 16 + r - 1, "en_per_m2"));
  }
}

TEST_CASE("simulate") {
  Scenario sc = load_preset("desk-fig4");
  sc.replications = 3;
  sc.horizon_s = 30.0;
  const Table t = cmd_simulate(sc, {2});
  REQUIRE(t.rows.size() == 1);
  CHECK(str(t, 0, "check_mode") == "two-way");
  CHECK(num(t, 0, "seed") == 1.0);
  CHECK(num(t, 0, "mean_pairs") > 40.0);
  CHECK(num(t, 0, "mean_pairs") < 65.0);
  CHECK(num(t, 0, "low_confidence") == 0.0);
  CHECK(cmd_simulate(sc, {1}).rows == t.rows);

  SUBCASE("low confidence flags") {
    Scenario one = sc;
    one.replications = 1;
    CHECK(num(cmd_simulate(one), 0, "low_confidence") == 1.0);
    Scenario short_window = sc;
    short_window.warmup_s = 1.0;
    short_window.horizon_s = 5.0;
    CHECK(num(cmd_simulate(short_window), 0, "low_confidence") == 1.0);
    Scenario empty = sc;
    empty.deployment.lambda_density = 0.0;
    const Table e = cmd_simulate(empty);
    CHECK(num(e, 0, "low_confidence") == 1.0);
    CHECK(std::isnan(num(e, 0, "p_accept")));
  }
}

TEST_CASE("sweep-power") {
  Scenario sc = load_preset("desk-fig5");
  sc.power_step_db = 5.0;
  const Table t = cmd_sweep_power(sc, {2});
  // Nine sweep rows plus one optimum per density.
  REQUIRE(t.rows.size() == 20);
  CHECK(str(t, 0, "row_type") == "sweep");
  CHECK(str(t, 9, "row_type") == "optimum");
  CHECK(str(t, 19, "row_type") == "optimum");
  for (std::size_t r = 0; r < 10; ++r) CHECK(num(t, r, "lambda_per_m2") == 0.001);
  for (std::size_t opt : {9u, 19u}) {
    const double best = num(t, opt, "area_rate_bps_per_m2");
    for (std::size_t r = opt - 9; r < opt; ++r) CHECK(num(t, r, "area_rate_bps_per_m2") <= best * (1.0 + 1e-12));
  }
  // Link rate at the capped SNR is the same at every power once the cap binds.
  const double cap = 2.16e9 * std::log2(101.0);
  CHECK(num(t, 8, "link_rate_bps") == doctest::Approx(cap));
  CHECK(cmd_sweep_power(sc, {1}).rows == t.rows);
}
