#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "arolc/metrics.hpp"
#include "doctest.h"

using arolc::Vector;
using doctest::Approx;

namespace {

arolc::Trace error_trace(const std::vector<double>& errors) {
  arolc::Trace trace;
  trace.dim = 1;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    trace.t.push_back(0.01 * static_cast<double>(k));
    trace.e1.push_back(Vector::Constant(1, errors[k]));
  }
  return trace;
}

}  // namespace

TEST_CASE("absolute average error examples") {
  CHECK(arolc::absolute_average_error(error_trace({5, 5, 5, 5}), 0) == Approx(5.0));
  CHECK(arolc::absolute_average_error(error_trace({1, -1, 1, -1}), 0) == Approx(1.0));
  std::vector<double> sine;
  const int n = 200000;
  for (int k = 0; k < n; ++k) sine.push_back(std::sin(2.0 * std::numbers::pi * k / n));
  CHECK(arolc::absolute_average_error(error_trace(sine), 0) == Approx(2.0 / std::numbers::pi).epsilon(1e-6));
  CHECK_THROWS_AS((void)arolc::absolute_average_error(arolc::Trace{}, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)arolc::absolute_average_error(error_trace({1}), 1), std::out_of_range);
}

TEST_CASE("percent error examples") {
  CHECK(arolc::percent_error(23.33, 2500.0) == Approx(0.93).epsilon(0.005));
  CHECK(arolc::percent_error(0.0, 2500.0) == 0.0);
  CHECK(arolc::percent_error(58.30, 2500.0) == Approx(2.33).epsilon(0.005));
  CHECK_THROWS_AS((void)arolc::percent_error(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("total variation examples") {
  const std::vector<double> flat{2, 2, 2};
  CHECK(arolc::total_variation(flat, flat) == 0.0);
  CHECK(arolc::total_variation(std::vector<double>{0, 1, 1}, std::vector<double>{0, 0, 2}) == 3.0);
  CHECK(arolc::total_variation(std::vector<double>{0, 1, 0, 1}, std::vector<double>{0, 0, 0, 0}) == 3.0);
  CHECK_THROWS_AS((void)arolc::total_variation(std::vector<double>{0, 1}, std::vector<double>{0}),
                  std::invalid_argument);
}

TEST_CASE("total variation properties") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(50), b(50);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    const double tv = arolc::total_variation(a, b);
    CHECK(tv >= 0.0);

    const double shift = 10.0 * normal(rng);
    std::vector<double> shifted = a;
    for (auto& x : shifted) x += shift;
    CHECK(arolc::total_variation(shifted, b) == Approx(tv).epsilon(1e-12));

    const std::size_t cut = 1 + static_cast<std::size_t>(trial) % 48;
    const std::vector<double> a1(a.begin(), a.begin() + cut + 1), a2(a.begin() + cut, a.end());
    const std::vector<double> b1(b.begin(), b.begin() + cut + 1), b2(b.begin() + cut, b.end());
    CHECK(tv <= arolc::total_variation(a1, b1) + arolc::total_variation(a2, b2) + 1e-12);
  }
}

TEST_CASE("trace total variation sums every channel") {
  arolc::Trace trace = error_trace({0, 0, 0});
  trace.tau_cmd = {Vector::Zero(2), (Vector(2) << 1, 0).finished(), (Vector(2) << 1, 2).finished()};
  CHECK(arolc::total_variation(trace) == 3.0);
}

TEST_CASE("sup of the error over the tail") {
  CHECK(arolc::sup_error_tail(error_trace({9, 1, 2, -3}), 0.5) == Approx(3.0));
  CHECK(arolc::sup_error_tail(error_trace({9, 1, 2, -3}), 1.0) == Approx(9.0));
}

TEST_CASE("metrics JSON round trip") {
  arolc::MetricsReport r;
  r.ae_per_dim = {23.33, 0.1 + 0.2};
  r.pct_ae_per_dim = {0.9332, 1.0 / 3.0};
  r.ae_units = "mm";
  r.tv = 1234.5678901234567;
  r.sup_error_tail = 1e-17;
  r.runtime = 0.25;
  r.scenario_hash = "00ff00ff00ff00ff";
  CHECK(arolc::metrics_from_json(arolc::metrics_to_json(r)) == r);
}

TEST_CASE("metrics on a task-space trace") {
  arolc::Trace trace = error_trace({0.0, 0.0});
  trace.tau_cmd = {Vector::Zero(1), Vector::Zero(1)};
  trace.task = {(Vector(2) << 0.0, 0.0).finished(), (Vector(2) << 0.0, 0.0).finished()};
  trace.task_desired = {(Vector(2) << 0.01, -0.02).finished(), (Vector(2) << 0.03, 0.0).finished()};
  const arolc::MetricsReport r = arolc::compute_metrics(trace, arolc::PaperCircle{}, 0.0, "h");
  CHECK(r.ae_units == "mm");
  CHECK(r.ae_per_dim[0] == Approx(20.0));
  CHECK(r.ae_per_dim[1] == Approx(10.0));
  CHECK(r.pct_ae_per_dim[0] == Approx(0.8));
}

TEST_CASE("trace CSV layout") {
  arolc::Trace trace = error_trace({0.5, 0.25});
  trace.q = trace.qd = trace.tau_cmd = trace.tau_app = trace.e1;
  trace.c_hat = {1e-3, 2e-3};
  trace.s_norm = {0.0, 0.1};
  trace.h = {0.02, 0.03};
  std::ostringstream os;
  arolc::write_trace_csv(os, trace);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,q_0,qd_0,e1_0,tau_cmd_0,tau_app_0,c_hat,s_norm,h");
  std::getline(is, line);
  CHECK(line == "0,0.5,0.5,0.5,0.5,0.5,0.001,0,0.02");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2);
}
