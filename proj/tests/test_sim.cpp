#include <cmath>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "arolc/simulator.hpp"
#include "doctest.h"

using arolc::Matrix;
using arolc::Vector;
using doctest::Approx;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

arolc::SimulationSettings free_settings(double duration, double dt, double dt_control) {
  arolc::SimulationSettings s;
  s.duration = duration;
  s.dt_integration = dt;
  s.dt_control = dt_control;
  s.trajectory = arolc::HoldPosition{vec({0})};
  return s;
}

arolc::Scenario two_link_scenario() {
  arolc::Scenario sc;
  sc.plant = arolc::TwoLinkSpec{arolc::TwoLinkParams{}, arolc::Disturbance{0.2, 0.1, 2.0}, 0.8};
  sc.controller.kind = arolc::ControllerSpec::Kind::kArolc;
  arolc::GainSet g;
  g.K1 = Matrix::Identity(2, 2);
  g.K2 = Matrix::Identity(2, 2);
  g.Q = Matrix::Identity(4, 4);
  sc.gains = g;
  sc.delay = arolc::DelayProfile::s1();
  arolc::Sinusoid traj;
  traj.amplitude = vec({0.5, 0.3});
  traj.omega = vec({0.5, 0.7});
  traj.offset = vec({0.2, 0.4});
  traj.phase = vec({0.0, 1.0});
  sc.trajectory = traj;
  sc.duration = 3.0;
  return sc;
}

}  // namespace

TEST_CASE("delay profiles") {
  CHECK(arolc::delay_at(arolc::DelayProfile::s1(), 0.0) == Approx(0.020));
  CHECK(arolc::delay_at(arolc::DelayProfile::s1(), std::numbers::pi / 2) == Approx(0.100));
  CHECK(arolc::delay_at(arolc::DelayProfile::s3(), 123.4) == Approx(0.060));
  CHECK(arolc::delay_at(arolc::DelayProfile::s4(), 7.0) == Approx(0.120));
  CHECK(arolc::max_delay(arolc::DelayProfile::s2()) == Approx(0.125));
  CHECK(arolc::min_delay(arolc::DelayProfile::s2()) == Approx(0.005));
  CHECK(arolc::delay_at(arolc::DelayProfile::none(), 3.0) == 0.0);
  for (double t = 0.0; t < 100.0; t += 0.173) {
    for (const auto& p : {arolc::DelayProfile::s1(), arolc::DelayProfile::s2()}) {
      const double h = arolc::delay_at(p, t);
      CHECK(h >= arolc::min_delay(p) - 1e-15);
      CHECK(h <= arolc::max_delay(p) + 1e-15);
    }
  }
  CHECK(arolc::DelayProfile::parse_kind("S2") == arolc::DelayProfile::Kind::kS2);
  CHECK_THROWS_AS(arolc::DelayProfile::parse_kind("s9"), std::invalid_argument);
  CHECK_THROWS_AS(arolc::DelayProfile::constant(-0.1).validate(), std::invalid_argument);
}

TEST_CASE("delay buffer sampling") {
  arolc::DelayBuffer buf(1, 1.0);
  buf.push(0.0, vec({0}));
  buf.push(0.1, vec({1}));
  CHECK(buf.sample(0.05)(0) == Approx(0.5));
  CHECK(buf.sample(-0.05)(0) == 0.0);
  CHECK(buf.sample(0.1)(0) == 1.0);
  CHECK(buf.sample(0.5)(0) == 1.0);
  CHECK(buf.sample_held(0.05)(0) == 0.0);
  CHECK(buf.sample_held(0.1)(0) == 1.0);
  CHECK(buf.sample_held(-0.01)(0) == 0.0);
  CHECK_THROWS_AS(buf.push(0.1, vec({2})), std::invalid_argument);
  CHECK(buf.integrate(0.0, 0.1)(0) == Approx(0.05));
}

TEST_CASE("delay buffer keeps only the configured window") {
  arolc::DelayBuffer buf(1, 0.1);
  for (int k = 0; k <= 1000; ++k) buf.push(0.01 * k, vec({double(k)}));
  CHECK(buf.size() <= 13);
  CHECK(buf.sample(9.95)(0) == Approx(995.0));
}

TEST_CASE("paper circle reference") {
  const arolc::TrajectorySpec circle = arolc::PaperCircle{};
  const auto ref = arolc::task_reference(circle, 0.0);
  REQUIRE(ref);
  CHECK(ref->position(0) == Approx(0.1));
  CHECK(ref->position(1) == Approx(2.6));
  CHECK(ref->velocity(0) == Approx(1.25 * 0.35));
  CHECK(std::abs(ref->velocity(1)) < 1e-15);
  CHECK(*arolc::path_diameter(circle) == Approx(2.5));
  const arolc::PaperCircle c;
  const Eigen::Vector2d w = c.wheel_rates();
  const double r = c.geometry.r_bar, b = c.geometry.b;
  CHECK(r * (w(0) - w(1)) / (2.0 * b) == Approx(c.yaw_rate()));
  // The CoM speed combines the axle speed with the offset rotating at the yaw rate.
  const double axle = r * (w(0) + w(1)) / 2.0;
  CHECK(std::hypot(axle, c.geometry.d * c.yaw_rate()) == Approx(c.speed()));
}

TEST_CASE("paper literal and sinusoid references") {
  const arolc::DesiredState lit = arolc::desired_trajectory(arolc::PaperLiteral{}, 2.0);
  CHECK(lit.q.isApprox(vec({6.0, 4.0})));
  CHECK(lit.q_dot.isApprox(vec({3.0, 2.0})));
  CHECK(lit.q_ddot.norm() == 0.0);
  CHECK_FALSE(arolc::task_reference(arolc::PaperLiteral{}, 1.0));
}

TEST_CASE("desired trajectory derivatives agree with central differences") {
  const arolc::TrajectorySpec spec = two_link_scenario().trajectory;
  const double h = 1e-5;
  for (double t = 0.1; t < 10.0; t += 0.77) {
    const arolc::DesiredState d = arolc::desired_trajectory(spec, t);
    const arolc::DesiredState plus = arolc::desired_trajectory(spec, t + h);
    const arolc::DesiredState minus = arolc::desired_trajectory(spec, t - h);
    CHECK(((plus.q - minus.q) / (2 * h) - d.q_dot).norm() < 1e-8);
    CHECK(((plus.q_dot - minus.q_dot) / (2 * h) - d.q_ddot).norm() < 1e-8);
  }
}

TEST_CASE("free motion is integrated exactly") {
  const auto plant = arolc::GenericPlant::linear(1, 1.0, 0.0, 0.0);
  arolc::SimulationSettings s = free_settings(2.0, 1e-3, 1e-2);
  s.q0 = vec({0.5});
  s.q_dot0 = vec({1.0});
  const arolc::Trace trace = arolc::run_closed_loop(plant, nullptr, s);
  CHECK(trace.size() == 200);
  for (std::size_t k = 0; k < trace.size(); ++k) CHECK(trace.q[k](0) == Approx(0.5 + trace.t[k]).epsilon(1e-13));
}

TEST_CASE("undamped oscillator: fourth-order convergence and energy drift") {
  const auto plant = arolc::GenericPlant::linear(1, 1.0, 0.0, 1.0);
  const auto final_error = [&](double dt) {
    arolc::SimulationSettings s = free_settings(10.0, dt, 0.1);
    s.q0 = vec({1.0});
    s.q_dot0 = vec({0.0});
    const arolc::Trace trace = arolc::run_closed_loop(plant, nullptr, s);
    return std::abs(trace.q.back()(0) - std::cos(trace.t.back()));
  };
  const double ratio1 = final_error(0.05) / final_error(0.025);
  const double ratio2 = final_error(0.025) / final_error(0.0125);
  CHECK(ratio1 > 8.0);
  CHECK(ratio1 < 32.0);
  CHECK(ratio2 > 8.0);
  CHECK(ratio2 < 32.0);

  arolc::SimulationSettings s = free_settings(10.0, 1e-4, 1e-2);
  s.q0 = vec({1.0});
  s.q_dot0 = vec({0.0});
  const arolc::Trace trace = arolc::run_closed_loop(plant, nullptr, s);
  double drift = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double energy = 0.5 * (trace.q[k].squaredNorm() + trace.q_dot[k].squaredNorm());
    drift = std::max(drift, std::abs(energy - 0.5));
  }
  CHECK(drift < 1e-8);
}

TEST_CASE("zero delay, exact model, no switching: the error follows the linear error system") {
  arolc::Scenario sc = two_link_scenario();
  sc.plant = arolc::TwoLinkSpec{};
  sc.delay = arolc::DelayProfile::none();
  sc.controller.switching = false;
  sc.duration = 5.0;
  sc.dt_integration = 1e-4;
  sc.dt_control = 1e-4;
  sc.q0 = vec({0.5, 0.1});
  sc.q_dot0 = vec({0.0, 0.3});
  const arolc::Trace trace = arolc::simulate(sc);

  Matrix A = Matrix::Zero(4, 4);
  A.topRightCorner(2, 2).setIdentity();
  A.bottomLeftCorner(2, 2) = -Matrix::Identity(2, 2);
  A.bottomRightCorner(2, 2) = -Matrix::Identity(2, 2);
  Vector e0(4);
  e0 << trace.e1.front(), trace.qd_dot.front() - trace.q_dot.front();
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.size(); k += 97) {
    const Vector expected = (A * trace.t[k]).exp() * e0;
    worst = std::max(worst, (trace.e1[k] - expected.head(2)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-6);
  Vector e_end(4);
  e_end << trace.e1.back(), trace.qd_dot.back() - trace.q_dot.back();
  CHECK(e_end.norm() < 0.15 * e0.norm());
}

TEST_CASE("identical scenarios give bit-identical traces") {
  arolc::Scenario sc;
  sc.plant = arolc::WmrSpec{arolc::WmrParams{}, arolc::Disturbance{0.1, 0.2, 1.0}};
  sc.controller.kind = arolc::ControllerSpec::Kind::kArolc;
  arolc::GainSet g;
  g.K1 = Matrix::Identity(2, 2);
  g.K2 = Matrix::Identity(2, 2);
  g.Q = Matrix::Identity(4, 4);
  sc.gains = g;
  sc.delay = arolc::DelayProfile::s2();
  sc.trajectory = arolc::PaperCircle{};
  arolc::PayloadSchedule payload;
  payload.extra_mass = 3.5;
  payload.period_on = payload.period_off = 0.5;
  payload.random_offsets = true;
  sc.payload = payload;
  sc.duration = 2.0;
  sc.dt_integration = 1e-3;
  sc.seed = 5;
  const arolc::Trace a = arolc::simulate(sc);
  const arolc::Trace b = arolc::simulate(sc);
  REQUIRE(a.size() == b.size());
  bool identical = true;
  for (std::size_t k = 0; k < a.size(); ++k) {
    identical = identical && a.q[k] == b.q[k] && a.tau_cmd[k] == b.tau_cmd[k] && a.task[k] == b.task[k] &&
                a.c_hat[k] == b.c_hat[k];
  }
  CHECK(identical);
  sc.seed = 6;
  const arolc::Trace c = arolc::simulate(sc);
  CHECK(c.task.back() != a.task.back());
}

TEST_CASE("applied input only depends on commands issued before t - h") {
  const arolc::TwoLinkPlant plant(arolc::TwoLinkParams{});
  arolc::SimulationSettings s;
  s.delay = arolc::DelayProfile::s1();
  s.trajectory = two_link_scenario().trajectory;
  s.duration = 2.0;
  s.dt_integration = 1e-3;
  s.dt_control = 1e-2;
  arolc::ArolcConfig cfg = arolc::ArolcConfig::from_gains(*two_link_scenario().gains, 2.0, 0.1, 1e-3, 1e-3, 1e-2);

  arolc::ArolcController base_ctrl(cfg);
  const arolc::Trace base = arolc::run_closed_loop(plant, &base_ctrl, s);

  const double t_star = 1.0;
  s.command_hook = [t_star](double t, Vector& tau) {
    if (std::abs(t - t_star) < 1e-9) tau.array() += 5.0;
  };
  arolc::ArolcController perturbed_ctrl(cfg);
  const arolc::Trace perturbed = arolc::run_closed_loop(plant, &perturbed_ctrl, s);

  const double h_min = arolc::min_delay(s.delay);
  bool unchanged = true;
  bool changed_later = false;
  for (std::size_t k = 0; k < base.size(); ++k) {
    const bool same = base.tau_app[k] == perturbed.tau_app[k] && base.q[k] == perturbed.q[k];
    if (base.t[k] < t_star + h_min) unchanged = unchanged && same;
    else changed_later = changed_later || !same;
  }
  CHECK(unchanged);
  CHECK(changed_later);
  CHECK(perturbed.tau_cmd[100](0) == Approx(base.tau_cmd[100](0) + 5.0));
}

TEST_CASE("trace has one row per control period") {
  const auto plant = arolc::GenericPlant::linear(2, 1.0, 0.5, 1.0);
  arolc::SimulationSettings s = free_settings(1.5, 1e-3, 2e-2);
  s.trajectory = arolc::HoldPosition{vec({0, 0})};
  const arolc::Trace trace = arolc::run_closed_loop(plant, nullptr, s);
  CHECK(trace.size() == 75);
  CHECK(trace.t[1] == Approx(0.02));
}

TEST_CASE("settings validation") {
  const auto plant = arolc::GenericPlant::linear(1, 1.0, 0.0, 0.0);
  arolc::SimulationSettings s = free_settings(0.0, 1e-3, 1e-2);
  CHECK_THROWS_WITH_AS((void)arolc::run_closed_loop(plant, nullptr, s), "duration > 0 required",
                       std::invalid_argument);
  s = free_settings(1.0, 3e-3, 1e-2);
  CHECK_THROWS_AS((void)arolc::run_closed_loop(plant, nullptr, s), std::invalid_argument);
}

TEST_CASE("divergence reports the time and keeps the partial trace") {
  const auto plant = arolc::GenericPlant::linear(1, 1.0, 0.0, -400.0);
  arolc::SimulationSettings s = free_settings(10.0, 1e-3, 1e-2);
  s.q0 = vec({1.0});
  try {
    (void)arolc::run_closed_loop(plant, nullptr, s);
    FAIL("expected divergence");
  } catch (const arolc::SimulationDiverged& e) {
    CHECK(e.time() > 0.5);
    CHECK(e.time() < 10.0);
    CHECK(e.partial().size() > 10);
  }
}

TEST_CASE("scenario warns when the delay exceeds the margin") {
  arolc::Scenario sc = two_link_scenario();
  sc.duration = 0.5;
  sc.delay = arolc::DelayProfile::s2();
  CHECK(arolc::simulate(sc).warnings.size() == 1);
  sc.delay = arolc::DelayProfile::s1();
  CHECK(arolc::simulate(sc).warnings.empty());
}
