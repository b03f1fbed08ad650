#include <cmath>
#include <random>

#include "arolc/linalg.hpp"
#include "arolc/stability.hpp"
#include "doctest.h"

using arolc::GainSet;
using arolc::Matrix;
using doctest::Approx;

namespace {

GainSet unit_gains(Eigen::Index n, double k = 1.0) {
  GainSet g;
  g.K1 = k * Matrix::Identity(n, n);
  g.K2 = k * Matrix::Identity(n, n);
  g.Q = Matrix::Identity(2 * n, 2 * n);
  g.r = 1.1;
  g.beta = 1.0;
  return g;
}

Matrix mat2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

// Hand assembly of E for n = 1, K1 = K2 = Q = 1.
const Matrix kHandP = mat2(1.5, 0.5, 0.5, 1.0);
const Matrix kHandE = mat2(4.2, 2.9, 2.9, 5.8);
const double kHandMargin = 1.0 / ((10.0 + std::sqrt(36.2)) / 2.0);

arolc::BoundParams bound_params() {
  arolc::BoundParams bp;
  bp.c = 0.5;
  bp.Gamma = 0.2;
  bp.theta_norm = 0.1;
  bp.alpha = 2.0;
  bp.epsilon = 0.1;
  bp.gamma = 1e-3;
  bp.c_hat = 0.4;
  return bp;
}

}  // namespace

TEST_CASE("error system for unit gains matches the hand assembly") {
  const arolc::ErrorSystem sys = arolc::build_error_system(unit_gains(1));
  CHECK((sys.A - mat2(0, 1, -1, -1)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sys.P - kHandP).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix P_inv = arolc::invert(sys.P);
  const Matrix inner = sys.A1 * P_inv * sys.A1.transpose() + sys.B1 * P_inv * sys.B1.transpose() + P_inv;
  CHECK((inner - mat2(2.0, -0.4, -0.4, 2.4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sys.E - kHandE).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(arolc::is_symmetric(sys.E));
}

TEST_CASE("any SPD gains give a Hurwitz error matrix") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + trial % 3;
    GainSet g = unit_gains(n);
    Matrix R1(n, n), R2(n, n);
    for (Eigen::Index i = 0; i < R1.size(); ++i) {
      R1.data()[i] = dist(rng);
      R2.data()[i] = dist(rng);
    }
    g.K1 = R1.transpose() * R1 + 0.1 * Matrix::Identity(n, n);
    g.K2 = R2.transpose() * R2 + 0.1 * Matrix::Identity(n, n);
    const arolc::ErrorSystem sys = arolc::build_error_system(g);
    CHECK(arolc::is_hurwitz(sys.A));
    CHECK((sys.E - sys.E.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * sys.E.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("delay margin of the unit gains") {
  CHECK(arolc::delay_margin(unit_gains(1)) == Approx(kHandMargin).epsilon(1e-12));
  CHECK(arolc::delay_margin(unit_gains(2)) == Approx(0.125).epsilon(0.008));
}

TEST_CASE("delay margin does not depend on the number of joints") {
  for (double k : {0.5, 1.0, 2.0}) {
    const double m1 = arolc::delay_margin(unit_gains(1, k));
    for (Eigen::Index n : {2, 3}) CHECK(std::abs(arolc::delay_margin(unit_gains(n, k)) - m1) < 1e-8);
  }
}

TEST_CASE("delay margin is invariant to scaling Q") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  const double base = arolc::delay_margin(unit_gains(2));
  for (int trial = 0; trial < 20; ++trial) {
    GainSet g = unit_gains(2);
    g.Q *= scale(rng);
    CHECK(arolc::delay_margin(g) == Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("feasibility examples and equivalence with the margin") {
  const GainSet g = unit_gains(1);
  CHECK(arolc::check_feasibility(g, 0.0));
  CHECK(arolc::check_feasibility(g, 0.120));
  CHECK_FALSE(arolc::check_feasibility(g, 0.130));
  CHECK_THROWS_AS((void)arolc::check_feasibility(g, -0.01), std::invalid_argument);
  const double margin = arolc::delay_margin(g);
  for (int i = 0; i <= 200; ++i) {
    const double h = 0.25 * i / 200.0;
    if (std::abs(h - margin) < 1e-12) continue;
    CHECK(arolc::check_feasibility(g, h) == (h < margin));
  }
}

TEST_CASE("gain validation") {
  GainSet g = unit_gains(1);
  g.r = 1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = unit_gains(1);
  g.K1(0, 0) = -1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = unit_gains(1);
  g.Q = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("ultimate bound examples") {
  arolc::BoundParams bp = bound_params();
  bp.Gamma = 0.0;
  bp.theta_norm = 0.0;
  CHECK(arolc::ultimate_bound(arolc::BoundCase::kGainGrowingOutsideLayer, 1.0, 1.0, bp) == 0.0);
  bp.Gamma = 0.5;
  CHECK(arolc::ultimate_bound(arolc::BoundCase::kGainGrowingOutsideLayer, 1.0, 1.0, bp) == Approx(1.0));
  bp.Gamma = 0.0;
  bp.theta_norm = 0.3;
  double previous = 1e300;
  for (double eps : {1e-1, 1e-3, 1e-6, 1e-12}) {
    bp.epsilon = eps;
    const double w4 = arolc::ultimate_bound(arolc::BoundCase::kGainGrowingInsideLayer, 1.0, 1.0, bp);
    CHECK(w4 < previous);
    previous = w4;
  }
  CHECK(previous < 1e-5);
}

TEST_CASE("ultimate bounds are nonnegative and nonincreasing in the Psi eigenvalue") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    arolc::BoundParams bp = bound_params();
    bp.c = u(rng);
    bp.Gamma = u(rng);
    bp.theta_norm = u(rng);
    bp.c_hat = 1e-3 + u(rng);
    bp.alpha = 1.01 + u(rng);
    const double btp = 0.1 + u(rng);
    for (int k = 1; k <= 6; ++k) {
      const auto which = arolc::bound_case_from_id(k);
      double previous = 1e300;
      for (double lam : {0.05, 0.1, 0.5, 1.0, 2.0, 10.0}) {
        const double w = arolc::ultimate_bound(which, lam, btp, bp);
        CHECK(w >= 0.0);
        CHECK(w <= previous * (1.0 + 1e-12));
        previous = w;
      }
    }
  }
}

TEST_CASE("ultimate bound from gains") {
  arolc::BoundParams bp = bound_params();
  bp.h = 0.1;
  for (int k = 1; k <= 6; ++k) CHECK(arolc::ultimate_bound(k, unit_gains(1), bp) > 0.0);
  bp.h = 0.2;
  CHECK_THROWS_WITH_AS((void)arolc::ultimate_bound(1, unit_gains(1), bp), "delay too large for bound",
                       arolc::LinalgError);
  CHECK_THROWS_AS((void)arolc::ultimate_bound(7, unit_gains(1), bp), std::out_of_range);
  bp.h = 0.0;
  bp.alpha = 1.0;
  CHECK_THROWS_AS((void)arolc::ultimate_bound(1, unit_gains(1), bp), std::invalid_argument);
}

TEST_CASE("reaching time") {
  CHECK(arolc::reaching_time(2.0, 1.0, 0.5) == Approx(2.0));
  CHECK(arolc::reaching_time(0.5, 1.0, 0.5) == 0.0);
  CHECK(arolc::reaching_time(1.0, 1.0, 1.0) == 0.0);
}
