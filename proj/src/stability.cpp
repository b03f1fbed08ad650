#include "arolc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace arolc {

namespace {

void require_spd(const Matrix& M, const char* name) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw std::invalid_argument(std::string(name) + " must be square and non-empty");
  }
  if (!M.allFinite()) throw std::invalid_argument(std::string(name) + " has non-finite entries");
  if (!is_symmetric(M)) throw std::invalid_argument(std::string(name) + " must be symmetric");
  if (min_eig_symmetric(M) <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be positive definite");
  }
}

}  // namespace

void GainSet::validate() const {
  require_spd(K1, "K1");
  require_spd(K2, "K2");
  require_spd(Q, "Q");
  if (K2.rows() != K1.rows()) throw std::invalid_argument("K1 and K2 dimensions differ");
  if (Q.rows() != 2 * K1.rows()) throw std::invalid_argument("Q must be 2n x 2n");
  if (!(r > 1.0)) throw std::invalid_argument("r must exceed 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
}

ErrorSystem build_error_system(const GainSet& gains) {
  gains.validate();
  const Eigen::Index n = gains.dim();
  ErrorSystem sys;
  sys.A1 = Matrix::Zero(2 * n, 2 * n);
  sys.A1.topRightCorner(n, n).setIdentity();
  sys.B1 = Matrix::Zero(2 * n, 2 * n);
  sys.B1.bottomLeftCorner(n, n) = -gains.K1;
  sys.B1.bottomRightCorner(n, n) = -gains.K2;
  sys.A = sys.A1 + sys.B1;
  sys.B = Matrix::Zero(2 * n, n);
  sys.B.bottomRows(n).setIdentity();

  // Companion form of ë + K2 ė + K1 e = 0; Hurwitz for SPD K1, K2.
  if (!is_hurwitz(sys.A)) throw LinalgError("build_error_system: A is not Hurwitz");
  sys.P = solve_lyapunov(sys.A, gains.Q);

  const Matrix P_inv = invert(sys.P);
  const Matrix inner = sys.A1 * P_inv * sys.A1.transpose() +
                       sys.B1 * P_inv * sys.B1.transpose() + P_inv;
  const Matrix PB1 = sys.P * sys.B1;
  sys.E = gains.beta * PB1 * inner * PB1.transpose() + 2.0 * (gains.r / gains.beta) * sys.P;
  sys.E = (sys.E + sys.E.transpose()) / 2.0;
  return sys;
}

double delay_margin(const GainSet& gains) {
  const ErrorSystem sys = build_error_system(gains);
  return min_eig_symmetric(gains.Q) / spectral_norm(sys.E);
}

bool check_feasibility(const GainSet& gains, double h) {
  if (h < 0.0) throw std::invalid_argument("check_feasibility: h must be nonnegative");
  const ErrorSystem sys = build_error_system(gains);
  return min_eig_symmetric(gains.Q) > h * spectral_norm(sys.E);
}

void BoundParams::validate() const {
  if (c < 0 || Gamma < 0 || theta_norm < 0 || h < 0) {
    throw std::invalid_argument("bound parameters must be nonnegative");
  }
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1 for the bounds to hold");
  if (!(epsilon > 0.0) || !(gamma > 0.0) || !(c_hat > 0.0)) {
    throw std::invalid_argument("epsilon, gamma and c_hat must be positive");
  }
}

BoundCase bound_case_from_id(int case_id) {
  if (case_id < 1 || case_id > 6) throw std::out_of_range("bound case must be in 1..6");
  return static_cast<BoundCase>(case_id);
}

double ultimate_bound(BoundCase which, double lambda_min_psi, double btp_norm,
                      const BoundParams& bp) {
  bp.validate();
  if (!(lambda_min_psi > 0.0)) throw LinalgError("delay too large for bound");
  const double lam = lambda_min_psi;
  const double theta = bp.theta_norm;
  const double a = bp.alpha;
  const double ch = bp.c_hat;

  // A negative μ means ẏ < 0 holds for every e; 0 is then a valid bound term.
  const auto radical_form = [lam](double mu, double numerator) {
    return mu + std::sqrt(numerator / lam + mu * mu);
  };

  switch (which) {
    case BoundCase::kGainGrowingOutsideLayer: {
      const double mu = theta * btp_norm / lam;
      return radical_form(mu, 2.0 * bp.Gamma);
    }
    case BoundCase::kGainShrinkingOutsideLayer: {
      const double mu = std::max(0.0, 2.0 * bp.c - (a + 1.0) * ch + theta) * btp_norm / lam;
      return radical_form(mu, 2.0 * bp.Gamma);
    }
    case BoundCase::kGainFloorOutsideLayer: {
      const double mu = std::max(0.0, bp.c - a * ch + theta) / lam;
      return radical_form(mu, 2.0 * (bp.Gamma + bp.gamma * bp.gamma));
    }
    case BoundCase::kGainGrowingInsideLayer: {
      const double num = 4.0 * a * bp.Gamma * ch + bp.epsilon * (ch + theta) * (ch + theta);
      return std::sqrt(num / (2.0 * a * ch * lam));
    }
    case BoundCase::kGainShrinkingInsideLayer: {
      const double inner = std::max(0.0, 2.0 * bp.c - ch + theta);
      const double num = 4.0 * a * bp.Gamma * ch + bp.epsilon * inner * inner;
      return std::sqrt(num / (2.0 * a * ch * lam));
    }
    case BoundCase::kGainFloorInsideLayer: {
      const double num = 4.0 * a * ch * (bp.Gamma + bp.gamma * bp.gamma) +
                         bp.epsilon * (bp.c + theta) * (bp.c + theta);
      return std::sqrt(num / (2.0 * a * ch * lam));
    }
  }
  throw std::out_of_range("unknown bound case");
}

double ultimate_bound(BoundCase which, const GainSet& gains, const BoundParams& bp) {
  const ErrorSystem sys = build_error_system(gains);
  const Matrix psi = gains.Q - bp.h * sys.E;
  const double lam = min_eig_symmetric(psi);
  const double btp = spectral_norm(Matrix(sys.B.transpose() * sys.P));
  return ultimate_bound(which, lam, btp, bp);
}

double ultimate_bound(int case_id, const GainSet& gains, const BoundParams& bp) {
  return ultimate_bound(bound_case_from_id(case_id), gains, bp);
}

double reaching_time(double e0_norm, double bound, double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("reaching_time: c0 must be positive");
  return std::max(0.0, (e0_norm - bound) / c0);
}

}  // namespace arolc
