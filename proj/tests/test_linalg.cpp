#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "arolc/linalg.hpp"
#include "doctest.h"

using arolc::Matrix;
using arolc::Vector;
using doctest::Approx;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix M(2, 2);
  M << a, b, c, d;
  return M;
}

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> dist;
  Matrix M(n, n);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = dist(rng);
  return M;
}

Matrix random_spd(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix R = random_matrix(rng, n);
  return R.transpose() * R + 0.1 * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("solve_lyapunov examples") {
  CHECK(arolc::solve_lyapunov(mat2(-1, 0, 0, -1).topLeftCorner(1, 1), Matrix::Constant(1, 1, 2.0))(0, 0) ==
        Approx(1.0));
  CHECK(arolc::solve_lyapunov(Matrix(-Matrix::Identity(2, 2)), Matrix(2 * Matrix::Identity(2, 2)))
            .isApprox(Matrix::Identity(2, 2), 1e-12));
  // Hand solution of AᵀP + PA = −I for A = [[0,1],[-1,-1]].
  const Matrix P = arolc::solve_lyapunov(mat2(0, 1, -1, -1), Matrix::Identity(2, 2));
  CHECK((P - mat2(1.5, 0.5, 0.5, 1.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("solve_lyapunov rejects unstable A") {
  CHECK_THROWS_WITH_AS(arolc::solve_lyapunov(mat2(0, 1, 0, 0), Matrix::Identity(2, 2)), "unstable A",
                       arolc::LinalgError);
}

TEST_CASE("solve_lyapunov residual on random Hurwitz matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 1 + trial % 10;
    const Matrix S = random_matrix(rng, n);
    const Matrix A = -random_spd(rng, n) + 0.3 * (S - S.transpose());
    REQUIRE(arolc::is_hurwitz(A));
    const Matrix Q = random_spd(rng, n);
    const Matrix P = arolc::solve_lyapunov(A, Q);
    const double residual = (A.transpose() * P + P * A + Q).cwiseAbs().maxCoeff();
    CHECK(residual <= 1e-10 * Q.cwiseAbs().maxCoeff());
    CHECK(arolc::min_eig_symmetric(P) > 0.0);
  }
}

TEST_CASE("min_eig_symmetric examples") {
  CHECK(arolc::min_eig_symmetric(Matrix(Matrix::Identity(2, 2))) == Approx(1.0));
  CHECK(arolc::min_eig_symmetric(mat2(2, 0, 0, 5)) == Approx(2.0));
  CHECK(arolc::min_eig_symmetric(mat2(2, 1, 1, 2)) == Approx(1.0));
  CHECK_THROWS_AS(arolc::min_eig_symmetric(mat2(1, 2, 0, 1)), arolc::LinalgError);
}

TEST_CASE("symmetric_eigenvalues agrees with a reference eigensolver") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 8;
    const Matrix R = random_matrix(rng, n);
    const Matrix S = R + R.transpose();
    const Vector ours = arolc::symmetric_eigenvalues(S);
    const Vector ref = Eigen::SelfAdjointEigenSolver<Matrix>(S).eigenvalues();
    CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + S.norm()));
  }
}

TEST_CASE("min_eig_symmetric is positively homogeneous") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix R = random_matrix(rng, 4);
    const Matrix S = R + R.transpose();
    const double c = scale(rng);
    CHECK(arolc::min_eig_symmetric(Matrix(c * S)) == Approx(c * arolc::min_eig_symmetric(S)).epsilon(1e-12));
  }
}

TEST_CASE("spectral_norm examples and transpose invariance") {
  CHECK(arolc::spectral_norm(Matrix(Matrix::Zero(3, 3))) == 0.0);
  CHECK(arolc::spectral_norm(Matrix(Matrix::Identity(3, 3))) == Approx(1.0));
  CHECK(arolc::spectral_norm(mat2(4.2, 2.9, 2.9, 5.8)) == Approx((10.0 + std::sqrt(36.2)) / 2.0).epsilon(1e-12));
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix M = random_matrix(rng, 5);
    CHECK(arolc::spectral_norm(M) == Approx(arolc::spectral_norm(Matrix(M.transpose()))).epsilon(1e-12));
  }
}

TEST_CASE("invert examples and involution") {
  CHECK(arolc::invert(Matrix(Matrix::Identity(3, 3))).isApprox(Matrix::Identity(3, 3)));
  CHECK(arolc::invert(mat2(2, 0, 0, 4)).isApprox(mat2(0.5, 0, 0, 0.25)));
  CHECK((arolc::invert(mat2(1.5, 0.5, 0.5, 1.0)) - mat2(0.8, -0.4, -0.4, 1.2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(arolc::invert(mat2(1, 2, 2, 4)), arolc::LinalgError);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix M = random_spd(rng, 4);
    CHECK((arolc::invert(arolc::invert(M)) - M).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("is_hurwitz examples") {
  CHECK(arolc::is_hurwitz(Matrix(-Matrix::Identity(2, 2))));
  CHECK_FALSE(arolc::is_hurwitz(mat2(0, 1, 0, 0)));
  CHECK(arolc::is_hurwitz(mat2(0, 1, -1, -1)));
}

TEST_CASE("templated on the scalar type") {
  Eigen::Matrix2f A;
  A << 0.0f, 1.0f, -1.0f, -1.0f;
  const Eigen::MatrixXf P = arolc::solve_lyapunov(A, Eigen::Matrix2f::Identity());
  CHECK(P(0, 0) == Approx(1.5).epsilon(1e-5));
  CHECK(arolc::min_eig_symmetric(P) > 0.0f);
}
