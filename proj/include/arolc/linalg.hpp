#pragma once

// Small dense linear algebra used by the stability analysis and the plants.
// Everything is templated on the scalar type and accepts any Eigen dense
// expression; results are returned as plain dynamic-size matrices.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace arolc {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& M, const char* who) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw LinalgError(std::string(who) + ": matrix must be square and non-empty");
  }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& M, const char* who) {
  if (!M.allFinite()) {
    throw LinalgError(std::string(who) + ": matrix has non-finite entries");
  }
}

}  // namespace detail

/// ‖M − Mᵀ‖_max ≤ 1e-9·‖M‖_max.
template <typename Derived>
[[nodiscard]] bool is_symmetric(const Eigen::MatrixBase<Derived>& M,
                                typename Derived::Scalar rel_tol = typename Derived::Scalar(1e-9)) {
  if (M.rows() != M.cols()) return false;
  using Scalar = typename Derived::Scalar;
  const Scalar scale = M.cwiseAbs().maxCoeff();
  const Scalar asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  return asym <= rel_tol * scale;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// The input is symmetrized as (M + Mᵀ)/2 after the symmetry check.
template <typename Derived>
[[nodiscard]] VectorX<typename Derived::Scalar> symmetric_eigenvalues(
    const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(M, "symmetric_eigenvalues");
  detail::require_finite(M, "symmetric_eigenvalues");
  if (!is_symmetric(M)) {
    throw LinalgError("symmetric_eigenvalues: matrix is not symmetric");
  }
  MatrixX<Scalar> A = (M + M.transpose()) / Scalar(2);
  const Eigen::Index n = A.rows();

  constexpr int kMaxSweeps = 100;
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    Scalar off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    const Scalar diag = A.diagonal().squaredNorm();
    if (off <= eps * eps * diag || off == Scalar(0)) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = A(p, q);
        if (apq == Scalar(0)) continue;
        // Rotation angle that annihilates A(p,q); the smaller root of
        // t² + 2θt − 1 = 0 keeps the rotation stable.
        const Scalar theta = (A(q, q) - A(p, p)) / (Scalar(2) * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = A(k, p);
          const Scalar akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = A(p, k);
          const Scalar aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        A(p, q) = A(q, p) = Scalar(0);
      }
    }
  }
  VectorX<Scalar> eig = A.diagonal();
  std::sort(eig.data(), eig.data() + eig.size());
  return eig;
}

template <typename Derived>
[[nodiscard]] typename Derived::Scalar min_eig_symmetric(const Eigen::MatrixBase<Derived>& M) {
  return symmetric_eigenvalues(M).minCoeff();
}

/// Induced 2-norm (largest singular value).
template <typename Derived>
[[nodiscard]] typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  if (M.size() == 0) return Scalar(0);
  detail::require_finite(M, "spectral_norm");
  const MatrixX<Scalar> dense = M;
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(dense);
  return svd.singularValues()(0);
}

template <typename Derived>
[[nodiscard]] MatrixX<typename Derived::Scalar> invert(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(M, "invert");
  detail::require_finite(M, "invert");
  const MatrixX<Scalar> dense = M;
  Eigen::FullPivLU<MatrixX<Scalar>> lu(dense);
  // rcond() is a 1-norm reciprocal condition estimate.
  if (!lu.isInvertible() || lu.rcond() < Scalar(1e-12)) {
    throw LinalgError("invert: matrix is singular or ill-conditioned");
  }
  return lu.inverse();
}

/// True iff every eigenvalue of A has strictly negative real part.
template <typename Derived>
[[nodiscard]] bool is_hurwitz(const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  detail::require_square(A, "is_hurwitz");
  if (!A.allFinite()) return false;
  const MatrixX<Scalar> dense = A;
  Eigen::EigenSolver<MatrixX<Scalar>> solver(dense, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) return false;
  return (solver.eigenvalues().real().array() < Scalar(0)).all();
}

/// Solves AᵀP + PA = −Q through the vectorized system
/// (I ⊗ Aᵀ + Aᵀ ⊗ I) vec(P) = −vec(Q).
template <typename DerivedA, typename DerivedQ>
[[nodiscard]] MatrixX<typename DerivedA::Scalar> solve_lyapunov(
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedQ>& Q) {
  using Scalar = typename DerivedA::Scalar;
  detail::require_square(A, "solve_lyapunov");
  detail::require_square(Q, "solve_lyapunov");
  detail::require_finite(A, "solve_lyapunov");
  detail::require_finite(Q, "solve_lyapunov");
  if (A.rows() != Q.rows()) {
    throw LinalgError("solve_lyapunov: A and Q dimensions differ");
  }
  if (!is_hurwitz(A)) throw LinalgError("unstable A");

  const Eigen::Index n = A.rows();
  const MatrixX<Scalar> At = A.transpose();
  MatrixX<Scalar> kron = MatrixX<Scalar>::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // I ⊗ Aᵀ places Aᵀ on the block diagonal.
    kron.block(i * n, i * n, n, n) += At;
    // Aᵀ ⊗ I places Aᵀ(i,j)·I in block (i,j).
    for (Eigen::Index j = 0; j < n; ++j) {
      kron.block(i * n, j * n, n, n).diagonal().array() += At(i, j);
    }
  }
  const MatrixX<Scalar> Qd = Q;
  const VectorX<Scalar> rhs = -Eigen::Map<const VectorX<Scalar>>(Qd.data(), n * n);

  Eigen::FullPivLU<MatrixX<Scalar>> lu(kron);
  if (!lu.isInvertible()) throw LinalgError("solve_lyapunov: singular linear system");
  const VectorX<Scalar> vecP = lu.solve(rhs);
  MatrixX<Scalar> P = Eigen::Map<const MatrixX<Scalar>>(vecP.data(), n, n);
  P = (P + P.transpose()) / Scalar(2);
  return P;
}

}  // namespace arolc
