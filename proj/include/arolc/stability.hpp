#pragma once

// Delay-dependent stability analysis of the closed-loop tracking error.
//
// With e = [e1; ė1] the delayed error dynamics are
//   ė = A1 e + B1 e_h + B(σ − Δu_h),   A = A1 + B1,
// and a Razumikhin-type argument gives the admissible delay bound
//   h < λ_min(Q) / ‖E‖,
//   E = β P B1 (A1 P⁻¹ A1ᵀ + B1 P⁻¹ B1ᵀ + P⁻¹) B1ᵀ P + 2 (r/β) P,
// where P solves AᵀP + PA = −Q.

#include "arolc/linalg.hpp"

namespace arolc {

struct GainSet {
  Matrix K1;  // n×n, SPD
  Matrix K2;  // n×n, SPD
  Matrix Q;   // 2n×2n, SPD
  double r = 1.1;
  double beta = 1.0;

  [[nodiscard]] Eigen::Index dim() const { return K1.rows(); }
  /// Throws std::invalid_argument naming the violated invariant.
  void validate() const;
};

struct ErrorSystem {
  Matrix A1;
  Matrix B1;
  Matrix A;
  Matrix B;  // 2n×n, [0; I]
  Matrix P;
  Matrix E;
};

[[nodiscard]] ErrorSystem build_error_system(const GainSet& gains);

/// Largest admissible input delay in seconds: λ_min(Q)/‖E‖₂.
[[nodiscard]] double delay_margin(const GainSet& gains);

/// λ_min(Q) > h‖E‖₂.
[[nodiscard]] bool check_feasibility(const GainSet& gains, double h);

/// Uncertainty and adaptation quantities entering the ultimate bounds.
struct BoundParams {
  double c = 0.0;           // bound on ‖σ‖
  double Gamma = 0.0;       // integrated delay-disturbance bound
  double theta_norm = 0.0;  // ‖Δu(t) − Δu_h‖
  double alpha = 2.0;
  double epsilon = 0.1;
  double gamma = 1e-3;
  double c_hat = 1.0;
  double h = 0.0;  // s

  void validate() const;
};

/// The six switching/adaptation regimes of the closed loop.
enum class BoundCase : int {
  kGainGrowingOutsideLayer = 1,    // ĉ > γ, ‖s‖ ≥ ε, sᵀṡ > 0
  kGainShrinkingOutsideLayer = 2,  // ĉ > γ, ‖s‖ ≥ ε, sᵀṡ < 0
  kGainFloorOutsideLayer = 3,      // ĉ ≤ γ, ‖s‖ ≥ ε
  kGainGrowingInsideLayer = 4,     // ĉ > γ, ‖s‖ < ε, sᵀṡ > 0
  kGainShrinkingInsideLayer = 5,   // ĉ > γ, ‖s‖ < ε, sᵀṡ < 0
  kGainFloorInsideLayer = 6,       // ĉ ≤ γ, ‖s‖ < ε
};

[[nodiscard]] BoundCase bound_case_from_id(int case_id);

/// Ultimate bound ϖ_i on ‖e‖ given λ_min(Ψ) and ‖BᵀP‖ directly.
/// Throws LinalgError("delay too large for bound") when λ_min(Ψ) ≤ 0.
[[nodiscard]] double ultimate_bound(BoundCase which, double lambda_min_psi, double btp_norm,
                                    const BoundParams& bp);

/// Ultimate bound with Ψ = Q − hE assembled from the gains.
[[nodiscard]] double ultimate_bound(BoundCase which, const GainSet& gains, const BoundParams& bp);
[[nodiscard]] double ultimate_bound(int case_id, const GainSet& gains, const BoundParams& bp);

/// Upper bound on the time to reach the ball of radius `bound`, given a
/// guaranteed Lyapunov decrease rate c0 > 0.
[[nodiscard]] double reaching_time(double e0_norm, double bound, double c0);

}  // namespace arolc
