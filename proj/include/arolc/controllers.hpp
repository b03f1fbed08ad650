#pragma once

// Discrete-time tracking controllers for input-delayed Euler-Lagrange plants.
//
// AROLC: τ = M̂u + N̂, u = û + Δu with
//   û  = q̈ᵈ + K2 ė1 + K1 e1,
//   Δu = α ĉ s/‖s‖ (‖s‖ ≥ ε) or α ĉ s/ε (‖s‖ < ε),   s = BᵀPe,
// and ĉ adapted online from the sign of sᵀṡ.
//
// PCON: τ = k_b ϱ with the filtered error ϱ = ė1 + κ e1 − ϑ e_z and
// e_z = ∫_{t−h}^{t} τ(θ) dθ over the commands still in flight.

#include <optional>

#include "arolc/delay.hpp"
#include "arolc/linalg.hpp"
#include "arolc/plants.hpp"
#include "arolc/stability.hpp"

namespace arolc {

struct DesiredState {
  Vector q;
  Vector q_dot;
  Vector q_ddot;
};

struct ArolcConfig {
  Matrix K1;
  Matrix K2;
  Matrix P;  // 2n×2n Lyapunov solution for A = A1 + B1
  Matrix B;  // 2n×n, [0; I]
  double alpha = 2.0;
  double epsilon = 0.1;
  double gamma = 1e-3;
  double c_hat_init = 1e-3;
  double dt_control = 0.01;  // s
  /// When false Δu is forced to zero (pure outer-loop feedback linearization).
  bool switching_enabled = true;

  /// Fills K1, K2, P, B from the gains.
  static ArolcConfig from_gains(const GainSet& gains, double alpha, double epsilon, double gamma,
                                double c_hat_init, double dt_control);
  [[nodiscard]] Eigen::Index dim() const { return K1.rows(); }
  void validate() const;
};

struct ArolcState {
  double c_hat = 1e-3;
  std::optional<Vector> s_prev;
  double t_prev = 0.0;

  static ArolcState initial(const ArolcConfig& cfg) { return {cfg.c_hat_init, std::nullopt, 0.0}; }
};

/// s = BᵀPe.
[[nodiscard]] Vector sliding_variable(const Vector& e, const ArolcConfig& cfg);
/// û = q̈ᵈ + K2 ė1 + K1 e1.
[[nodiscard]] Vector nominal_control(const Vector& e1, const Vector& e1_dot, const Vector& qdd_desired,
                                     const ArolcConfig& cfg);
/// Boundary-layer switching term Δu.
[[nodiscard]] Vector switching_control(const Vector& s, double c_hat, const ArolcConfig& cfg);

/// dĉ/dt selected by the adaptation law; ṡ is the backward difference
/// against the stored s_prev (the decreasing branch when there is none).
[[nodiscard]] double gain_rate(const ArolcState& state, const Vector& s, double t,
                               const ArolcConfig& cfg);
/// One explicit-Euler step of ĉ over dt_control, clamped at γ; stores (s, t).
[[nodiscard]] ArolcState adapt_gain(const ArolcState& state, const Vector& s, double t,
                                    const ArolcConfig& cfg);

struct ArolcStep {
  Vector tau;
  ArolcState state;  // state for the next control instant
  Vector s;
  Vector u_nominal;   // û
  Vector u_switching; // Δu
  Vector u;           // û + Δu
};

/// Evaluates the control law at time t with the current ĉ and returns the
/// adapted state for the next instant.
[[nodiscard]] ArolcStep arolc_step(const ArolcState& state, const Vector& q, const Vector& q_dot,
                                   const DesiredState& desired, const Matrix& mass_hat,
                                   const Vector& bias_hat, double t, const ArolcConfig& cfg);

struct PconConfig {
  double kappa = 2.0;
  Matrix vartheta;  // n×n SPD
  double k_b = 5.0;
  void validate() const;
};

struct PconState {
  DelayBuffer history;  // issued commands
  double h_estimate = 0.0;
};

/// e_z = ∫_{t−h}^{t} τ(θ) dθ by the trapezoidal rule over the history.
[[nodiscard]] Vector pcon_integral_error(const PconState& state, double t);

struct PconStep {
  Vector tau;
  Vector filtered_error;  // ϱ
  Vector e_z;
};

/// τ = k_b(ė1 + κe1 − ϑe_z) without touching the history.
[[nodiscard]] PconStep pcon_command(const PconState& state, const Vector& q, const Vector& q_dot,
                                    const DesiredState& desired, double t, const PconConfig& cfg);
/// pcon_command followed by appending τ to the history at time t.
PconStep pcon_step(PconState& state, const Vector& q, const Vector& q_dot,
                   const DesiredState& desired, double t, const PconConfig& cfg);

/// Lumped uncertainty σ of the delayed error dynamics
///   ë1 = −K2 ė1_h − K1 e1_h + σ − Δu_h.
/// Diagnostic only; controllers never use it.
struct ModelTerms {
  Matrix M;
  Vector N;
};
[[nodiscard]] Vector uncertainty_residual(const ModelTerms& true_now, const ModelTerms& nominal_h,
                                          const Vector& u_h, const Vector& qdd_desired,
                                          const Vector& qdd_desired_h);
/// Same, evaluating M(q), N(q, q̇, t) from the plant's true model and
/// M̂(q_h), N̂(q_h, q̇_h) from its nominal model.
[[nodiscard]] Vector uncertainty_residual(const PlantModel& plant, const Vector& q,
                                          const Vector& q_dot, const Vector& q_h,
                                          const Vector& q_dot_h, const Vector& u_h,
                                          const Vector& qdd_desired, const Vector& qdd_desired_h,
                                          double t);

}  // namespace arolc
