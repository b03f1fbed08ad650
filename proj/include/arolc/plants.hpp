#pragma once

// Euler-Lagrange plants M(q)q̈ + N(q, q̇, t) = τ_applied.
//
// Every plant carries a "true" model used for integration and a nominal
// model (M̂, N̂) available to model-based controllers. Unmodelled effects
// such as friction, payload changes and bounded disturbances live only in
// the true model.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "arolc/linalg.hpp"

namespace arolc {

class PlantModel {
 public:
  virtual ~PlantModel() = default;

  [[nodiscard]] virtual Eigen::Index dim() const = 0;
  [[nodiscard]] virtual Matrix mass_matrix(const Vector& q, double t) const = 0;
  /// Everything except M q̈: Coriolis, gravity, friction and disturbances.
  [[nodiscard]] virtual Vector bias_vector(const Vector& q, const Vector& q_dot, double t) const = 0;
  [[nodiscard]] virtual Matrix nominal_mass_matrix(const Vector& q) const = 0;
  [[nodiscard]] virtual Vector nominal_bias_vector(const Vector& q, const Vector& q_dot) const = 0;

  /// Auxiliary task-space coordinates integrated alongside (q, q̇), such as
  /// the planar position of a wheeled robot. Empty by default.
  [[nodiscard]] virtual Eigen::Index task_dim() const { return 0; }
  [[nodiscard]] virtual Vector task_rate(const Vector& q, const Vector& q_dot) const;
};

/// q̈ = M(q)⁻¹ (τ_applied − N(q, q̇, t)).
[[nodiscard]] Vector el_accel(const PlantModel& plant, const Vector& q, const Vector& q_dot,
                              const Vector& tau_applied, double t);

/// Plant assembled from callables. The nominal model defaults to the true
/// one when left empty.
class GenericPlant final : public PlantModel {
 public:
  using MassFn = std::function<Matrix(const Vector& q, double t)>;
  using BiasFn = std::function<Vector(const Vector& q, const Vector& q_dot, double t)>;

  GenericPlant(Eigen::Index dim, MassFn mass, BiasFn bias, MassFn nominal_mass = {},
               BiasFn nominal_bias = {});

  /// m·I q̈ + c q̇ + k q = τ; the nominal model scales the mass by `nominal_mass_scale`.
  static GenericPlant linear(Eigen::Index dim, double mass, double damping, double stiffness,
                             double nominal_mass_scale = 1.0);

  [[nodiscard]] Eigen::Index dim() const override { return dim_; }
  [[nodiscard]] Matrix mass_matrix(const Vector& q, double t) const override;
  [[nodiscard]] Vector bias_vector(const Vector& q, const Vector& q_dot, double t) const override;
  [[nodiscard]] Matrix nominal_mass_matrix(const Vector& q) const override;
  [[nodiscard]] Vector nominal_bias_vector(const Vector& q, const Vector& q_dot) const override;

 private:
  Eigen::Index dim_;
  MassFn mass_;
  BiasFn bias_;
  MassFn nominal_mass_;
  BiasFn nominal_bias_;
};

/// Viscous friction plus a bounded sinusoidal torque, added to the true N only.
struct Disturbance {
  double viscous = 0.0;    // N·m·s/rad per coordinate
  double amplitude = 0.0;  // N·m
  double frequency = 0.0;  // rad/s

  [[nodiscard]] Vector evaluate(const Vector& q_dot, double t) const;
};

// ---------------------------------------------------------------------------
// Two-link planar manipulator

struct TwoLinkParams {
  double m1 = 1.0, m2 = 1.0;    // kg
  double l1 = 1.0, l2 = 1.0;    // m
  double lc1 = 0.5, lc2 = 0.5;  // m, joint to link centre of mass
  double I1 = 1.0 / 12.0, I2 = 1.0 / 12.0;  // kg·m², about the link centre of mass
  double gravity = 9.81;                    // m/s²
  void validate() const;
};

struct TwoLinkTerms {
  Matrix M;  // 2×2
  Vector N;  // Coriolis/centrifugal + gravity
};

/// Closed-form two-revolute-link dynamics with q1 measured from the horizontal.
[[nodiscard]] TwoLinkTerms two_link_matrices(const Vector& q, const Vector& q_dot,
                                             const TwoLinkParams& link);

class TwoLinkPlant final : public PlantModel {
 public:
  /// The nominal model scales masses and inertias by `nominal_mass_scale`.
  TwoLinkPlant(TwoLinkParams link, Disturbance disturbance = {}, double nominal_mass_scale = 1.0);

  [[nodiscard]] Eigen::Index dim() const override { return 2; }
  [[nodiscard]] Matrix mass_matrix(const Vector& q, double t) const override;
  [[nodiscard]] Vector bias_vector(const Vector& q, const Vector& q_dot, double t) const override;
  [[nodiscard]] Matrix nominal_mass_matrix(const Vector& q) const override;
  [[nodiscard]] Vector nominal_bias_vector(const Vector& q, const Vector& q_dot) const override;

  [[nodiscard]] const TwoLinkParams& link() const { return link_; }
  [[nodiscard]] const TwoLinkParams& nominal_link() const { return nominal_; }

 private:
  TwoLinkParams link_;
  TwoLinkParams nominal_;
  Disturbance disturbance_;
};

// ---------------------------------------------------------------------------
// Differential-drive wheeled mobile robot

/// Generalized coordinates (x_c, y_c, φ, θ_r, θ_l).
struct WmrParams {
  double m = 9.0;        // kg
  double I_bar = 0.16;   // kg·m², platform inertia
  double K = 0.45;       // kg·m, mass-offset product m·d
  double d = 0.05;       // m, centre of mass ahead of the wheel axle
  double r_bar = 0.0975; // m, wheel radius
  double b = 0.165;      // m, half axle width
  double I_w = 0.25;     // kg·m², effective wheel inertia
  void validate() const;
};

struct WmrMatrices {
  Matrix M_bar;  // 5×5
  Vector V_bar;  // 5
  Matrix G;      // 5×2
};

[[nodiscard]] WmrMatrices wmr_matrices(const Vector& q, const Vector& q_dot, const WmrParams& p);

/// Null-space map S(φ) of the rolling constraints: q̇ = S(φ) [θ̇_r; θ̇_l].
[[nodiscard]] Matrix wmr_constraint_map(double phi, const WmrParams& p);
/// ∂S/∂φ.
[[nodiscard]] Matrix wmr_constraint_map_derivative(double phi, const WmrParams& p);

struct PayloadState {
  double mass = 0.0;                               // kg
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();  // m, body frame
};

/// Square-wave payload: `extra_mass` is on for `period_on`, then off for
/// `period_off`, repeating from t = 0. Each on-phase uses the next entry of
/// `offsets`, or a seeded pseudo-random placement when `random_offsets` is set.
struct PayloadSchedule {
  double extra_mass = 0.0;
  double period_on = 5.0;
  double period_off = 5.0;
  std::vector<Eigen::Vector2d> offsets;
  bool random_offsets = false;
  double max_offset = 0.1;  // m, half-width of the random placement square
  std::uint64_t seed = 0;

  void validate() const;
  [[nodiscard]] double period() const { return period_on + period_off; }
};

[[nodiscard]] PayloadState payload_mass(const PayloadSchedule& sched, double t);

/// Platform parameters with the payload rigidly attached at `offset`.
[[nodiscard]] WmrParams with_payload(const WmrParams& base, const PayloadState& payload);

/// Wheel-space (θ_r, θ_l) dynamics obtained by reducing the constrained
/// model through S(φ): mass SᵀM̄S, bias Sᵀ(V̄ + M̄Ṡζ̇). The heading is an
/// integrable function of the wheel angles; (x_c, y_c) are exposed as task
/// coordinates.
class WmrPlant final : public PlantModel {
 public:
  WmrPlant(WmrParams params, Disturbance disturbance = {},
           std::optional<PayloadSchedule> payload = std::nullopt, double heading0 = 0.0);

  [[nodiscard]] Eigen::Index dim() const override { return 2; }
  [[nodiscard]] Matrix mass_matrix(const Vector& q, double t) const override;
  [[nodiscard]] Vector bias_vector(const Vector& q, const Vector& q_dot, double t) const override;
  [[nodiscard]] Matrix nominal_mass_matrix(const Vector& q) const override;
  [[nodiscard]] Vector nominal_bias_vector(const Vector& q, const Vector& q_dot) const override;

  [[nodiscard]] Eigen::Index task_dim() const override { return 2; }
  [[nodiscard]] Vector task_rate(const Vector& q, const Vector& q_dot) const override;

  [[nodiscard]] double heading(const Vector& q) const;
  [[nodiscard]] const WmrParams& params() const { return params_; }
  [[nodiscard]] WmrParams params_at(double t) const;

 private:
  [[nodiscard]] Matrix reduced_mass(const Vector& q, const WmrParams& p) const;
  [[nodiscard]] Vector reduced_bias(const Vector& q, const Vector& q_dot, const WmrParams& p) const;

  WmrParams params_;
  Disturbance disturbance_;
  std::optional<PayloadSchedule> payload_;
  double heading0_;
};

[[nodiscard]] WmrPlant reduced_wmr_dynamics(const WmrParams& params);

}  // namespace arolc
