#pragma once

#include <optional>
#include <variant>

#include "arolc/controllers.hpp"
#include "arolc/plants.hpp"

namespace arolc {

/// Circular CoM path x = R sin(Ωt) + x0, y = R cos(Ωt) + y0 traversed
/// clockwise at constant speed. The wheel-space reference is the unique
/// constant-rate motion whose CoM point traces the circle.
struct PaperCircle {
  double radius = 1.25;  // m
  double omega = 0.35;   // rad/s
  Eigen::Vector2d center{0.1, 1.35};
  WmrParams geometry;

  [[nodiscard]] double speed() const { return radius * omega; }
  /// Forward speed of the axle midpoint and yaw rate.
  [[nodiscard]] double forward_speed() const;
  [[nodiscard]] double yaw_rate() const { return -omega; }
  /// Heading at t = 0 that keeps the offset CoM on the circle.
  [[nodiscard]] double heading0() const;
  /// (θ̇_r, θ̇_l).
  [[nodiscard]] Eigen::Vector2d wheel_rates() const;
};

/// Wheel angles θ_r = 3t, θ_l = 2t tracked directly.
struct PaperLiteral {
  Eigen::Vector2d rates{3.0, 2.0};  // rad/s
};

/// q_i = offset_i + amplitude_i sin(ω_i t + phase_i).
struct Sinusoid {
  Vector amplitude;
  Vector omega;
  Vector offset;
  Vector phase;
};

struct HoldPosition {
  Vector q;
};

using TrajectorySpec = std::variant<PaperCircle, PaperLiteral, Sinusoid, HoldPosition>;

[[nodiscard]] Eigen::Index trajectory_dim(const TrajectorySpec& spec);

/// (qᵈ, q̇ᵈ, q̈ᵈ) with analytic derivatives.
[[nodiscard]] DesiredState desired_trajectory(const TrajectorySpec& spec, double t);

struct TaskReference {
  Vector position;
  Vector velocity;
};

/// Task-space (planar CoM) reference, for trajectories that define one.
[[nodiscard]] std::optional<TaskReference> task_reference(const TrajectorySpec& spec, double t);

/// Path diameter used to express tracking errors as percentages.
[[nodiscard]] std::optional<double> path_diameter(const TrajectorySpec& spec);

/// Initial heading for a WMR following this trajectory.
[[nodiscard]] double initial_heading(const TrajectorySpec& spec);

}  // namespace arolc
