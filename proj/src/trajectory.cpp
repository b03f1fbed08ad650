#include "arolc/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace arolc {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

double PaperCircle::forward_speed() const {
  // Body-frame CoM velocity is (v, d·ω); its magnitude is the path speed.
  const double lateral = geometry.d * yaw_rate();
  const double v2 = speed() * speed() - lateral * lateral;
  if (v2 <= 0.0) throw std::invalid_argument("paper circle: CoM offset too large for the path speed");
  return std::sqrt(v2);
}

double PaperCircle::heading0() const {
  // Path tangent at t = 0 points along +x; the heading leads it by the
  // angle of the lateral CoM velocity component.
  return -std::atan2(geometry.d * yaw_rate(), forward_speed());
}

Eigen::Vector2d PaperCircle::wheel_rates() const {
  const double v = forward_speed();
  const double w = yaw_rate();
  return {(v + geometry.b * w) / geometry.r_bar, (v - geometry.b * w) / geometry.r_bar};
}

Eigen::Index trajectory_dim(const TrajectorySpec& spec) {
  return std::visit(Overloaded{[](const PaperCircle&) -> Eigen::Index { return 2; },
                               [](const PaperLiteral&) -> Eigen::Index { return 2; },
                               [](const Sinusoid& s) -> Eigen::Index { return s.amplitude.size(); },
                               [](const HoldPosition& h) -> Eigen::Index { return h.q.size(); }},
                    spec);
}

DesiredState desired_trajectory(const TrajectorySpec& spec, double t) {
  return std::visit(
      Overloaded{
          [t](const PaperCircle& c) {
            const Vector rates = c.wheel_rates();
            return DesiredState{rates * t, rates, Vector::Zero(2)};
          },
          [t](const PaperLiteral& l) {
            const Vector rates = l.rates;
            return DesiredState{rates * t, rates, Vector::Zero(2)};
          },
          [t](const Sinusoid& s) {
            const Eigen::Index n = s.amplitude.size();
            DesiredState d{Vector(n), Vector(n), Vector(n)};
            for (Eigen::Index i = 0; i < n; ++i) {
              const double arg = s.omega(i) * t + s.phase(i);
              d.q(i) = s.offset(i) + s.amplitude(i) * std::sin(arg);
              d.q_dot(i) = s.amplitude(i) * s.omega(i) * std::cos(arg);
              d.q_ddot(i) = -s.amplitude(i) * s.omega(i) * s.omega(i) * std::sin(arg);
            }
            return d;
          },
          [](const HoldPosition& h) {
            const Eigen::Index n = h.q.size();
            return DesiredState{h.q, Vector::Zero(n), Vector::Zero(n)};
          }},
      spec);
}

std::optional<TaskReference> task_reference(const TrajectorySpec& spec, double t) {
  if (const auto* c = std::get_if<PaperCircle>(&spec)) {
    const double arg = c->omega * t;
    TaskReference ref{Vector(2), Vector(2)};
    ref.position << c->radius * std::sin(arg) + c->center.x(), c->radius * std::cos(arg) + c->center.y();
    ref.velocity << c->speed() * std::cos(arg), -c->speed() * std::sin(arg);
    return ref;
  }
  return std::nullopt;
}

std::optional<double> path_diameter(const TrajectorySpec& spec) {
  if (const auto* c = std::get_if<PaperCircle>(&spec)) return 2.0 * c->radius;
  return std::nullopt;
}

double initial_heading(const TrajectorySpec& spec) {
  if (const auto* c = std::get_if<PaperCircle>(&spec)) return c->heading0();
  return 0.0;
}

}  // namespace arolc
