#pragma once

// Fixed-step closed-loop simulation of M(q)q̈ + N(q, q̇, t) = τ(t − h(t)).
//
// The controller runs every dt_control and its command is stamped with the
// computation time into a DelayBuffer. RK4 integrates the plant at
// dt_integration, reading the actuator input τ(t − h(t)) back from the
// buffer at every stage.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "arolc/controllers.hpp"
#include "arolc/delay.hpp"
#include "arolc/plants.hpp"
#include "arolc/stability.hpp"
#include "arolc/trajectory.hpp"

namespace arolc {

struct ControlContext {
  double t;
  const Vector& q;
  const Vector& q_dot;
  const DesiredState& desired;
  const PlantModel& plant;
  double delay;  // true h(t); only delay-aware baselines read it
};

struct ControlOutput {
  Vector tau;
  double c_hat = 0.0;
  double s_norm = 0.0;
  Vector u;            // auxiliary input (AROLC), empty otherwise
  Vector u_switching;  // Δu (AROLC), empty otherwise
};

class Controller {
 public:
  virtual ~Controller() = default;
  /// Computes the command at ctx.t and advances the controller state.
  virtual ControlOutput step(const ControlContext& ctx) = 0;
  /// Command the controller would issue at ctx, leaving its state untouched.
  [[nodiscard]] virtual Vector preview(const ControlContext& ctx) const = 0;
};

class ZeroController final : public Controller {
 public:
  explicit ZeroController(Eigen::Index dim) : dim_(dim) {}
  ControlOutput step(const ControlContext& ctx) override;
  [[nodiscard]] Vector preview(const ControlContext& ctx) const override;

 private:
  Eigen::Index dim_;
};

class ArolcController final : public Controller {
 public:
  explicit ArolcController(ArolcConfig cfg);
  ControlOutput step(const ControlContext& ctx) override;
  [[nodiscard]] Vector preview(const ControlContext& ctx) const override;
  [[nodiscard]] const ArolcState& state() const { return state_; }
  [[nodiscard]] const ArolcConfig& config() const { return cfg_; }

 private:
  ArolcConfig cfg_;
  ArolcState state_;
};

class PconController final : public Controller {
 public:
  /// With `fixed_h` set the integral window is that constant (PCONf);
  /// otherwise it tracks the true delay h(t).
  PconController(PconConfig cfg, Eigen::Index dim, double history_window,
                 std::optional<double> fixed_h = std::nullopt);
  ControlOutput step(const ControlContext& ctx) override;
  [[nodiscard]] Vector preview(const ControlContext& ctx) const override;

 private:
  PconConfig cfg_;
  PconState state_;
  std::optional<double> fixed_h_;
};

/// One row per control period.
struct Trace {
  Eigen::Index dim = 0;
  std::vector<double> t;
  std::vector<Vector> q;
  std::vector<Vector> q_dot;
  std::vector<Vector> qd;
  std::vector<Vector> qd_dot;
  std::vector<Vector> qd_ddot;
  std::vector<Vector> e1;
  std::vector<Vector> tau_cmd;
  std::vector<Vector> tau_app;
  std::vector<double> c_hat;
  std::vector<double> s_norm;
  std::vector<double> h;
  std::vector<Vector> u;            // AROLC auxiliary input, empty otherwise
  std::vector<Vector> u_switching;  // AROLC Δu, empty otherwise
  std::vector<Vector> task;         // plant task coordinates, empty if none
  std::vector<Vector> task_desired; // task reference, empty if none
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t size() const { return t.size(); }
  [[nodiscard]] bool empty() const { return t.empty(); }
  [[nodiscard]] bool has_task() const { return !task.empty() && !task_desired.empty(); }
};

class SimulationDiverged : public std::runtime_error {
 public:
  SimulationDiverged(double time, Trace partial);
  [[nodiscard]] double time() const { return time_; }
  [[nodiscard]] const Trace& partial() const { return partial_; }

 private:
  double time_;
  Trace partial_;
};

/// How the actuator input between command stamps is reconstructed.
enum class InputHold {
  kAuto,       // linear when the controller runs every integration step, else zero-order
  kZeroOrder,  // value of the latest command issued at or before t − h(t)
  kLinear,     // linear interpolation between commands
};

struct SimulationSettings {
  DelayProfile delay;
  TrajectorySpec trajectory = HoldPosition{};
  double duration = 1.0;
  double dt_integration = 1e-4;
  double dt_control = 1e-2;
  std::optional<Vector> q0;      // defaults to qᵈ(0)
  std::optional<Vector> q_dot0;  // defaults to q̇ᵈ(0)
  InputHold input_hold = InputHold::kAuto;
  /// Test seam: may rewrite each command before it is stored.
  std::function<void(double t, Vector& tau)> command_hook;

  void validate() const;
};

/// Runs the closed loop. A null controller applies zero input.
/// Throws SimulationDiverged on a non-finite or runaway state.
[[nodiscard]] Trace run_closed_loop(const PlantModel& plant, Controller* controller,
                                    const SimulationSettings& settings);

// ---------------------------------------------------------------------------
// Declarative scenarios

struct LinearPlantSpec {
  Eigen::Index dim = 1;
  double mass = 1.0;
  double damping = 0.0;
  double stiffness = 0.0;
  double nominal_mass_scale = 1.0;
};

struct TwoLinkSpec {
  TwoLinkParams link;
  Disturbance disturbance;
  double nominal_mass_scale = 1.0;
};

struct WmrSpec {
  WmrParams params;
  Disturbance disturbance;
};

using PlantSpec = std::variant<LinearPlantSpec, TwoLinkSpec, WmrSpec>;

struct ControllerSpec {
  enum class Kind { kNone, kArolc, kPcon, kPconFixed };
  Kind kind = Kind::kNone;
  // AROLC
  double alpha = 2.0;
  double epsilon = 0.1;
  double gamma = 1e-3;
  std::optional<double> c_hat_init;  // defaults to gamma
  bool switching = true;
  // PCON / PCONf
  double kappa = 2.0;
  double k_b = 5.0;
  std::optional<Matrix> vartheta;  // defaults to I
  std::optional<double> h_estimate;  // PCONf window; defaults to h(0)
};

[[nodiscard]] std::string to_string(ControllerSpec::Kind kind);

struct Scenario {
  std::string name;
  PlantSpec plant;
  ControllerSpec controller;
  std::optional<GainSet> gains;
  DelayProfile delay;
  TrajectorySpec trajectory = HoldPosition{};
  std::optional<PayloadSchedule> payload;
  double duration = 10.0;
  double dt_integration = 1e-4;
  double dt_control = 1e-2;
  std::uint64_t seed = 0;
  std::optional<Vector> q0;
  std::optional<Vector> q_dot0;

  void validate() const;
};

[[nodiscard]] std::unique_ptr<PlantModel> make_plant(const Scenario& sc);
[[nodiscard]] std::unique_ptr<Controller> make_controller(const Scenario& sc, Eigen::Index dim);

/// Builds plant and controller from the scenario and runs the closed loop.
[[nodiscard]] Trace simulate(const Scenario& sc);

}  // namespace arolc
