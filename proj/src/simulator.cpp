#include "arolc/simulator.hpp"

#include <cmath>
#include <sstream>

namespace arolc {

// --- controllers ------------------------------------------------------------

ControlOutput ZeroController::step(const ControlContext& ctx) {
  ControlOutput out;
  out.tau = preview(ctx);
  return out;
}

Vector ZeroController::preview(const ControlContext& /*ctx*/) const { return Vector::Zero(dim_); }

ArolcController::ArolcController(ArolcConfig cfg)
    : cfg_(std::move(cfg)), state_(ArolcState::initial(cfg_)) {
  cfg_.validate();
}

ControlOutput ArolcController::step(const ControlContext& ctx) {
  const double c_hat_now = state_.c_hat;
  ArolcStep out = arolc_step(state_, ctx.q, ctx.q_dot, ctx.desired,
                             ctx.plant.nominal_mass_matrix(ctx.q),
                             ctx.plant.nominal_bias_vector(ctx.q, ctx.q_dot), ctx.t, cfg_);
  state_ = std::move(out.state);
  return {std::move(out.tau), c_hat_now, out.s.norm(), std::move(out.u), std::move(out.u_switching)};
}

Vector ArolcController::preview(const ControlContext& ctx) const {
  // The adaptation result is discarded, so the first-step branch rule for a
  // missing s_prev does not matter here.
  ArolcState probe{state_.c_hat, std::nullopt, 0.0};
  return arolc_step(probe, ctx.q, ctx.q_dot, ctx.desired, ctx.plant.nominal_mass_matrix(ctx.q),
                    ctx.plant.nominal_bias_vector(ctx.q, ctx.q_dot), ctx.t, cfg_)
      .tau;
}

PconController::PconController(PconConfig cfg, Eigen::Index dim, double history_window,
                               std::optional<double> fixed_h)
    : cfg_(std::move(cfg)), state_{DelayBuffer(dim, history_window), 0.0}, fixed_h_(fixed_h) {
  cfg_.validate();
  if (cfg_.vartheta.rows() != dim) throw std::invalid_argument("PCON: vartheta must be n x n");
}

ControlOutput PconController::step(const ControlContext& ctx) {
  state_.h_estimate = fixed_h_.value_or(ctx.delay);
  PconStep out = pcon_step(state_, ctx.q, ctx.q_dot, ctx.desired, ctx.t, cfg_);
  return {std::move(out.tau), 0.0, 0.0, {}, {}};
}

Vector PconController::preview(const ControlContext& ctx) const {
  PconState probe{state_.history, fixed_h_.value_or(ctx.delay)};
  return pcon_command(probe, ctx.q, ctx.q_dot, ctx.desired, ctx.t, cfg_).tau;
}

// --- closed loop ------------------------------------------------------------

SimulationDiverged::SimulationDiverged(double time, Trace partial)
    : std::runtime_error([time] {
        std::ostringstream os;
        os << "simulation diverged at t = " << time << " s";
        return os.str();
      }()),
      time_(time),
      partial_(std::move(partial)) {}

void SimulationSettings::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("duration > 0 required");
  if (!(dt_integration > 0.0) || !(dt_control > 0.0)) {
    throw std::invalid_argument("time steps must be positive");
  }
  if (dt_integration > dt_control * (1.0 + 1e-9)) {
    throw std::invalid_argument("dt_integration must not exceed dt_control");
  }
  const double ratio = dt_control / dt_integration;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
    throw std::invalid_argument("dt_control must be an integer multiple of dt_integration");
  }
  delay.validate();
}

namespace {

constexpr double kRunawayNorm = 1e9;

struct PlantState {
  Vector q;
  Vector q_dot;
  Vector task;
};

struct PlantRate {
  Vector q_dot;
  Vector q_ddot;
  Vector task_dot;
};

PlantState advance(const PlantState& x, const PlantRate& k, double h) {
  return {x.q + h * k.q_dot, x.q_dot + h * k.q_ddot, x.task + h * k.task_dot};
}

bool healthy(const PlantState& x) {
  return x.q.allFinite() && x.q_dot.allFinite() && x.task.allFinite() &&
         x.q.norm() < kRunawayNorm && x.q_dot.norm() < kRunawayNorm;
}

}  // namespace

Trace run_closed_loop(const PlantModel& plant, Controller* controller,
                      const SimulationSettings& settings) {
  settings.validate();
  const Eigen::Index n = plant.dim();
  if (trajectory_dim(settings.trajectory) != n) {
    throw std::invalid_argument("trajectory dimension does not match the plant");
  }
  ZeroController zero(n);
  Controller& ctrl = controller ? *controller : zero;

  const double dt = settings.dt_integration;
  const auto ratio = static_cast<long>(std::llround(settings.dt_control / dt));
  const auto steps = static_cast<long>(std::llround(settings.duration / dt));
  const bool linear_hold =
      settings.input_hold == InputHold::kLinear ||
      (settings.input_hold == InputHold::kAuto && ratio == 1);

  const DesiredState start = desired_trajectory(settings.trajectory, 0.0);
  PlantState x;
  x.q = settings.q0.value_or(start.q);
  x.q_dot = settings.q_dot0.value_or(start.q_dot);
  if (x.q.size() != n || x.q_dot.size() != n) throw std::invalid_argument("initial state dimension");
  const auto task0 = task_reference(settings.trajectory, 0.0);
  x.task = plant.task_dim() == 0 ? Vector::Zero(0)
           : task0             ? task0->position
                               : Vector::Zero(plant.task_dim());

  DelayBuffer commands(n, max_delay(settings.delay) + 2.0 * settings.dt_control);

  const auto applied_input = [&](double t, const PlantState& at) -> Vector {
    const double t_query = t - delay_at(settings.delay, t);
    if (!linear_hold) return commands.sample_held(t_query);
    if (t_query <= commands.latest_time()) return commands.sample(t_query);
    // The delay is shorter than one integration step: the command for this
    // instant has not been stamped yet, so evaluate the law directly.
    const DesiredState d = desired_trajectory(settings.trajectory, t);
    return ctrl.preview({t, at.q, at.q_dot, d, plant, delay_at(settings.delay, t)});
  };

  const auto rate = [&](double t, const PlantState& at) -> PlantRate {
    const Vector tau = applied_input(t, at);
    return {at.q_dot, el_accel(plant, at.q, at.q_dot, tau, t),
            plant.task_dim() == 0 ? Vector::Zero(0) : plant.task_rate(at.q, at.q_dot)};
  };

  Trace trace;
  trace.dim = n;
  const std::size_t rows = static_cast<std::size_t>(steps / ratio + 1);
  trace.t.reserve(rows);

  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (k % ratio == 0) {
      const DesiredState d = desired_trajectory(settings.trajectory, t);
      const double h = delay_at(settings.delay, t);
      ControlOutput out = ctrl.step({t, x.q, x.q_dot, d, plant, h});
      if (settings.command_hook) settings.command_hook(t, out.tau);
      if (!out.tau.allFinite()) throw SimulationDiverged(t, std::move(trace));
      commands.push(t, out.tau);

      trace.t.push_back(t);
      trace.q.push_back(x.q);
      trace.q_dot.push_back(x.q_dot);
      trace.qd.push_back(d.q);
      trace.qd_dot.push_back(d.q_dot);
      trace.qd_ddot.push_back(d.q_ddot);
      trace.e1.push_back(d.q - x.q);
      trace.tau_app.push_back(applied_input(t, x));
      trace.tau_cmd.push_back(std::move(out.tau));
      trace.c_hat.push_back(out.c_hat);
      trace.s_norm.push_back(out.s_norm);
      trace.h.push_back(h);
      if (out.u.size() > 0) {
        trace.u.push_back(std::move(out.u));
        trace.u_switching.push_back(std::move(out.u_switching));
      }
      if (plant.task_dim() > 0) {
        trace.task.push_back(x.task);
        if (const auto ref = task_reference(settings.trajectory, t)) {
          trace.task_desired.push_back(ref->position);
        }
      }
    }

    const PlantRate k1 = rate(t, x);
    const PlantRate k2 = rate(t + dt / 2, advance(x, k1, dt / 2));
    const PlantRate k3 = rate(t + dt / 2, advance(x, k2, dt / 2));
    const PlantRate k4 = rate(t + dt, advance(x, k3, dt));
    x.q += dt / 6.0 * (k1.q_dot + 2.0 * k2.q_dot + 2.0 * k3.q_dot + k4.q_dot);
    x.q_dot += dt / 6.0 * (k1.q_ddot + 2.0 * k2.q_ddot + 2.0 * k3.q_ddot + k4.q_ddot);
    if (x.task.size() > 0) {
      x.task += dt / 6.0 * (k1.task_dot + 2.0 * k2.task_dot + 2.0 * k3.task_dot + k4.task_dot);
    }
    if (!healthy(x)) throw SimulationDiverged(t + dt, std::move(trace));
  }
  return trace;
}

// --- scenarios --------------------------------------------------------------

std::string to_string(ControllerSpec::Kind kind) {
  switch (kind) {
    case ControllerSpec::Kind::kNone: return "none";
    case ControllerSpec::Kind::kArolc: return "arolc";
    case ControllerSpec::Kind::kPcon: return "pcon";
    case ControllerSpec::Kind::kPconFixed: return "pconf";
  }
  return "unknown";
}

void Scenario::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("duration > 0 required");
  if (controller.kind == ControllerSpec::Kind::kArolc && !gains) {
    throw std::invalid_argument("AROLC requires a [gains] section");
  }
  if (gains) gains->validate();
  if (payload && !std::holds_alternative<WmrSpec>(plant)) {
    throw std::invalid_argument("payload schedules apply to the wmr plant only");
  }
  if (std::holds_alternative<PaperCircle>(trajectory) && !std::holds_alternative<WmrSpec>(plant)) {
    throw std::invalid_argument("paper_circle trajectory requires the wmr plant");
  }
  delay.validate();
}

std::unique_ptr<PlantModel> make_plant(const Scenario& sc) {
  return std::visit(
      [&sc](const auto& spec) -> std::unique_ptr<PlantModel> {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, LinearPlantSpec>) {
          return std::make_unique<GenericPlant>(GenericPlant::linear(
              spec.dim, spec.mass, spec.damping, spec.stiffness, spec.nominal_mass_scale));
        } else if constexpr (std::is_same_v<T, TwoLinkSpec>) {
          return std::make_unique<TwoLinkPlant>(spec.link, spec.disturbance, spec.nominal_mass_scale);
        } else {
          std::optional<PayloadSchedule> payload = sc.payload;
          if (payload) payload->seed = sc.seed;
          return std::make_unique<WmrPlant>(spec.params, spec.disturbance, std::move(payload),
                                            initial_heading(sc.trajectory));
        }
      },
      sc.plant);
}

std::unique_ptr<Controller> make_controller(const Scenario& sc, Eigen::Index dim) {
  const ControllerSpec& c = sc.controller;
  switch (c.kind) {
    case ControllerSpec::Kind::kNone:
      return std::make_unique<ZeroController>(dim);
    case ControllerSpec::Kind::kArolc: {
      if (!sc.gains) throw std::invalid_argument("AROLC requires a [gains] section");
      if (sc.gains->dim() != dim) throw std::invalid_argument("gain dimension does not match the plant");
      ArolcConfig cfg = ArolcConfig::from_gains(*sc.gains, c.alpha, c.epsilon, c.gamma,
                                                c.c_hat_init.value_or(c.gamma), sc.dt_control);
      cfg.switching_enabled = c.switching;
      return std::make_unique<ArolcController>(std::move(cfg));
    }
    case ControllerSpec::Kind::kPcon:
    case ControllerSpec::Kind::kPconFixed: {
      PconConfig cfg{c.kappa, c.vartheta.value_or(Matrix::Identity(dim, dim)), c.k_b};
      std::optional<double> fixed;
      if (c.kind == ControllerSpec::Kind::kPconFixed) {
        fixed = c.h_estimate.value_or(delay_at(sc.delay, 0.0));
      }
      const double window = std::max(max_delay(sc.delay), fixed.value_or(0.0)) + 2.0 * sc.dt_control;
      return std::make_unique<PconController>(std::move(cfg), dim, window, fixed);
    }
  }
  throw std::invalid_argument("unknown controller kind");
}

Trace simulate(const Scenario& sc) {
  sc.validate();
  const std::unique_ptr<PlantModel> plant = make_plant(sc);
  const std::unique_ptr<Controller> controller = make_controller(sc, plant->dim());

  SimulationSettings settings;
  settings.delay = sc.delay;
  settings.trajectory = sc.trajectory;
  settings.duration = sc.duration;
  settings.dt_integration = sc.dt_integration;
  settings.dt_control = sc.dt_control;
  settings.q0 = sc.q0;
  settings.q_dot0 = sc.q_dot0;

  std::vector<std::string> warnings;
  if (sc.controller.kind == ControllerSpec::Kind::kArolc) {
    const double margin = delay_margin(*sc.gains);
    const double h_max = max_delay(sc.delay);
    if (h_max >= margin) {
      std::ostringstream os;
      os << "maximum delay " << h_max << " s is not below the delay margin " << margin << " s";
      warnings.push_back(os.str());
    }
  }
  Trace trace = run_closed_loop(*plant, controller.get(), settings);
  trace.warnings = std::move(warnings);
  return trace;
}

}  // namespace arolc
