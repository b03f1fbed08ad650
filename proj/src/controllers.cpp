#include "arolc/controllers.hpp"

#include <stdexcept>

namespace arolc {

ArolcConfig ArolcConfig::from_gains(const GainSet& gains, double alpha, double epsilon,
                                    double gamma, double c_hat_init, double dt_control) {
  const ErrorSystem sys = build_error_system(gains);
  ArolcConfig cfg;
  cfg.K1 = gains.K1;
  cfg.K2 = gains.K2;
  cfg.P = sys.P;
  cfg.B = sys.B;
  cfg.alpha = alpha;
  cfg.epsilon = epsilon;
  cfg.gamma = gamma;
  cfg.c_hat_init = c_hat_init;
  cfg.dt_control = dt_control;
  cfg.validate();
  return cfg;
}

void ArolcConfig::validate() const {
  const Eigen::Index n = K1.rows();
  if (n == 0 || K1.cols() != n || K2.rows() != n || K2.cols() != n) {
    throw std::invalid_argument("ArolcConfig: K1 and K2 must be n x n");
  }
  if (P.rows() != 2 * n || P.cols() != 2 * n || B.rows() != 2 * n || B.cols() != n) {
    throw std::invalid_argument("ArolcConfig: P must be 2n x 2n and B 2n x n");
  }
  if (!(alpha > 0.0) || !(epsilon > 0.0) || !(gamma > 0.0) || !(dt_control > 0.0)) {
    throw std::invalid_argument("ArolcConfig: alpha, epsilon, gamma and dt_control must be positive");
  }
  if (!(c_hat_init >= gamma)) throw std::invalid_argument("ArolcConfig: c_hat_init must be >= gamma");
}

Vector sliding_variable(const Vector& e, const ArolcConfig& cfg) {
  if (e.size() != cfg.P.rows()) throw std::invalid_argument("sliding_variable: dimension mismatch");
  return cfg.B.transpose() * (cfg.P * e);
}

Vector nominal_control(const Vector& e1, const Vector& e1_dot, const Vector& qdd_desired,
                       const ArolcConfig& cfg) {
  return qdd_desired + cfg.K2 * e1_dot + cfg.K1 * e1;
}

Vector switching_control(const Vector& s, double c_hat, const ArolcConfig& cfg) {
  const double norm = s.norm();
  const double scale = cfg.alpha * c_hat / (norm >= cfg.epsilon ? norm : cfg.epsilon);
  return scale * s;
}

double gain_rate(const ArolcState& state, const Vector& s, double t, const ArolcConfig& cfg) {
  if (state.c_hat <= cfg.gamma) return cfg.gamma;
  double s_dot_s = 0.0;  // first step takes the decreasing branch
  if (state.s_prev) {
    const double dt = t - state.t_prev;
    if (!(dt > 0.0)) throw std::invalid_argument("adapt_gain: time must advance");
    s_dot_s = s.dot((s - *state.s_prev) / dt);
  }
  return s_dot_s > 0.0 ? s.norm() : -s.norm();
}

ArolcState adapt_gain(const ArolcState& state, const Vector& s, double t, const ArolcConfig& cfg) {
  ArolcState next;
  next.c_hat = std::max(state.c_hat + gain_rate(state, s, t, cfg) * cfg.dt_control, cfg.gamma);
  next.s_prev = s;
  next.t_prev = t;
  return next;
}

ArolcStep arolc_step(const ArolcState& state, const Vector& q, const Vector& q_dot,
                     const DesiredState& desired, const Matrix& mass_hat, const Vector& bias_hat,
                     double t, const ArolcConfig& cfg) {
  const Eigen::Index n = cfg.dim();
  if (q.size() != n || q_dot.size() != n || desired.q.size() != n) {
    throw std::invalid_argument("arolc_step: dimension mismatch");
  }
  const Vector e1 = desired.q - q;
  const Vector e1_dot = desired.q_dot - q_dot;
  Vector e(2 * n);
  e << e1, e1_dot;

  ArolcStep out;
  out.s = sliding_variable(e, cfg);
  out.u_nominal = nominal_control(e1, e1_dot, desired.q_ddot, cfg);
  out.u_switching = cfg.switching_enabled ? switching_control(out.s, state.c_hat, cfg)
                                          : Vector::Zero(n);
  out.u = out.u_nominal + out.u_switching;
  out.tau = mass_hat * out.u + bias_hat;
  out.state = adapt_gain(state, out.s, t, cfg);
  return out;
}

void PconConfig::validate() const {
  if (!(kappa > 0.0) || !(k_b > 0.0)) throw std::invalid_argument("PCON: kappa and k_b must be positive");
  if (vartheta.rows() != vartheta.cols() || vartheta.rows() == 0 || !is_symmetric(vartheta)) {
    throw std::invalid_argument("PCON: vartheta must be a symmetric square matrix");
  }
  // ϑ = 0 is accepted and reduces the law to PD on the filtered error.
  if (min_eig_symmetric(vartheta) < 0.0) throw std::invalid_argument("PCON: vartheta must be PSD");
}

Vector pcon_integral_error(const PconState& state, double t) {
  if (state.history.empty()) return Vector::Zero(state.history.dim());
  return state.history.integrate(t - state.h_estimate, t);
}

PconStep pcon_command(const PconState& state, const Vector& q, const Vector& q_dot,
                      const DesiredState& desired, double t, const PconConfig& cfg) {
  PconStep out;
  out.e_z = pcon_integral_error(state, t);
  const Vector e1 = desired.q - q;
  const Vector e1_dot = desired.q_dot - q_dot;
  out.filtered_error = e1_dot + cfg.kappa * e1 - cfg.vartheta * out.e_z;
  out.tau = cfg.k_b * out.filtered_error;
  return out;
}

PconStep pcon_step(PconState& state, const Vector& q, const Vector& q_dot,
                   const DesiredState& desired, double t, const PconConfig& cfg) {
  PconStep out = pcon_command(state, q, q_dot, desired, t, cfg);
  state.history.push(t, out.tau);
  return out;
}

Vector uncertainty_residual(const ModelTerms& true_now, const ModelTerms& nominal_h,
                            const Vector& u_h, const Vector& qdd_desired,
                            const Vector& qdd_desired_h) {
  const Eigen::Index n = u_h.size();
  Eigen::FullPivLU<Matrix> lu(true_now.M);
  if (!lu.isInvertible()) throw LinalgError("uncertainty_residual: singular mass matrix");
  const Matrix M_inv_M_hat = lu.solve(nominal_h.M);
  return (Matrix::Identity(n, n) - M_inv_M_hat) * u_h + lu.solve(Vector(true_now.N - nominal_h.N)) +
         qdd_desired - qdd_desired_h;
}

Vector uncertainty_residual(const PlantModel& plant, const Vector& q, const Vector& q_dot,
                            const Vector& q_h, const Vector& q_dot_h, const Vector& u_h,
                            const Vector& qdd_desired, const Vector& qdd_desired_h, double t) {
  const ModelTerms true_now{plant.mass_matrix(q, t), plant.bias_vector(q, q_dot, t)};
  const ModelTerms nominal_h{plant.nominal_mass_matrix(q_h), plant.nominal_bias_vector(q_h, q_dot_h)};
  return uncertainty_residual(true_now, nominal_h, u_h, qdd_desired, qdd_desired_h);
}

}  // namespace arolc
