#include "arolc/plants.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace arolc {

Vector PlantModel::task_rate(const Vector& /*q*/, const Vector& /*q_dot*/) const {
  return Vector::Zero(0);
}

Vector el_accel(const PlantModel& plant, const Vector& q, const Vector& q_dot,
                const Vector& tau_applied, double t) {
  const Matrix M = plant.mass_matrix(q, t);
  const Vector rhs = tau_applied - plant.bias_vector(q, q_dot, t);
  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) throw LinalgError("el_accel: singular mass matrix");
  return lu.solve(rhs);
}

// --- GenericPlant -----------------------------------------------------------

GenericPlant::GenericPlant(Eigen::Index dim, MassFn mass, BiasFn bias, MassFn nominal_mass,
                           BiasFn nominal_bias)
    : dim_(dim),
      mass_(std::move(mass)),
      bias_(std::move(bias)),
      nominal_mass_(std::move(nominal_mass)),
      nominal_bias_(std::move(nominal_bias)) {
  if (dim <= 0) throw std::invalid_argument("GenericPlant: dimension must be positive");
  if (!mass_ || !bias_) throw std::invalid_argument("GenericPlant: mass and bias are required");
  if (!nominal_mass_) nominal_mass_ = mass_;
  if (!nominal_bias_) {
    nominal_bias_ = [b = bias_](const Vector& q, const Vector& qd, double t) { return b(q, qd, t); };
  }
}

GenericPlant GenericPlant::linear(Eigen::Index dim, double mass, double damping, double stiffness,
                                  double nominal_mass_scale) {
  if (!(mass > 0.0)) throw std::invalid_argument("linear plant: mass must be positive");
  const double nominal = mass * nominal_mass_scale;
  return GenericPlant(
      dim, [dim, mass](const Vector&, double) -> Matrix { return mass * Matrix::Identity(dim, dim); },
      [damping, stiffness](const Vector& q, const Vector& qd, double) -> Vector {
        return damping * qd + stiffness * q;
      },
      [dim, nominal](const Vector&, double) -> Matrix {
        return nominal * Matrix::Identity(dim, dim);
      },
      [damping, stiffness](const Vector& q, const Vector& qd, double) -> Vector {
        return damping * qd + stiffness * q;
      });
}

Matrix GenericPlant::mass_matrix(const Vector& q, double t) const { return mass_(q, t); }
Vector GenericPlant::bias_vector(const Vector& q, const Vector& q_dot, double t) const {
  return bias_(q, q_dot, t);
}
Matrix GenericPlant::nominal_mass_matrix(const Vector& q) const { return nominal_mass_(q, 0.0); }
Vector GenericPlant::nominal_bias_vector(const Vector& q, const Vector& q_dot) const {
  return nominal_bias_(q, q_dot, 0.0);
}

Vector Disturbance::evaluate(const Vector& q_dot, double t) const {
  Vector out = viscous * q_dot;
  if (amplitude != 0.0) {
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      out(i) += amplitude * std::sin(frequency * t + static_cast<double>(i) * std::numbers::pi / 3.0);
    }
  }
  return out;
}

// --- Two-link manipulator -----------------------------------------------------

void TwoLinkParams::validate() const {
  if (!(m1 > 0 && m2 > 0 && l1 > 0 && l2 > 0)) {
    throw std::invalid_argument("two-link masses and lengths must be positive");
  }
  if (lc1 < 0 || lc2 < 0 || I1 < 0 || I2 < 0) {
    throw std::invalid_argument("two-link centre-of-mass distances and inertias must be >= 0");
  }
}

TwoLinkTerms two_link_matrices(const Vector& q, const Vector& q_dot, const TwoLinkParams& p) {
  if (q.size() != 2 || q_dot.size() != 2) throw std::invalid_argument("two-link state must be 2-D");
  const double c2 = std::cos(q(1));
  const double s2 = std::sin(q(1));
  TwoLinkTerms out;
  out.M.resize(2, 2);
  out.M(0, 0) = p.m1 * p.lc1 * p.lc1 + p.I1 +
                p.m2 * (p.l1 * p.l1 + p.lc2 * p.lc2 + 2.0 * p.l1 * p.lc2 * c2) + p.I2;
  out.M(0, 1) = p.m2 * (p.lc2 * p.lc2 + p.l1 * p.lc2 * c2) + p.I2;
  out.M(1, 0) = out.M(0, 1);
  out.M(1, 1) = p.m2 * p.lc2 * p.lc2 + p.I2;

  const double h = p.m2 * p.l1 * p.lc2 * s2;
  const double g1 = (p.m1 * p.lc1 + p.m2 * p.l1) * p.gravity * std::cos(q(0)) +
                    p.m2 * p.lc2 * p.gravity * std::cos(q(0) + q(1));
  const double g2 = p.m2 * p.lc2 * p.gravity * std::cos(q(0) + q(1));
  out.N.resize(2);
  out.N(0) = -h * (2.0 * q_dot(0) * q_dot(1) + q_dot(1) * q_dot(1)) + g1;
  out.N(1) = h * q_dot(0) * q_dot(0) + g2;
  return out;
}

TwoLinkPlant::TwoLinkPlant(TwoLinkParams link, Disturbance disturbance, double nominal_mass_scale)
    : link_(link), nominal_(link), disturbance_(disturbance) {
  link_.validate();
  if (!(nominal_mass_scale > 0.0)) throw std::invalid_argument("nominal_mass_scale must be positive");
  nominal_.m1 *= nominal_mass_scale;
  nominal_.m2 *= nominal_mass_scale;
  nominal_.I1 *= nominal_mass_scale;
  nominal_.I2 *= nominal_mass_scale;
}

Matrix TwoLinkPlant::mass_matrix(const Vector& q, double /*t*/) const {
  return two_link_matrices(q, Vector::Zero(2), link_).M;
}

Vector TwoLinkPlant::bias_vector(const Vector& q, const Vector& q_dot, double t) const {
  return two_link_matrices(q, q_dot, link_).N + disturbance_.evaluate(q_dot, t);
}

Matrix TwoLinkPlant::nominal_mass_matrix(const Vector& q) const {
  return two_link_matrices(q, Vector::Zero(2), nominal_).M;
}

Vector TwoLinkPlant::nominal_bias_vector(const Vector& q, const Vector& q_dot) const {
  return two_link_matrices(q, q_dot, nominal_).N;
}

// --- Wheeled mobile robot -----------------------------------------------------

void WmrParams::validate() const {
  if (!(m > 0 && I_bar > 0 && K > 0 && d > 0 && r_bar > 0 && b > 0 && I_w > 0)) {
    throw std::invalid_argument("WMR parameters must all be positive");
  }
  if (!(d < b)) throw std::invalid_argument("WMR requires d < b");
}

WmrMatrices wmr_matrices(const Vector& q, const Vector& q_dot, const WmrParams& p) {
  if (q.size() != 5 || q_dot.size() != 5) throw std::invalid_argument("WMR state must be 5-D");
  const double phi = q(2);
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double r = p.r_bar;

  const double k1 = s * (p.m * p.d * r - p.K * r) / p.b - p.m * r * c / 2.0;
  const double k2 = s * (p.K * r - p.m * p.d * r) / p.b - p.m * r * c / 2.0;
  const double k3 = c * (p.K * r - p.m * p.d * r) / p.b - p.m * r * s / 2.0;
  const double k4 = c * (p.m * p.d * r - p.K * r) / p.b - p.m * r * s / 2.0;
  const double k5 = r * (p.I_bar - p.K * p.d) / p.b;

  WmrMatrices out;
  out.M_bar.resize(5, 5);
  out.M_bar << p.m, 0.0, p.K * s, k1, k2,
               0.0, p.m, -p.K * c, k3, k4,
               p.K * s, -p.K * c, p.I_bar, -k5, k5,
               k1, k3, -k5, p.I_w, 0.0,
               k2, k4, k5, 0.0, p.I_w;

  const double phi_dot = q_dot(2);
  const double wheel_sq = q_dot(3) * q_dot(3) - q_dot(4) * q_dot(4);
  out.V_bar.resize(5);
  // First two entries follow the published model term for term.
  out.V_bar(0) = p.m * p.d * phi_dot * phi_dot * c + p.m * r * r * s * wheel_sq / (2.0 * p.b);
  out.V_bar(1) = p.m * p.d * phi_dot * phi_dot * c - p.m * r * r * s * wheel_sq / (2.0 * p.b);
  out.V_bar(2) = p.K * r * r * wheel_sq / (2.0 * p.b);
  out.V_bar(3) = -p.K * r * phi_dot * phi_dot / 2.0;
  out.V_bar(4) = -p.K * r * phi_dot * phi_dot / 2.0;

  out.G = Matrix::Zero(5, 2);
  out.G(3, 0) = 1.0;
  out.G(4, 1) = 1.0;
  return out;
}

Matrix wmr_constraint_map(double phi, const WmrParams& p) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double a = p.r_bar / 2.0;
  const double w = p.r_bar / (2.0 * p.b);
  Matrix S(5, 2);
  S << a * c - p.d * w * s, a * c + p.d * w * s,
       a * s + p.d * w * c, a * s - p.d * w * c,
       w, -w,
       1.0, 0.0,
       0.0, 1.0;
  return S;
}

Matrix wmr_constraint_map_derivative(double phi, const WmrParams& p) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  const double a = p.r_bar / 2.0;
  const double w = p.r_bar / (2.0 * p.b);
  Matrix dS = Matrix::Zero(5, 2);
  dS(0, 0) = -a * s - p.d * w * c;
  dS(0, 1) = -a * s + p.d * w * c;
  dS(1, 0) = a * c - p.d * w * s;
  dS(1, 1) = a * c + p.d * w * s;
  return dS;
}

void PayloadSchedule::validate() const {
  if (extra_mass < 0.0) throw std::invalid_argument("payload extra_mass must be >= 0");
  if (!(period_on > 0.0) || !(period_off > 0.0)) {
    throw std::invalid_argument("payload periods must be positive");
  }
  if (max_offset < 0.0) throw std::invalid_argument("payload max_offset must be >= 0");
}

PayloadState payload_mass(const PayloadSchedule& sched, double t) {
  const double T = sched.period();
  const double cycles = std::floor(t / T);
  const double phase = t - cycles * T;
  if (phase >= sched.period_on) return {};

  const auto cycle = static_cast<std::uint64_t>(std::max(cycles, 0.0));
  PayloadState out;
  out.mass = sched.extra_mass;
  if (sched.random_offsets) {
    std::seed_seq seq{static_cast<std::uint32_t>(sched.seed), static_cast<std::uint32_t>(sched.seed >> 32),
                      static_cast<std::uint32_t>(cycle), static_cast<std::uint32_t>(cycle >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> dist(-sched.max_offset, sched.max_offset);
    out.offset.x() = dist(rng);
    out.offset.y() = dist(rng);
  } else if (!sched.offsets.empty()) {
    out.offset = sched.offsets[cycle % sched.offsets.size()];
  }
  return out;
}

WmrParams with_payload(const WmrParams& base, const PayloadState& payload) {
  WmrParams p = base;
  p.m += payload.mass;
  p.K += payload.mass * payload.offset.x();
  p.I_bar += payload.mass * payload.offset.squaredNorm();
  return p;
}

WmrPlant::WmrPlant(WmrParams params, Disturbance disturbance,
                   std::optional<PayloadSchedule> payload, double heading0)
    : params_(params), disturbance_(disturbance), payload_(std::move(payload)), heading0_(heading0) {
  params_.validate();
  std::vector<WmrParams> candidates{params_};
  if (payload_) {
    payload_->validate();
    std::vector<Eigen::Vector2d> placements = payload_->offsets;
    const double o = payload_->max_offset;
    if (payload_->random_offsets) placements.insert(placements.end(), {{o, o}, {o, -o}, {-o, o}, {-o, -o}});
    if (placements.empty()) placements.emplace_back(Eigen::Vector2d::Zero());
    for (const auto& offset : placements) {
      candidates.push_back(with_payload(params_, {payload_->extra_mass, offset}));
    }
  }
  constexpr int kGrid = 16;
  for (const WmrParams& p : candidates) {
    for (int i = 0; i < kGrid; ++i) {
      // θ_r − θ_l sweeps the heading through a full turn.
      const double phi = 2.0 * std::numbers::pi * i / kGrid;
      Vector q(2);
      q << phi * p.b / p.r_bar, -phi * p.b / p.r_bar;
      if (min_eig_symmetric(reduced_mass(q, p)) <= 0.0) {
        throw std::invalid_argument(
            "reduced WMR inertia is not positive definite; increase I_w or reduce m, I_bar");
      }
    }
  }
}

double WmrPlant::heading(const Vector& q) const {
  return heading0_ + params_.r_bar * (q(0) - q(1)) / (2.0 * params_.b);
}

WmrParams WmrPlant::params_at(double t) const {
  if (!payload_) return params_;
  return with_payload(params_, payload_mass(*payload_, t));
}

Matrix WmrPlant::reduced_mass(const Vector& q, const WmrParams& p) const {
  const double phi = heading(q);
  const Matrix S = wmr_constraint_map(phi, params_);
  Vector q5 = Vector::Zero(5);
  q5(2) = phi;
  q5.tail(2) = q;
  const Matrix M_bar = wmr_matrices(q5, Vector::Zero(5), p).M_bar;
  Matrix M = S.transpose() * M_bar * S;
  return (M + M.transpose()) / 2.0;
}

Vector WmrPlant::reduced_bias(const Vector& q, const Vector& q_dot, const WmrParams& p) const {
  const double phi = heading(q);
  const Matrix S = wmr_constraint_map(phi, params_);
  const Vector q5_dot = S * q_dot;
  Vector q5 = Vector::Zero(5);
  q5(2) = phi;
  q5.tail(2) = q;
  const WmrMatrices mats = wmr_matrices(q5, q5_dot, p);
  const Vector S_dot_zeta = wmr_constraint_map_derivative(phi, params_) * q_dot * q5_dot(2);
  return S.transpose() * (mats.V_bar + mats.M_bar * S_dot_zeta);
}

Matrix WmrPlant::mass_matrix(const Vector& q, double t) const {
  return reduced_mass(q, params_at(t));
}

Vector WmrPlant::bias_vector(const Vector& q, const Vector& q_dot, double t) const {
  return reduced_bias(q, q_dot, params_at(t)) + disturbance_.evaluate(q_dot, t);
}

Matrix WmrPlant::nominal_mass_matrix(const Vector& q) const { return reduced_mass(q, params_); }

Vector WmrPlant::nominal_bias_vector(const Vector& q, const Vector& q_dot) const {
  return reduced_bias(q, q_dot, params_);
}

Vector WmrPlant::task_rate(const Vector& q, const Vector& q_dot) const {
  return (wmr_constraint_map(heading(q), params_) * q_dot).head(2);
}

WmrPlant reduced_wmr_dynamics(const WmrParams& params) { return WmrPlant(params); }

}  // namespace arolc
