#include "arolc/delay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace arolc {

namespace {
constexpr std::size_t kNpos = std::numeric_limits<std::size_t>::max();
}

DelayProfile::Kind DelayProfile::parse_kind(std::string_view name) {
  if (name == "none") return Kind::kNone;
  if (name == "S1" || name == "s1") return Kind::kS1;
  if (name == "S2" || name == "s2") return Kind::kS2;
  if (name == "S3" || name == "s3") return Kind::kS3;
  if (name == "S4" || name == "s4") return Kind::kS4;
  if (name == "constant") return Kind::kConstant;
  if (name == "custom") return Kind::kCustom;
  throw std::invalid_argument("unknown delay profile '" + std::string(name) + "'");
}

void DelayProfile::validate() const {
  switch (kind) {
    case Kind::kConstant:
      if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("delay h0 must be >= 0");
      break;
    case Kind::kCustom:
      if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(omega) || a < 0.0 ||
          a + std::min(b, 0.0) < 0.0) {
        throw std::invalid_argument("custom delay a + b|sin(wt)| must stay nonnegative");
      }
      break;
    default:
      break;
  }
}

std::string to_string(DelayProfile::Kind kind) {
  switch (kind) {
    case DelayProfile::Kind::kNone: return "none";
    case DelayProfile::Kind::kS1: return "S1";
    case DelayProfile::Kind::kS2: return "S2";
    case DelayProfile::Kind::kS3: return "S3";
    case DelayProfile::Kind::kS4: return "S4";
    case DelayProfile::Kind::kConstant: return "constant";
    case DelayProfile::Kind::kCustom: return "custom";
  }
  return "unknown";
}

double delay_at(const DelayProfile& p, double t) {
  switch (p.kind) {
    case DelayProfile::Kind::kNone: return 0.0;
    case DelayProfile::Kind::kS1: return 0.020 + 0.080 * std::abs(std::sin(t));
    case DelayProfile::Kind::kS2: return 0.005 + 0.120 * std::abs(std::sin(0.1 * t));
    case DelayProfile::Kind::kS3: return 0.060;
    case DelayProfile::Kind::kS4: return 0.120;
    case DelayProfile::Kind::kConstant: return p.a;
    case DelayProfile::Kind::kCustom: return p.a + p.b * std::abs(std::sin(p.omega * t));
  }
  return 0.0;
}

double max_delay(const DelayProfile& p) {
  switch (p.kind) {
    case DelayProfile::Kind::kNone: return 0.0;
    case DelayProfile::Kind::kS1: return 0.100;
    case DelayProfile::Kind::kS2: return 0.125;
    case DelayProfile::Kind::kS3: return 0.060;
    case DelayProfile::Kind::kS4: return 0.120;
    case DelayProfile::Kind::kConstant: return p.a;
    case DelayProfile::Kind::kCustom:
      return p.omega == 0.0 ? p.a : p.a + std::max(p.b, 0.0);
  }
  return 0.0;
}

double min_delay(const DelayProfile& p) {
  switch (p.kind) {
    case DelayProfile::Kind::kS1: return 0.020;
    case DelayProfile::Kind::kS2: return 0.005;
    case DelayProfile::Kind::kCustom:
      return p.omega == 0.0 ? p.a : p.a + std::min(p.b, 0.0);
    default: return max_delay(p);
  }
}

DelayBuffer::DelayBuffer(Eigen::Index dim, double window) : dim_(dim), window_(window) {
  if (dim <= 0) throw std::invalid_argument("DelayBuffer: dimension must be positive");
  if (!(window >= 0.0)) throw std::invalid_argument("DelayBuffer: window must be nonnegative");
}

void DelayBuffer::push(double t, Vector value) {
  if (value.size() != dim_) throw std::invalid_argument("DelayBuffer: dimension mismatch");
  if (!samples_.empty() && !(t > samples_.back().t)) {
    throw std::invalid_argument("DelayBuffer: timestamps must be strictly increasing");
  }
  samples_.push_back({t, std::move(value)});
  trim();
}

void DelayBuffer::trim() {
  // Keep one sample older than the window so queries at the window edge
  // still have a left bracket.
  const double cutoff = samples_.back().t - window_;
  while (samples_.size() > 2 && samples_[1].t <= cutoff) samples_.pop_front();
}

double DelayBuffer::latest_time() const {
  return samples_.empty() ? -std::numeric_limits<double>::infinity() : samples_.back().t;
}

std::size_t DelayBuffer::last_at_or_before(double t) const {
  if (samples_.empty() || t < samples_.front().t) return kNpos;
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double value, const Sample& s) { return value < s.t; });
  return static_cast<std::size_t>(std::distance(samples_.begin(), it)) - 1;
}

Vector DelayBuffer::interpolate(std::size_t i, double t) const {
  const Sample& lo = samples_[i];
  if (i + 1 >= samples_.size() || t == lo.t) return lo.value;
  const Sample& hi = samples_[i + 1];
  const double w = (t - lo.t) / (hi.t - lo.t);
  return (1.0 - w) * lo.value + w * hi.value;
}

Vector DelayBuffer::sample(double t_query) const {
  const std::size_t i = last_at_or_before(t_query);
  if (i == kNpos) return Vector::Zero(dim_);
  return interpolate(i, t_query);
}

Vector DelayBuffer::sample_held(double t_query) const {
  const std::size_t i = last_at_or_before(t_query);
  if (i == kNpos) return Vector::Zero(dim_);
  return samples_[i].value;
}

Vector DelayBuffer::integrate(double t0, double t1) const {
  Vector total = Vector::Zero(dim_);
  if (samples_.empty() || !(t1 > t0)) return total;
  const double lo = std::max(t0, samples_.front().t);
  if (!(t1 > lo)) return total;

  // Breakpoints: lo, every sample time strictly inside (lo, t1), t1.
  double prev_t = lo;
  Vector prev_v = sample(lo);
  for (std::size_t i = last_at_or_before(lo) + 1; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.t >= t1) break;
    total += 0.5 * (s.t - prev_t) * (prev_v + s.value);
    prev_t = s.t;
    prev_v = s.value;
  }
  total += 0.5 * (t1 - prev_t) * (prev_v + sample(t1));
  return total;
}

}  // namespace arolc
