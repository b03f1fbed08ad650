#pragma once

#include <deque>
#include <string>
#include <string_view>

#include "arolc/linalg.hpp"

namespace arolc {

/// Input delay h(t) in seconds. S1..S4 are the time-varying and fixed
/// profiles of the WMR experiments; kCustom is a + b·|sin(ωt)|.
struct DelayProfile {
  enum class Kind { kNone, kS1, kS2, kS3, kS4, kConstant, kCustom };

  Kind kind = Kind::kNone;
  double a = 0.0;      // constant part / h0 (s)
  double b = 0.0;      // amplitude of |sin| part (s)
  double omega = 0.0;  // rad/s

  static DelayProfile none() { return {}; }
  static DelayProfile constant(double h0) { return {Kind::kConstant, h0, 0.0, 0.0}; }
  static DelayProfile custom(double a, double b, double omega) {
    return {Kind::kCustom, a, b, omega};
  }
  static DelayProfile s1() { return {Kind::kS1, 0.0, 0.0, 0.0}; }
  static DelayProfile s2() { return {Kind::kS2, 0.0, 0.0, 0.0}; }
  static DelayProfile s3() { return {Kind::kS3, 0.0, 0.0, 0.0}; }
  static DelayProfile s4() { return {Kind::kS4, 0.0, 0.0, 0.0}; }

  /// Parses "S1".."S4", "none", "constant", "custom" (parameters set separately).
  static Kind parse_kind(std::string_view name);

  void validate() const;
};

[[nodiscard]] double delay_at(const DelayProfile& p, double t);
/// sup_t h(t).
[[nodiscard]] double max_delay(const DelayProfile& p);
/// inf_t h(t).
[[nodiscard]] double min_delay(const DelayProfile& p);
[[nodiscard]] std::string to_string(DelayProfile::Kind kind);

/// Timestamped history of issued control commands, realizing τ(t − h(t)).
class DelayBuffer {
 public:
  struct Sample {
    double t;
    Vector value;
  };

  DelayBuffer() = default;
  /// `dim` is the command dimension; `window` is how much history is kept (s).
  DelayBuffer(Eigen::Index dim, double window);

  /// Timestamps must be strictly increasing.
  void push(double t, Vector value);

  /// Linear interpolation between bracketing samples; zero before the first
  /// sample; last value after the latest sample.
  [[nodiscard]] Vector sample(double t_query) const;
  /// Value of the most recent sample issued at or before t_query (the
  /// zero-order-hold reconstruction); zero before the first sample.
  [[nodiscard]] Vector sample_held(double t_query) const;

  /// Trapezoidal integral of the linearly interpolated history over
  /// [t0, t1]; time before the first sample contributes zero.
  [[nodiscard]] Vector integrate(double t0, double t1) const;

  [[nodiscard]] bool empty() const { return samples_.empty(); }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] double latest_time() const;
  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] double window() const { return window_; }
  [[nodiscard]] const std::deque<Sample>& samples() const { return samples_; }

 private:
  // Index of the last sample with time ≤ t, or npos.
  [[nodiscard]] std::size_t last_at_or_before(double t) const;
  [[nodiscard]] Vector interpolate(std::size_t i, double t) const;
  void trim();

  Eigen::Index dim_ = 0;
  double window_ = 0.0;
  std::deque<Sample> samples_;
};

}  // namespace arolc
