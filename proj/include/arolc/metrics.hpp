#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arolc/simulator.hpp"

namespace arolc {

/// Mean of |e1[dim]| over all trace samples.
[[nodiscard]] double absolute_average_error(const Trace& trace, Eigen::Index dim);
/// Mean of |task_desired[dim] − task[dim]| over all samples, in task units.
[[nodiscard]] double task_absolute_average_error(const Trace& trace, Eigen::Index dim);

/// 100·ae/diameter.
[[nodiscard]] double percent_error(double ae, double path_diameter);

/// Σ |u_r(i+1) − u_r(i)| + |u_l(i+1) − u_l(i)|.
[[nodiscard]] double total_variation(std::span<const double> u_r, std::span<const double> u_l);
/// Total variation of the commanded input, summed over every input channel.
[[nodiscard]] double total_variation(const Trace& trace);

/// sup ‖e1‖ over the final `fraction` of the trace.
[[nodiscard]] double sup_error_tail(const Trace& trace, double fraction = 0.5);

struct MetricsReport {
  std::vector<double> ae_per_dim;
  std::vector<double> pct_ae_per_dim;  // empty when no path diameter is defined
  std::string ae_units;                // "mm" for task-space errors, "plant" otherwise
  double tv = 0.0;
  double sup_error_tail = 0.0;
  double runtime = 0.0;  // s, wall clock
  std::string scenario_hash;

  bool operator==(const MetricsReport&) const = default;
};

/// AE is reported in millimetres of task-space position when the trajectory
/// defines one (the WMR path), otherwise in plant units on e1.
[[nodiscard]] MetricsReport compute_metrics(const Trace& trace, const TrajectorySpec& trajectory,
                                            double runtime, std::string scenario_hash);

[[nodiscard]] std::string metrics_to_json(const MetricsReport& report);
[[nodiscard]] MetricsReport metrics_from_json(const std::string& text);

/// Trace CSV: t, q_*, qd_*, e1_*, tau_cmd_*, tau_app_*, c_hat, s_norm, h;
/// floats with 9 significant digits.
void write_trace_csv(std::ostream& os, const Trace& trace);
/// t, x_*, xd_* for traces with task coordinates.
void write_task_csv(std::ostream& os, const Trace& trace);

}  // namespace arolc
