#include "arolc/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace arolc {

namespace {

void require_nonempty(const Trace& trace) {
  if (trace.empty()) throw std::invalid_argument("metrics: empty trace");
}

void write_number(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  os << buf;
}

}  // namespace

double absolute_average_error(const Trace& trace, Eigen::Index dim) {
  require_nonempty(trace);
  if (dim < 0 || dim >= trace.dim) throw std::out_of_range("metrics: dimension out of range");
  double sum = 0.0;
  for (const Vector& e : trace.e1) sum += std::abs(e(dim));
  return sum / static_cast<double>(trace.e1.size());
}

double task_absolute_average_error(const Trace& trace, Eigen::Index dim) {
  require_nonempty(trace);
  if (!trace.has_task()) throw std::invalid_argument("metrics: trace has no task coordinates");
  double sum = 0.0;
  for (std::size_t i = 0; i < trace.task.size(); ++i) {
    sum += std::abs(trace.task_desired[i](dim) - trace.task[i](dim));
  }
  return sum / static_cast<double>(trace.task.size());
}

double percent_error(double ae, double path_diameter) {
  if (!(path_diameter > 0.0)) throw std::invalid_argument("percent_error: diameter must be positive");
  return 100.0 * ae / path_diameter;
}

double total_variation(std::span<const double> u_r, std::span<const double> u_l) {
  if (u_r.size() != u_l.size()) throw std::invalid_argument("total_variation: length mismatch");
  double tv = 0.0;
  for (std::size_t i = 1; i < u_r.size(); ++i) {
    tv += std::abs(u_r[i] - u_r[i - 1]) + std::abs(u_l[i] - u_l[i - 1]);
  }
  return tv;
}

double total_variation(const Trace& trace) {
  double tv = 0.0;
  for (std::size_t i = 1; i < trace.tau_cmd.size(); ++i) {
    tv += (trace.tau_cmd[i] - trace.tau_cmd[i - 1]).cwiseAbs().sum();
  }
  return tv;
}

double sup_error_tail(const Trace& trace, double fraction) {
  require_nonempty(trace);
  const auto start = static_cast<std::size_t>(
      std::floor((1.0 - fraction) * static_cast<double>(trace.size())));
  double sup = 0.0;
  for (std::size_t i = std::min(start, trace.size() - 1); i < trace.size(); ++i) {
    sup = std::max(sup, trace.e1[i].norm());
  }
  return sup;
}

MetricsReport compute_metrics(const Trace& trace, const TrajectorySpec& trajectory, double runtime,
                              std::string scenario_hash) {
  require_nonempty(trace);
  MetricsReport r;
  if (trace.has_task()) {
    r.ae_units = "mm";
    const auto diameter = path_diameter(trajectory);
    for (Eigen::Index i = 0; i < trace.task.front().size(); ++i) {
      const double ae_mm = 1000.0 * task_absolute_average_error(trace, i);
      r.ae_per_dim.push_back(ae_mm);
      if (diameter) r.pct_ae_per_dim.push_back(percent_error(ae_mm, 1000.0 * *diameter));
    }
  } else {
    r.ae_units = "plant";
    for (Eigen::Index i = 0; i < trace.dim; ++i) r.ae_per_dim.push_back(absolute_average_error(trace, i));
  }
  r.tv = total_variation(trace);
  r.sup_error_tail = sup_error_tail(trace);
  r.runtime = runtime;
  r.scenario_hash = std::move(scenario_hash);
  return r;
}

std::string metrics_to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["ae_per_dim"] = r.ae_per_dim;
  j["pct_ae_per_dim"] = r.pct_ae_per_dim;
  j["ae_units"] = r.ae_units;
  j["tv"] = r.tv;
  j["sup_error_tail"] = r.sup_error_tail;
  j["runtime"] = r.runtime;
  j["scenario_hash"] = r.scenario_hash;
  return j.dump(2);
}

MetricsReport metrics_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  MetricsReport r;
  r.ae_per_dim = j.at("ae_per_dim").get<std::vector<double>>();
  r.pct_ae_per_dim = j.at("pct_ae_per_dim").get<std::vector<double>>();
  r.ae_units = j.at("ae_units").get<std::string>();
  r.tv = j.at("tv").get<double>();
  r.sup_error_tail = j.at("sup_error_tail").get<double>();
  r.runtime = j.at("runtime").get<double>();
  r.scenario_hash = j.at("scenario_hash").get<std::string>();
  return r;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  const Eigen::Index n = trace.dim;
  os << "t";
  for (const char* prefix : {"q", "qd", "e1", "tau_cmd", "tau_app"}) {
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << prefix << '_' << i;
  }
  os << ",c_hat,s_norm,h\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    write_number(os, trace.t[k]);
    for (const auto* series : {&trace.q, &trace.qd, &trace.e1, &trace.tau_cmd, &trace.tau_app}) {
      for (Eigen::Index i = 0; i < n; ++i) {
        os << ',';
        write_number(os, (*series)[k](i));
      }
    }
    for (double v : {trace.c_hat[k], trace.s_norm[k], trace.h[k]}) {
      os << ',';
      write_number(os, v);
    }
    os << '\n';
  }
}

void write_task_csv(std::ostream& os, const Trace& trace) {
  if (!trace.has_task()) return;
  const Eigen::Index m = trace.task.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < m; ++i) os << ",x_" << i;
  for (Eigen::Index i = 0; i < m; ++i) os << ",xd_" << i;
  os << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    write_number(os, trace.t[k]);
    for (const auto* series : {&trace.task, &trace.task_desired}) {
      for (Eigen::Index i = 0; i < m; ++i) {
        os << ',';
        write_number(os, (*series)[k](i));
      }
    }
    os << '\n';
  }
}

}  // namespace arolc
