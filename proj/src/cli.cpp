#include "arolc/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arolc/linalg.hpp"
#include "arolc/metrics.hpp"
#include "arolc/scenario.hpp"
#include "arolc/simulator.hpp"
#include "arolc/stability.hpp"

namespace arolc {

namespace {

namespace fs = std::filesystem;

constexpr int kExitError = 1;
constexpr int kExitDiverged = 2;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> control_dt;
  std::vector<std::string> sets;
  bool quiet = false;
};

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

Overrides make_overrides(const CommonOptions& opt) {
  Overrides o;
  for (const std::string& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ScenarioError(s, "--set expects section.key=value");
    o[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (opt.seed) o["sim.seed"] = std::to_string(*opt.seed);
  if (opt.dt) o["sim.dt"] = fmt(*opt.dt, "%.17g");
  if (opt.control_dt) o["sim.control_dt"] = fmt(*opt.control_dt, "%.17g");
  return o;
}

struct RunResult {
  std::string name;
  Scenario scenario;
  Trace trace;
  std::optional<MetricsReport> metrics;
  std::optional<double> diverged_at;
};

RunResult run_scenario(const LoadedScenario& loaded) {
  RunResult r;
  r.name = loaded.scenario.name;
  r.scenario = loaded.scenario;
  const auto start = std::chrono::steady_clock::now();
  try {
    r.trace = simulate(loaded.scenario);
  } catch (const SimulationDiverged& e) {
    r.trace = e.partial();
    r.diverged_at = e.time();
    return r;
  }
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.metrics = compute_metrics(r.trace, loaded.scenario.trajectory, runtime, loaded.hash);
  return r;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << content;
}

void write_outputs(const fs::path& dir, const RunResult& r) {
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "trace.csv");
    if (!os) throw std::runtime_error("cannot write '" + (dir / "trace.csv").string() + "'");
    write_trace_csv(os, r.trace);
  }
  if (r.trace.has_task()) {
    std::ofstream os(dir / "task_trace.csv");
    write_task_csv(os, r.trace);
  }
  if (r.metrics) write_file(dir / "metrics.json", metrics_to_json(*r.metrics) + "\n");
}

void report_warnings(const RunResult& r, std::ostream& err) {
  for (const std::string& w : r.trace.warnings) err << "warning (" << r.name << "): " << w << '\n';
}

int report_divergence(const RunResult& r, std::ostream& err) {
  err << "error: simulation '" << r.name << "' diverged at t = " << fmt(*r.diverged_at, "%.4f")
      << " s; partial trace written\n";
  return kExitDiverged;
}

std::string metrics_header(Eigen::Index ae_dims, bool pct) {
  std::string h;
  for (Eigen::Index i = 0; i < ae_dims; ++i) {
    h += ",ae_" + std::to_string(i);
    if (pct) h += ",pct_ae_" + std::to_string(i);
  }
  return h + ",tv,sup_error_tail,ae_units";
}

std::string metrics_row(const MetricsReport& m) {
  std::string row;
  const bool pct = !m.pct_ae_per_dim.empty();
  for (std::size_t i = 0; i < m.ae_per_dim.size(); ++i) {
    row += "," + fmt(m.ae_per_dim[i], "%.9g");
    if (pct) row += "," + fmt(m.pct_ae_per_dim[i], "%.9g");
  }
  return row + "," + fmt(m.tv, "%.9g") + "," + fmt(m.sup_error_tail, "%.9g") + "," + m.ae_units;
}

int cmd_bound(const std::string& path, const CommonOptions& opt, std::ostream& out) {
  const LoadedScenario loaded = load_scenario(path, make_overrides(opt));
  const Scenario& sc = loaded.scenario;
  if (!sc.gains) throw ScenarioError("gains", "the bound command requires a [gains] section");
  const GainSet& g = *sc.gains;
  const double margin = delay_margin(g);
  const double h_max = max_delay(sc.delay);
  out << "delay margin: " << fmt(margin) << " s\n";
  out << "max delay (" << to_string(sc.delay.kind) << "): " << fmt(h_max) << " s\n";
  out << "feasible: " << (check_feasibility(g, h_max) ? "yes" : "no") << '\n';
  if (loaded.bounds) {
    const BoundInputs& in = *loaded.bounds;
    BoundParams bp;
    bp.c = in.c;
    bp.Gamma = in.Gamma;
    bp.theta_norm = in.theta_norm;
    bp.alpha = sc.controller.alpha;
    bp.epsilon = sc.controller.epsilon;
    bp.gamma = sc.controller.gamma;
    bp.c_hat = in.c_hat;
    bp.h = h_max;
    for (int k = 1; k <= 6; ++k) {
      out << "bound case " << k << ": ";
      try {
        const double b = ultimate_bound(k, g, bp);
        out << fmt(b);
        if (in.e0_norm && in.c0) out << " (reaching time " << fmt(reaching_time(*in.e0_norm, b, *in.c0)) << " s)";
        out << '\n';
      } catch (const LinalgError& e) {
        out << e.what() << '\n';
      }
    }
  }
  return 0;
}

int cmd_simulate(const std::string& path, const std::string& out_dir, const CommonOptions& opt,
                 std::ostream& out, std::ostream& err) {
  const LoadedScenario loaded = load_scenario(path, make_overrides(opt));
  if (!opt.quiet) err << "simulating " << loaded.scenario.name << " ...\n";
  const RunResult r = run_scenario(loaded);
  write_outputs(out_dir, r);
  report_warnings(r, err);
  if (r.diverged_at) return report_divergence(r, err);
  if (!opt.quiet) {
    out << "scenario " << r.name << " (" << loaded.hash << "): " << r.trace.size() << " samples\n";
    out << metrics_to_json(*r.metrics) << '\n';
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& out_dir, const CommonOptions& opt,
                std::ostream& out, std::ostream& err) {
  const Overrides overrides = make_overrides(opt);
  std::vector<LoadedScenario> loaded;
  for (const std::string& p : paths) loaded.push_back(load_scenario(p, overrides));

  std::vector<std::future<RunResult>> jobs;
  for (const LoadedScenario& l : loaded) {
    if (!opt.quiet) err << "simulating " << l.scenario.name << " ...\n";
    jobs.push_back(std::async(std::launch::async, [&l] { return run_scenario(l); }));
  }
  std::vector<RunResult> results;
  for (auto& j : jobs) results.push_back(j.get());

  fs::create_directories(out_dir);
  int status = 0;
  std::vector<std::string> used;
  for (const RunResult& r : results) {
    std::string dir = r.name;
    while (std::find(used.begin(), used.end(), dir) != used.end()) dir += "_b";
    used.push_back(dir);
    write_outputs(fs::path(out_dir) / dir, r);
    report_warnings(r, err);
    if (r.diverged_at) status = report_divergence(r, err);
  }
  if (status != 0) return status;

  const MetricsReport& first = *results.front().metrics;
  const std::string header = "scenario,controller,delay" +
                             metrics_header(static_cast<Eigen::Index>(first.ae_per_dim.size()),
                                            !first.pct_ae_per_dim.empty());
  std::string table = header + "\n";
  for (const RunResult& r : results) {
    table += r.name + "," + to_string(r.scenario.controller.kind) + "," + to_string(r.scenario.delay.kind) +
             metrics_row(*r.metrics) + "\n";
  }
  write_file(fs::path(out_dir) / "comparison.csv", table);
  if (!opt.quiet) out << table;
  return 0;
}

std::vector<double> parse_range(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw std::invalid_argument("--range expects a:b:step, got '" + text + "'");
  }
  double a = 0.0, b = 0.0, step = 0.0;
  try {
    a = std::stod(text.substr(0, c1));
    b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("--range expects numbers a:b:step, got '" + text + "'");
  }
  if (!(step > 0.0) || b < a) throw std::invalid_argument("--range requires a <= b and step > 0");
  std::vector<double> values;
  const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= count; ++i) values.push_back(a + static_cast<double>(i) * step);
  return values;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& range,
              const std::string& out_dir, const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  const std::vector<double> values = parse_range(range);
  const Overrides base = make_overrides(opt);
  std::vector<LoadedScenario> loaded;
  for (double v : values) {
    Overrides o = base;
    o[param] = fmt(v, "%.17g");
    loaded.push_back(load_scenario(path, o));
  }

  std::vector<std::future<RunResult>> jobs;
  for (const LoadedScenario& l : loaded) {
    jobs.push_back(std::async(std::launch::async, [&l] { return run_scenario(l); }));
  }

  std::string header;
  std::string rows;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const RunResult r = jobs[i].get();
    if (!opt.quiet) err << param << " = " << fmt(values[i], "%.9g") << (r.diverged_at ? " diverged\n" : " done\n");
    std::string row = fmt(values[i], "%.9g");
    if (r.diverged_at) {
      row += ",diverged," + fmt(*r.diverged_at, "%.9g");
    } else {
      if (header.empty()) {
        header = metrics_header(static_cast<Eigen::Index>(r.metrics->ae_per_dim.size()),
                                !r.metrics->pct_ae_per_dim.empty());
      }
      row += ",ok," + metrics_row(*r.metrics).substr(1);
    }
    rows += row + "\n";
  }
  if (header.empty()) header = ",ae_0,tv,sup_error_tail,ae_units";
  const std::string table = param + ",status" + header + "\n" + rows;
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "sweep.csv", table);
  if (!opt.quiet) out << table;
  return 0;
}

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--seed", opt.seed, "Override sim.seed");
  cmd->add_option("--dt", opt.dt, "Override the integration step sim.dt (s)");
  cmd->add_option("--control-dt", opt.control_dt, "Override the control period sim.control_dt (s)");
  cmd->add_option("--set", opt.sets, "Override any scenario value, section.key=value");
  cmd->add_flag("--quiet", opt.quiet, "Suppress progress output");
}

}  // namespace

int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive-robust control of input-delayed Euler-Lagrange systems", "arolc"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string scenario;
  std::vector<std::string> pair;
  std::string out_dir = "out";
  std::string param;
  std::string range;

  CLI::App* bound = app.add_subcommand("bound", "Print the delay margin and feasibility of a scenario");
  bound->add_option("scenario", scenario, "Scenario file")->required();
  add_common(bound, opt);

  CLI::App* sim = app.add_subcommand("simulate", "Run a scenario and write trace and metrics");
  sim->add_option("scenario", scenario, "Scenario file")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  add_common(sim, opt);

  CLI::App* cmp = app.add_subcommand("compare", "Run two scenarios and tabulate their metrics");
  cmp->add_option("scenarios", pair, "Scenario files A and B")->required()->expected(2);
  cmp->add_option("--out", out_dir, "Output directory")->required();
  add_common(cmp, opt);

  CLI::App* sweep = app.add_subcommand("sweep", "Run a scenario over a range of one parameter");
  sweep->add_option("scenario", scenario, "Scenario file")->required();
  sweep->add_option("--param", param, "Swept key, section.key")->required();
  sweep->add_option("--range", range, "Values a:b:step")->required();
  sweep->add_option("--out", out_dir, "Output directory");
  add_common(sweep, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : kExitError;
  }

  try {
    if (*bound) return cmd_bound(scenario, opt, out);
    if (*sim) return cmd_simulate(scenario, out_dir, opt, out, err);
    if (*cmp) return cmd_compare(pair, out_dir, opt, out, err);
    if (*sweep) return cmd_sweep(scenario, param, range, out_dir, opt, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace arolc
