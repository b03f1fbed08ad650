#include "arolc/scenario.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

namespace arolc {

ScenarioError::ScenarioError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> kSchema{
      {"plant",
       {"type", "dim", "mass", "damping", "stiffness", "nominal_mass_scale", "m1", "m2", "l1", "l2",
        "lc1", "lc2", "I1", "I2", "gravity", "m", "I_bar", "K", "d", "r_bar", "b", "I_w", "viscous",
        "disturbance_amplitude", "disturbance_frequency"}},
      {"controller",
       {"type", "alpha", "epsilon", "gamma", "c_hat_init", "switching", "kappa", "k_b", "vartheta",
        "h_estimate"}},
      {"gains", {"K1", "K2", "Q", "r", "beta"}},
      {"delay", {"profile", "h0", "a", "b", "omega"}},
      {"trajectory",
       {"type", "amplitude", "omega", "offset", "phase", "q", "radius", "angular_rate", "center_x",
        "center_y", "rate_r", "rate_l"}},
      {"payload", {"extra_mass", "period_on", "period_off", "offsets", "random", "max_offset"}},
      {"sim", {"duration", "dt", "control_dt", "seed", "q0", "qdot0"}},
      {"bounds", {"c", "Gamma", "theta_norm", "c_hat", "e0_norm", "c0"}},
  };
  return kSchema;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& root) : root_(root) {}

  [[nodiscard]] bool has_section(const std::string& section) const {
    return root_.get_child_optional(section).has_value();
  }

  [[nodiscard]] std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto child = root_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
    if (!child) return std::nullopt;
    return child->get_value<std::string>();
  }

  [[nodiscard]] std::string str(const std::string& section, const std::string& key) const {
    auto v = raw(section, key);
    if (!v) throw ScenarioError(section + "." + key, "required key missing");
    return *v;
  }

  [[nodiscard]] std::optional<double> opt_number(const std::string& section, const std::string& key) const {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    return parse_number(section + "." + key, *v);
  }

  [[nodiscard]] double number(const std::string& section, const std::string& key) const {
    const auto v = opt_number(section, key);
    if (!v) throw ScenarioError(section + "." + key, "required key missing");
    return *v;
  }

  [[nodiscard]] double number_or(const std::string& section, const std::string& key, double fallback) const {
    return opt_number(section, key).value_or(fallback);
  }

  [[nodiscard]] bool boolean_or(const std::string& section, const std::string& key, bool fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ScenarioError(section + "." + key, "expected a boolean, got '" + *v + "'");
  }

  [[nodiscard]] std::optional<Vector> opt_vector(const std::string& section, const std::string& key,
                                                 Eigen::Index n) const {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    const std::string where = section + "." + key;
    const nlohmann::json j = parse_json(where, *v);
    if (j.is_number()) return Vector::Constant(n, j.get<double>());
    if (j.is_array() && static_cast<Eigen::Index>(j.size()) == n) {
      Vector out(n);
      for (Eigen::Index i = 0; i < n; ++i) out(i) = number_of(where, j[static_cast<std::size_t>(i)]);
      return out;
    }
    throw ScenarioError(where, "expected a number or a list of " + std::to_string(n) + " numbers");
  }

  [[nodiscard]] std::optional<Matrix> opt_matrix(const std::string& section, const std::string& key,
                                                 Eigen::Index n) const {
    const auto v = raw(section, key);
    if (!v) return std::nullopt;
    const std::string where = section + "." + key;
    const nlohmann::json j = parse_json(where, *v);
    if (j.is_number()) return Matrix(j.get<double>() * Matrix::Identity(n, n));
    if (j.is_array() && static_cast<Eigen::Index>(j.size()) == n) {
      if (!j.empty() && j[0].is_array()) {
        Matrix out(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const auto& row = j[static_cast<std::size_t>(i)];
          if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
            throw ScenarioError(where, "matrix rows must have " + std::to_string(n) + " entries");
          }
          for (Eigen::Index k = 0; k < n; ++k) out(i, k) = number_of(where, row[static_cast<std::size_t>(k)]);
        }
        return out;
      }
      Vector diag(n);
      for (Eigen::Index i = 0; i < n; ++i) diag(i) = number_of(where, j[static_cast<std::size_t>(i)]);
      return Matrix(diag.asDiagonal());
    }
    throw ScenarioError(where, "expected a scalar, a diagonal list or " + std::to_string(n) + " rows");
  }

  [[nodiscard]] Matrix matrix(const std::string& section, const std::string& key, Eigen::Index n) const {
    auto m = opt_matrix(section, key, n);
    if (!m) throw ScenarioError(section + "." + key, "required key missing");
    return *m;
  }

  static double parse_number(const std::string& where, const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ScenarioError(where, "expected a number, got '" + text + "'");
    }
    if (used != text.size()) throw ScenarioError(where, "expected a number, got '" + text + "'");
    return value;
  }

  static nlohmann::json parse_json(const std::string& where, const std::string& text) {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
      throw ScenarioError(where, "malformed value '" + text + "'");
    }
  }

  static double number_of(const std::string& where, const nlohmann::json& j) {
    if (!j.is_number()) throw ScenarioError(where, "list entries must be numbers");
    return j.get<double>();
  }

 private:
  const pt::ptree& root_;
};

void check_schema(const pt::ptree& root) {
  for (const auto& [section, body] : root) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (body.empty()) throw ScenarioError(section, "key outside of any section");
      throw ScenarioError(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ScenarioError(section + "." + key, "unknown key");
    }
  }
}

void apply_overrides(pt::ptree& root, const Overrides& overrides) {
  for (const auto& [dotted, value] : overrides) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos) throw ScenarioError(dotted, "override must be section.key");
    const std::string section = dotted.substr(0, dot);
    const std::string key = dotted.substr(dot + 1);
    const auto it = schema().find(section);
    if (it == schema().end() || !it->second.contains(key)) throw ScenarioError(dotted, "unknown key");
    root.put(pt::ptree::path_type(section + "." + key, '.'), value);
  }
}

std::string canonical_dump(const pt::ptree& root) {
  std::map<std::string, std::map<std::string, std::string>> sorted;
  for (const auto& [section, body] : root) {
    for (const auto& [key, value] : body) sorted[section][key] = value.get_value<std::string>();
  }
  std::ostringstream os;
  for (const auto& [section, keys] : sorted) {
    os << '[' << section << "]\n";
    for (const auto& [key, value] : keys) os << key << '=' << value << '\n';
  }
  return os.str();
}

Disturbance read_disturbance(const Reader& r) {
  return {r.number_or("plant", "viscous", 0.0), r.number_or("plant", "disturbance_amplitude", 0.0),
          r.number_or("plant", "disturbance_frequency", 0.0)};
}

PlantSpec read_plant(const Reader& r) {
  const std::string type = r.str("plant", "type");
  if (type == "linear") {
    LinearPlantSpec s;
    s.dim = static_cast<Eigen::Index>(r.number_or("plant", "dim", 1.0));
    if (s.dim < 1) throw ScenarioError("plant.dim", "must be >= 1");
    s.mass = r.number_or("plant", "mass", 1.0);
    s.damping = r.number_or("plant", "damping", 0.0);
    s.stiffness = r.number_or("plant", "stiffness", 0.0);
    s.nominal_mass_scale = r.number_or("plant", "nominal_mass_scale", 1.0);
    return s;
  }
  if (type == "two_link") {
    TwoLinkSpec s;
    TwoLinkParams& p = s.link;
    p.m1 = r.number_or("plant", "m1", p.m1);
    p.m2 = r.number_or("plant", "m2", p.m2);
    p.l1 = r.number_or("plant", "l1", p.l1);
    p.l2 = r.number_or("plant", "l2", p.l2);
    p.lc1 = r.number_or("plant", "lc1", p.lc1);
    p.lc2 = r.number_or("plant", "lc2", p.lc2);
    p.I1 = r.number_or("plant", "I1", p.I1);
    p.I2 = r.number_or("plant", "I2", p.I2);
    p.gravity = r.number_or("plant", "gravity", p.gravity);
    s.nominal_mass_scale = r.number_or("plant", "nominal_mass_scale", 1.0);
    s.disturbance = read_disturbance(r);
    return s;
  }
  if (type == "wmr") {
    WmrSpec s;
    WmrParams& p = s.params;
    p.m = r.number_or("plant", "m", p.m);
    p.d = r.number_or("plant", "d", p.d);
    p.K = r.number_or("plant", "K", p.m * p.d);
    p.I_bar = r.number_or("plant", "I_bar", p.I_bar);
    p.r_bar = r.number_or("plant", "r_bar", p.r_bar);
    p.b = r.number_or("plant", "b", p.b);
    p.I_w = r.number_or("plant", "I_w", p.I_w);
    s.disturbance = read_disturbance(r);
    return s;
  }
  throw ScenarioError("plant.type", "unknown plant type '" + type + "'");
}

Eigen::Index plant_dim(const PlantSpec& spec) {
  if (const auto* lin = std::get_if<LinearPlantSpec>(&spec)) return lin->dim;
  return 2;
}

ControllerSpec read_controller(const Reader& r, Eigen::Index n) {
  ControllerSpec c;
  const std::string type = r.str("controller", "type");
  if (type == "none") c.kind = ControllerSpec::Kind::kNone;
  else if (type == "arolc") c.kind = ControllerSpec::Kind::kArolc;
  else if (type == "pcon") c.kind = ControllerSpec::Kind::kPcon;
  else if (type == "pconf") c.kind = ControllerSpec::Kind::kPconFixed;
  else throw ScenarioError("controller.type", "unknown controller type '" + type + "'");
  c.alpha = r.number_or("controller", "alpha", c.alpha);
  c.epsilon = r.number_or("controller", "epsilon", c.epsilon);
  c.gamma = r.number_or("controller", "gamma", c.gamma);
  c.c_hat_init = r.opt_number("controller", "c_hat_init");
  c.switching = r.boolean_or("controller", "switching", true);
  c.kappa = r.number_or("controller", "kappa", c.kappa);
  c.k_b = r.number_or("controller", "k_b", c.k_b);
  c.vartheta = r.opt_matrix("controller", "vartheta", n);
  c.h_estimate = r.opt_number("controller", "h_estimate");
  return c;
}

GainSet read_gains(const Reader& r, Eigen::Index n) {
  GainSet g;
  g.K1 = r.matrix("gains", "K1", n);
  g.K2 = r.matrix("gains", "K2", n);
  g.Q = r.matrix("gains", "Q", 2 * n);
  g.r = r.number("gains", "r");
  g.beta = r.number("gains", "beta");
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("gains", e.what());
  }
  return g;
}

DelayProfile read_delay(const Reader& r) {
  DelayProfile p;
  try {
    p.kind = DelayProfile::parse_kind(r.str("delay", "profile"));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("delay.profile", e.what());
  }
  if (p.kind == DelayProfile::Kind::kConstant) p = DelayProfile::constant(r.number("delay", "h0"));
  if (p.kind == DelayProfile::Kind::kCustom) {
    p = DelayProfile::custom(r.number("delay", "a"), r.number("delay", "b"), r.number("delay", "omega"));
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("delay", e.what());
  }
  return p;
}

TrajectorySpec read_trajectory(const Reader& r, const PlantSpec& plant, Eigen::Index n) {
  const std::string type = r.str("trajectory", "type");
  if (type == "paper_circle") {
    const auto* wmr = std::get_if<WmrSpec>(&plant);
    if (!wmr) throw ScenarioError("trajectory.type", "paper_circle requires the wmr plant");
    PaperCircle c;
    c.radius = r.number_or("trajectory", "radius", c.radius);
    c.omega = r.number_or("trajectory", "angular_rate", c.omega);
    c.center = {r.number_or("trajectory", "center_x", c.center.x()),
                r.number_or("trajectory", "center_y", c.center.y())};
    c.geometry = wmr->params;
    return c;
  }
  if (type == "paper_literal") {
    PaperLiteral l;
    l.rates = {r.number_or("trajectory", "rate_r", l.rates.x()), r.number_or("trajectory", "rate_l", l.rates.y())};
    return l;
  }
  if (type == "sinusoid") {
    Sinusoid s;
    s.amplitude = r.opt_vector("trajectory", "amplitude", n).value_or(Vector::Zero(n));
    s.omega = r.opt_vector("trajectory", "omega", n).value_or(Vector::Ones(n));
    s.offset = r.opt_vector("trajectory", "offset", n).value_or(Vector::Zero(n));
    s.phase = r.opt_vector("trajectory", "phase", n).value_or(Vector::Zero(n));
    return s;
  }
  if (type == "hold") return HoldPosition{r.opt_vector("trajectory", "q", n).value_or(Vector::Zero(n))};
  throw ScenarioError("trajectory.type", "unknown trajectory type '" + type + "'");
}

PayloadSchedule read_payload(const Reader& r) {
  PayloadSchedule s;
  s.extra_mass = r.number("payload", "extra_mass");
  s.period_on = r.number_or("payload", "period_on", s.period_on);
  s.period_off = r.number_or("payload", "period_off", s.period_off);
  s.random_offsets = r.boolean_or("payload", "random", false);
  s.max_offset = r.number_or("payload", "max_offset", s.max_offset);
  if (const auto raw = r.raw("payload", "offsets")) {
    const nlohmann::json j = Reader::parse_json("payload.offsets", *raw);
    if (!j.is_array()) throw ScenarioError("payload.offsets", "expected a list of [dx, dy] pairs");
    for (const auto& pair : j) {
      if (!pair.is_array() || pair.size() != 2) {
        throw ScenarioError("payload.offsets", "expected a list of [dx, dy] pairs");
      }
      s.offsets.emplace_back(Reader::number_of("payload.offsets", pair[0]),
                             Reader::number_of("payload.offsets", pair[1]));
    }
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("payload", e.what());
  }
  return s;
}

}  // namespace

LoadedScenario parse_scenario(const std::string& text, const Overrides& overrides) {
  pt::ptree root;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, root);
  } catch (const pt::ini_parser_error& e) {
    throw ScenarioError("", std::string("malformed scenario file: ") + e.message() + " (line " +
                                std::to_string(e.line()) + ")");
  }
  check_schema(root);
  apply_overrides(root, overrides);

  const Reader r(root);
  LoadedScenario out;
  Scenario& sc = out.scenario;
  sc.plant = read_plant(r);
  const Eigen::Index n = plant_dim(sc.plant);
  sc.controller = read_controller(r, n);
  if (r.has_section("gains")) sc.gains = read_gains(r, n);
  sc.delay = read_delay(r);
  sc.trajectory = read_trajectory(r, sc.plant, n);
  if (r.has_section("payload")) sc.payload = read_payload(r);

  sc.duration = r.number("sim", "duration");
  if (!(sc.duration > 0.0)) throw ScenarioError("sim.duration", "duration > 0 required");
  sc.dt_integration = r.number_or("sim", "dt", sc.dt_integration);
  sc.dt_control = r.number_or("sim", "control_dt", sc.dt_control);
  const double seed = r.number_or("sim", "seed", 0.0);
  if (seed < 0.0 || seed != std::floor(seed)) throw ScenarioError("sim.seed", "must be a nonnegative integer");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.q0 = r.opt_vector("sim", "q0", n);
  sc.q_dot0 = r.opt_vector("sim", "qdot0", n);

  if (r.has_section("bounds")) {
    BoundInputs b;
    b.c = r.number_or("bounds", "c", b.c);
    b.Gamma = r.number_or("bounds", "Gamma", b.Gamma);
    b.theta_norm = r.number_or("bounds", "theta_norm", b.theta_norm);
    b.c_hat = r.number_or("bounds", "c_hat", b.c_hat);
    b.e0_norm = r.opt_number("bounds", "e0_norm");
    b.c0 = r.opt_number("bounds", "c0");
    out.bounds = b;
  }

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("", e.what());
  }

  out.canonical = canonical_dump(root);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a(out.canonical)));
  out.hash = hex;
  return out;
}

LoadedScenario load_scenario(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  LoadedScenario out = parse_scenario(buf.str(), overrides);
  out.scenario.name = path.stem().string();
  return out;
}

}  // namespace arolc
