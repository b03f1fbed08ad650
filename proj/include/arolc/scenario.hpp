#pragma once

// Scenario files are INI documents with the sections
//   [plant] [controller] [gains] [delay] [trajectory] [payload] [sim] [bounds]
// Times are in seconds, masses in kg, lengths in metres. Lines starting
// with '#' or ';' are comments. Matrix-valued keys accept a scalar (k·I),
// a JSON list (diagonal) or a JSON list of rows; vector-valued keys accept
// a scalar or a JSON list.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "arolc/simulator.hpp"
#include "arolc/stability.hpp"

namespace arolc {

/// Parse failure; `key()` names the offending "section.key" when known.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string key, const std::string& message);
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Optional inputs to the ultimate-bound report of the `bound` command.
struct BoundInputs {
  double c = 0.0;
  double Gamma = 0.0;
  double theta_norm = 0.0;
  double c_hat = 1.0;
  std::optional<double> e0_norm;
  std::optional<double> c0;
};

struct LoadedScenario {
  Scenario scenario;
  std::optional<BoundInputs> bounds;
  std::string canonical;  // normalized key=value dump after overrides
  std::string hash;       // hex digest of `canonical`
};

/// "section.key" → value, applied on top of the file.
using Overrides = std::map<std::string, std::string>;

[[nodiscard]] LoadedScenario parse_scenario(const std::string& text, const Overrides& overrides = {});
[[nodiscard]] LoadedScenario load_scenario(const std::filesystem::path& path,
                                           const Overrides& overrides = {});

}  // namespace arolc
