// config.hpp — JSON run configuration: physical parameters, ramp, ensemble
// settings, output settings. Unknown keys are rejected so typos cannot
// silently fall back to defaults; the resolved form is echoed into every
// output directory and re-running from that echo reproduces outputs exactly.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "qpl/ensemble.hpp"
#include "qpl/params.hpp"

namespace qpl {

struct OutputsConfig {
  std::string dir = "out";
  bool emit_svg = false;
  int decimation = 50;
};

struct RunConfig {
  SystemParams params{};
  EnsembleMode mode = EnsembleMode::physical;
  int n_traj = 200;
  std::uint64_t seed_base = 1;
  OutputsConfig outputs{};
};

// Parse from JSON text / file. Missing sections and keys take the defaults
// above; unknown keys anywhere raise std::invalid_argument. Physical values
// are validated with the SystemParams rules.
RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Resolved echo: every field explicit, stable key order, round-trippable.
std::string run_config_to_json_text(const RunConfig& config);
void write_run_config(const std::filesystem::path& path, const RunConfig& config);

}  // namespace qpl
