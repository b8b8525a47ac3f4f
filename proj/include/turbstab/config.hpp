#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "turbstab/stabilizer.hpp"
#include "turbstab/turbulence_sim.hpp"

namespace turbstab {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resolved run configuration: simulator + stabilizer (flow, regularizer)
/// settings under one flat key=value namespace.
struct RunConfig {
  SimConfig sim;
  StabilizerConfig stab;  // carries flow, regularizer and thread settings
  bool curvelet_requested = false;  // parsed but unimplemented regularizer choice

  /// Applied before running anything that needs a regularizer.
  void reject_curvelet() const;
};

/// Sets one known key; throws config_error on unknown keys or bad values.
void apply_config_key(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses key=value text ('#' comments, blank lines allowed); errors carry
/// the 1-based line number.
void apply_config_text(RunConfig& cfg, std::string_view text);

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Full resolved key=value listing (parseable back), plus a version banner.
std::string render_manifest(const RunConfig& cfg);

}  // namespace turbstab
