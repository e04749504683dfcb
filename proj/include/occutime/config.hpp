#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "occutime/experiments.hpp"
#include "occutime/seminorm.hpp"

namespace occutime {

// Raw `[section]` / `key = value` content. Keys are stored as
// "section.key"; `#` starts a comment.
struct ConfigFile {
  std::map<std::string, std::string> entries;
  std::string source = "<string>";
};

ConfigFile parse_config(std::string_view text, std::string source = "<string>");
// ConfigError naming the path when the file cannot be read.
ConfigFile load_config(const std::filesystem::path& path);

// "section.key=value"; replaces or adds the entry.
void apply_override(ConfigFile& file, std::string_view assignment);

struct NormsConfig {
  std::vector<double> orders{1.0};
  bool sobolev = true;
  bool fourier_lebesgue = false;
  SeminormSettings settings;
  // Divergent seminorms become a numerical failure.
  bool require_finite = false;
};

struct SimulateConfig {
  std::size_t paths = 10;  // trajectories written to paths.csv
  std::size_t regularity_paths = 200;
};

struct RunConfig {
  StudyConfig study;
  NormsConfig norms;
  SimulateConfig simulate;
  // Every schema key with its resolved value, "section.key" -> text.
  std::map<std::string, std::string> echo;
};

// Applies defaults, rejects unknown sections/keys and keys that do not apply
// to the chosen process kind, and builds the typed configuration.
RunConfig resolve_config(const ConfigFile& file);

TimeFunction parse_time_function(std::string_view text);
ProcessSpec parse_process(const std::map<std::string, std::string>& keys,
                          double validation_horizon = 1.0);

// Canonical "key = value" rendering of the echo, sorted by key.
std::string render_echo(const std::map<std::string, std::string>& echo);

}  // namespace occutime
