#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace occutime {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

struct CliInvocation {
  // simulate, norms, rate-study, clt-check, efficiency or diagnostics.
  std::string subcommand;
  std::optional<std::filesystem::path> config_path;  // defaults only when absent
  std::filesystem::path output_dir = "out";
  std::vector<std::string> overrides;  // "section.key=value"
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

// Runs one subcommand and writes report.json, the CSV tables and
// manifest.txt into output_dir. Messages go to `log`.
int run(const CliInvocation& invocation, std::ostream& log);

// argv front end.
int run_cli(int argc, char** argv);

}  // namespace occutime
