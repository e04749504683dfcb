#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "occutime/experiments.hpp"

namespace occutime {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
  std::string name;  // file stem of the CSV
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Output bundle shared by every subcommand.
struct Artifacts {
  std::string command;
  std::map<std::string, std::string> config;
  std::vector<Table> tables;
  std::vector<std::string> flags;
  std::string svg;  // written as plot.svg when non-empty
};

std::string format_cell(const Cell& cell);

// Comma-separated, '.' decimal point, header row, doubles printed with 17
// significant digits. Commas inside string cells are written as ';'.
void write_csv(std::ostream& out, const Table& table);

std::vector<Table> report_tables(const StudyReport& report);

// report.json: command, resolved config, flags and every table as an array
// of row objects. Contains nothing run-dependent.
std::string artifacts_json(const Artifacts& artifacts);

// Log-log plot of RMS error against the coarse step, one series per
// (function, estimator).
std::string convergence_svg(const StudyReport& report);

// Writes report.json, one CSV per table and plot.svg into `dir` (created if
// needed). Returns the written file names.
std::vector<std::string> write_artifacts(const std::filesystem::path& dir,
                                         const Artifacts& artifacts);

std::uint64_t fnv1a64(std::string_view text);

// manifest.txt: config hash, seed, version, runtime and the file list.
void write_manifest(const std::filesystem::path& dir, std::uint64_t config_hash,
                    std::uint64_t seed, double runtime_seconds, int threads,
                    const std::vector<std::string>& files);

}  // namespace occutime
