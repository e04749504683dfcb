#include "occutime/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "occutime/config.hpp"
#include "occutime/errors.hpp"
#include "occutime/function_parser.hpp"
#include "occutime/parallel.hpp"
#include "occutime/paths.hpp"
#include "occutime/report_io.hpp"
#include "occutime/seminorm.hpp"

namespace occutime {

namespace {

const std::vector<std::string> kSubcommands{"simulate",   "norms",      "rate-study",
                                            "clt-check",  "efficiency", "diagnostics"};

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Artifacts run_norms(const RunConfig& cfg, bool& failed) {
  Artifacts a;
  Table t{"norms",
          {"function", "norm", "s", "value", "divergent", "tail_slope", "tail_estimate", "exact",
           "method"},
          {}};
  for (const auto& expr : cfg.study.functions) {
    const TestFunction f = parse_function(expr);
    for (const double s : cfg.norms.orders) {
      auto add = [&](const char* norm, const SeminormResult& r) {
        t.rows.push_back({f.name(), std::string(norm), s, r.value, r.divergent, r.tail_slope,
                          r.tail_estimate, r.exact, r.method});
        if (r.divergent) {
          a.flags.push_back(std::string(norm) + " seminorm of " + f.name() + " at s=" +
                            short_number(s) + " diverges");
          if (cfg.norms.require_finite) failed = true;
        }
        if (!r.exact) {
          a.flags.push_back(std::string(norm) + " seminorm of " + f.name() + " at s=" +
                            short_number(s) + " is an upper bound");
        }
      };
      if (cfg.norms.sobolev) add("sobolev", sobolev_seminorm(f, s, cfg.norms.settings));
      if (cfg.norms.fourier_lebesgue) {
        add("fourier_lebesgue", fourier_lebesgue_seminorm(f, s, cfg.norms.settings));
      }
    }
  }
  a.tables.push_back(std::move(t));
  return a;
}

Artifacts run_simulate(const RunConfig& cfg, const std::filesystem::path& dir) {
  const StudyConfig& st = cfg.study;
  if (st.n_list.empty()) throw ConfigError("grid.n must not be empty");
  if (st.refine < 1) throw ConfigError("grid.refine must be at least 1");
  const TimeGrid grid = build_grid(st.horizon, st.n_list.front(), st.refine);
  const PathBundle bundle =
      simulate_paths(st.spec, grid, cfg.simulate.paths, st.master_seed, st.threads);
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "paths.csv", std::ios::binary);
  write_paths_csv(out, bundle);

  Artifacts a;
  if (st.spec->kind() == ProcessKind::kBrownian) return a;
  const RegularityTable reg =
      regularity_probe(st.spec, grid, cfg.simulate.regularity_paths, st.master_seed, st.threads);
  Table t{"regularity", {"lag", "modulus", "stderr"}, {}};
  for (const auto& r : reg.rows) t.rows.push_back({r.lag, r.modulus, r.std_error});
  a.tables.push_back(std::move(t));
  Table s{"regularity_slope", {"slope"}, {}};
  s.rows.push_back({reg.slope ? Cell(*reg.slope) : Cell(std::string("none"))});
  a.tables.push_back(std::move(s));
  return a;
}

StudyKind study_kind(const std::string& sub) {
  if (sub == "rate-study") return StudyKind::kRate;
  if (sub == "clt-check") return StudyKind::kClt;
  if (sub == "efficiency") return StudyKind::kEfficiency;
  return StudyKind::kDiagnostics;
}

void summarize(std::ostream& log, const Artifacts& a) {
  for (const auto& t : a.tables) {
    log << t.name << ": " << t.rows.size() << " rows\n";
  }
  for (const auto& f : a.flags) log << "flag: " << f << "\n";
}

}  // namespace

int run(const CliInvocation& inv, std::ostream& log) {
  try {
    if (std::find(kSubcommands.begin(), kSubcommands.end(), inv.subcommand) ==
        kSubcommands.end()) {
      throw ConfigError("unknown subcommand '" + inv.subcommand + "'");
    }
    ConfigFile file;
    if (inv.config_path) file = load_config(*inv.config_path);
    for (const auto& o : inv.overrides) apply_override(file, o);
    if (inv.seed) file.entries["study.seed"] = std::to_string(*inv.seed);
    RunConfig cfg = resolve_config(file);
    cfg.study.threads = resolve_thread_count(inv.threads);

    const auto start = std::chrono::steady_clock::now();
    bool failed = false;
    Artifacts artifacts;
    if (inv.subcommand == "norms") {
      artifacts = run_norms(cfg, failed);
    } else if (inv.subcommand == "simulate") {
      artifacts = run_simulate(cfg, inv.output_dir);
    } else {
      cfg.study.kind = study_kind(inv.subcommand);
      validate(cfg.study);
      const StudyReport report = run_study(cfg.study);
      artifacts.tables = report_tables(report);
      artifacts.flags = report.flags;
      if (report.kind == StudyKind::kRate) artifacts.svg = convergence_svg(report);
    }
    artifacts.command = inv.subcommand;
    artifacts.config = cfg.echo;
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    auto files = write_artifacts(inv.output_dir, artifacts);
    if (inv.subcommand == "simulate") files.insert(files.begin() + 1, "paths.csv");
    write_manifest(inv.output_dir, fnv1a64(inv.subcommand + "\n" + render_echo(cfg.echo)),
                   cfg.study.master_seed, runtime, cfg.study.threads, files);
    summarize(log, artifacts);
    if (failed) {
      log << "error: a required finite quantity diverged\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ArgumentError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CapabilityError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Occupation-time functional estimation experiments"};
  app.require_subcommand(1);
  CliInvocation inv;
  std::string config, out = "out";
  std::uint64_t seed = 0;
  int threads = 0;
  const std::map<std::string, std::string> about{
      {"simulate", "Write sample paths and the volatility regularity probe"},
      {"norms", "Sobolev / Fourier-Lebesgue seminorms of the test functions"},
      {"rate-study", "RMS error versus n and fitted log-log slopes"},
      {"clt-check", "Normality of rescaled errors at the finest n"},
      {"efficiency", "Estimators against the asymptotic lower bound"},
      {"diagnostics", "Fourier error decomposition, characteristic check, g_n probe"}};
  for (const auto& name : kSubcommands) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config, "Config file");
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Master seed override");
    sub->add_option("--threads", threads, "Worker threads (default: OCCUTIME_THREADS or cores)");
    sub->add_option("--set", inv.overrides, "Override section.key=value")->allow_extra_args(false);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  auto* sub = app.get_subcommands().front();
  inv.subcommand = sub->get_name();
  if (!config.empty()) inv.config_path = config;
  inv.output_dir = out;
  if (sub->count("--seed")) inv.seed = seed;
  if (sub->count("--threads")) inv.threads = threads;
  return run(inv, std::cerr);
}

}  // namespace occutime
