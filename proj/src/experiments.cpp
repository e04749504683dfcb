#include "occutime/experiments.hpp"

#include <chrono>
#include <cmath>

#include "occutime/errors.hpp"
#include "occutime/function_parser.hpp"
#include "occutime/limit_law.hpp"
#include "occutime/parallel.hpp"
#include "occutime/path_eval.hpp"
#include "occutime/rng.hpp"
#include "occutime/stats.hpp"

namespace occutime {

namespace {

constexpr double kExactTolerance = 1e-12;

struct Needs {
  bool limit = false;   // limit-law samples (gradient)
  bool energy = false;  // lower-bound energies (gradient)
};

// Everything a study keeps about one (path, function) pair at one n.
struct PathRecord {
  double reference = 0.0;
  std::vector<double> estimates;  // aligned with cfg.estimators
  LimitSample limit;
  double energy = 0.0;
};

struct Batch {
  TimeGrid grid;
  // records[f][p]
  std::vector<std::vector<PathRecord>> records;
};

double eval_time(const StudyConfig& cfg) { return cfg.t_eval.value_or(cfg.horizon); }

std::vector<TestFunction> parse_all(const StudyConfig& cfg) {
  std::vector<TestFunction> out;
  for (const auto& expr : cfg.functions) {
    TestFunction f = parse_function(expr);
    if (f.dim() != cfg.spec->dim()) {
      throw ConfigError("function '" + expr + "' has dimension " + std::to_string(f.dim()) +
                        " but the process has dimension " + std::to_string(cfg.spec->dim()));
    }
    if (f.is_complex()) {
      throw ConfigError("function '" + expr + "' is complex-valued; use the diagnostics study");
    }
    out.push_back(std::move(f));
  }
  return out;
}

Batch run_batch(const StudyConfig& cfg, const std::vector<TestFunction>& functions,
                std::size_t n, Needs needs) {
  Batch batch{TimeGrid(cfg.horizon, n, cfg.refine), {}};
  const TimeGrid& grid = batch.grid;
  const double t = eval_time(cfg);
  batch.records.assign(functions.size(), std::vector<PathRecord>(cfg.paths));
  const bool gradients = needs.limit || needs.energy;

  parallel_for(cfg.paths, cfg.threads, [&](std::size_t p) {
    const Path path = simulate_path(cfg.spec, grid, cfg.master_seed, p, false);
    std::optional<CoarseObservations> obs;
    for (std::size_t fi = 0; fi < functions.size(); ++fi) {
      const TestFunction& f = functions[fi];
      const auto eval = eval_on_path(f, path, NodeSet::kFine, gradients);
      const auto coarse = coarse_subsample(eval.values, grid);
      PathRecord& rec = batch.records[fi][p];
      rec.reference = reference_value(eval.values, grid, t);
      rec.estimates.resize(cfg.estimators.size());
      for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
        switch (cfg.estimators[e]) {
          case EstimatorKind::kRiemann: rec.estimates[e] = riemann_estimate(coarse, grid, t); break;
          case EstimatorKind::kTrapezoid:
            rec.estimates[e] = trapezoid_estimate(coarse, grid, t);
            break;
          case EstimatorKind::kBridgeConditional:
            if (!obs) obs.emplace(CoarseObservations::from_path(path));
            rec.estimates[e] = bridge_conditional_estimate(f, *obs, t, cfg.quadrature);
            break;
          case EstimatorKind::kReference: rec.estimates[e] = rec.reference; break;
        }
      }
      if (needs.limit) rec.limit = simulate_limit(f, path, eval.gradients);
      if (needs.energy) rec.energy = gradient_energy(eval.gradients, grid, path.dim());
    }
  });
  return batch;
}

std::vector<double> errors_of(const std::vector<PathRecord>& recs, std::size_t e) {
  std::vector<double> out(recs.size());
  for (std::size_t p = 0; p < recs.size(); ++p) out[p] = recs[p].reference - recs[p].estimates[e];
  return out;
}

ErrorRow error_row(const std::string& fname, EstimatorKind kind, const TimeGrid& grid,
                   const std::vector<double>& errors) {
  ErrorRow row;
  row.function = fname;
  row.estimator = kind;
  row.n = grid.coarse_count();
  row.delta = grid.coarse_step();
  const auto r = stats::rms(errors);
  const auto m = stats::mean(errors);
  row.rms = r.value;
  row.rms_se = r.std_error;
  row.scaled_rms = r.value / row.delta;
  row.scaled_rms_se = r.std_error / row.delta;
  row.mean = m.value;
  row.mean_se = m.std_error;
  for (double e : errors) row.max_abs = std::max(row.max_abs, std::abs(e));
  row.paths = errors.size();
  return row;
}

void collect_per_path(const StudyConfig& cfg, const std::vector<TestFunction>& functions,
                      const Batch& batch, StudyReport& report) {
  if (!cfg.per_path) return;
  const double t = eval_time(cfg);
  for (std::size_t fi = 0; fi < functions.size(); ++fi) {
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      for (std::size_t p = 0; p < cfg.paths; ++p) {
        const PathRecord& rec = batch.records[fi][p];
        report.per_path.push_back({p, functions[fi].name(), cfg.estimators[e],
                                   batch.grid.coarse_count(), t, rec.estimates[e],
                                   rec.reference, rec.reference - rec.estimates[e]});
      }
    }
  }
}

void add_error_rows(const StudyConfig& cfg, const std::vector<TestFunction>& functions,
                    const Batch& batch, StudyReport& report) {
  for (std::size_t fi = 0; fi < functions.size(); ++fi) {
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
      report.errors.push_back(error_row(functions[fi].name(), cfg.estimators[e], batch.grid,
                                        errors_of(batch.records[fi], e)));
    }
  }
  collect_per_path(cfg, functions, batch, report);
}

const ErrorRow* find_row(const StudyReport& report, const std::string& fname,
                         EstimatorKind kind, std::size_t n) {
  for (const auto& row : report.errors) {
    if (row.function == fname && row.estimator == kind && row.n == n) return &row;
  }
  return nullptr;
}

void require_gradients(const std::vector<TestFunction>& functions, const char* study) {
  for (const auto& f : functions) {
    if (!f.has_gradient()) {
      throw CapabilityError(std::string(study) + " needs a gradient; " + f.name() + " has none");
    }
  }
}

StudyReport start_report(const StudyConfig& cfg, StudyKind kind) {
  validate(cfg);
  StudyReport report;
  report.kind = kind;
  return report;
}

}  // namespace

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::kRate: return "rate";
    case StudyKind::kClt: return "clt";
    case StudyKind::kEfficiency: return "efficiency";
    case StudyKind::kDiagnostics: return "diagnostics";
  }
  return "unknown";
}

void validate(const StudyConfig& cfg) {
  if (!cfg.spec) throw ConfigError("study has no process spec");
  if (!(cfg.horizon > 0.0)) throw ConfigError("grid.horizon must be positive");
  if (cfg.n_list.empty()) throw ConfigError("grid.n must list at least one coarse count");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1) throw ConfigError("grid.n entries must be >= 1");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) {
      throw ConfigError("grid.n must be strictly increasing");
    }
  }
  if (cfg.paths < 100) throw ConfigError("study.paths must be >= 100");
  if (cfg.refine < 8) {
    throw ConfigError("grid.refine = " + std::to_string(cfg.refine) +
                      " is too coarse for the reference value (need >= 8)");
  }
  if (cfg.functions.empty()) throw ConfigError("study.function must name a function");
  if (cfg.estimators.empty()) throw ConfigError("study.estimators must not be empty");
  if (cfg.t_eval && !(*cfg.t_eval > 0.0 && *cfg.t_eval <= cfg.horizon)) {
    throw ConfigError("grid.t_eval must lie in (0, horizon]");
  }
}

StudyReport rate_study(const StudyConfig& cfg) {
  StudyReport report = start_report(cfg, StudyKind::kRate);
  const auto functions = parse_all(cfg);
  for (std::size_t n : cfg.n_list) {
    const Batch batch = run_batch(cfg, functions, n, {});
    add_error_rows(cfg, functions, batch, report);
  }

  for (const auto& f : functions) {
    for (EstimatorKind kind : cfg.estimators) {
      SlopeRow slope;
      slope.function = f.name();
      slope.estimator = kind;
      std::vector<double> x, y, se;
      bool exact = true;
      for (std::size_t n : cfg.n_list) {
        const ErrorRow* row = find_row(report, f.name(), kind, n);
        if (row->max_abs > kExactTolerance) exact = false;
        if (row->rms > 0.0) {
          x.push_back(std::log(row->delta));
          y.push_back(std::log(row->rms));
          se.push_back(std::max(row->rms_se / row->rms, 1e-12));
        }
      }
      if (exact) {
        slope.degenerate = true;
        report.flags.push_back("degenerate: " + f.name() + "/" + to_string(kind) +
                               " is exact up to floating noise; slope undefined");
      } else if (auto fit = stats::fit_log_log_slope(x, y, se)) {
        slope.slope = fit->slope;
        slope.slope_se = fit->slope_se;
        slope.ci_low = fit->ci_low;
        slope.ci_high = fit->ci_high;
        slope.lack_of_fit_p = fit->lack_of_fit_p;
        slope.points_used = fit->points_used;
        slope.points_dropped = fit->points_dropped;
        if (fit->points_dropped > 0) {
          report.flags.push_back("slope " + f.name() + "/" + to_string(kind) + ": dropped " +
                                 std::to_string(fit->points_dropped) +
                                 " smallest n after lack-of-fit rejection");
        }
      }
      report.slopes.push_back(slope);
    }
  }
  return report;
}

StudyReport clt_check(const StudyConfig& base) {
  StudyConfig cfg = base;
  cfg.estimators = {EstimatorKind::kRiemann, EstimatorKind::kTrapezoid};
  if (cfg.t_eval && *cfg.t_eval != cfg.horizon) {
    throw ConfigError("clt study evaluates at the horizon; remove grid.t_eval");
  }
  StudyReport report = start_report(cfg, StudyKind::kClt);
  const auto functions = parse_all(cfg);
  require_gradients(functions, "clt study");

  for (std::size_t n : cfg.n_list) {
    const Batch batch = run_batch(cfg, functions, n, {.limit = true});
    add_error_rows(cfg, functions, batch, report);
    const double inv_delta = 1.0 / batch.grid.coarse_step();
    for (std::size_t fi = 0; fi < functions.size(); ++fi) {
      const auto& recs = batch.records[fi];
      CltRow row;
      row.function = functions[fi].name();
      row.n = n;
      std::vector<double> z, z_riemann, trap, riem, bias, debiased, cond;
      for (const auto& rec : recs) {
        const double e_riem = inv_delta * (rec.reference - rec.estimates[0]);
        const double e_trap = inv_delta * (rec.reference - rec.estimates[1]);
        trap.push_back(e_trap);
        riem.push_back(e_riem);
        bias.push_back(rec.limit.bias_part);
        debiased.push_back(e_riem - rec.limit.bias_part);
        cond.push_back(rec.limit.conditional_variance);
        if (rec.limit.conditional_variance > 0.0) {
          const double sd = std::sqrt(rec.limit.conditional_variance);
          z.push_back(e_trap / sd);
          z_riemann.push_back((e_riem - rec.limit.bias_part) / sd);
        }
      }
      row.used = z.size();
      row.excluded = recs.size() - z.size();
      if (!z.empty()) {
        const auto ks = stats::ks_test_standard_normal(z);
        row.ks_statistic = ks.statistic;
        row.ks_p = ks.p_value;
        const auto ks_r = stats::ks_test_standard_normal(z_riemann);
        row.riemann_ks_statistic = ks_r.statistic;
        row.riemann_ks_p = ks_r.p_value;
      }
      auto set = [](const std::vector<double>& xs, double& v, double& se) {
        const auto m = stats::mean(xs);
        v = m.value;
        se = m.std_error;
      };
      set(trap, row.trapezoid_mean, row.trapezoid_mean_se);
      set(riem, row.riemann_mean, row.riemann_mean_se);
      set(bias, row.bias_mean, row.bias_mean_se);
      set(debiased, row.debiased_mean, row.debiased_mean_se);
      set(cond, row.mean_conditional_variance, row.mean_conditional_variance_se);
      if (row.excluded > 0) {
        report.flags.push_back("clt " + row.function + " n=" + std::to_string(n) + ": " +
                               std::to_string(row.excluded) +
                               " paths with zero conditional variance excluded");
      }
      report.clt.push_back(row);
    }
  }
  return report;
}

StudyReport efficiency_study(const StudyConfig& base) {
  StudyConfig cfg = base;
  if (!cfg.spec || cfg.spec->kind() != ProcessKind::kBrownian) {
    throw CapabilityError("efficiency study needs a Brownian process spec");
  }
  cfg.estimators = {EstimatorKind::kRiemann, EstimatorKind::kTrapezoid,
                    EstimatorKind::kBridgeConditional};
  StudyReport report = start_report(cfg, StudyKind::kEfficiency);
  const auto functions = parse_all(cfg);
  require_gradients(functions, "efficiency study");

  for (std::size_t n : cfg.n_list) {
    const Batch batch = run_batch(cfg, functions, n, {.energy = true});
    add_error_rows(cfg, functions, batch, report);
    for (std::size_t fi = 0; fi < functions.size(); ++fi) {
      std::vector<double> energies;
      for (const auto& rec : batch.records[fi]) energies.push_back(rec.energy);
      const LowerBound lb = lower_bound_from_energies(energies);
      const std::string fname = functions[fi].name();
      const ErrorRow* riem = find_row(report, fname, EstimatorKind::kRiemann, n);
      const ErrorRow* trap = find_row(report, fname, EstimatorKind::kTrapezoid, n);
      const ErrorRow* bridge = find_row(report, fname, EstimatorKind::kBridgeConditional, n);

      EfficiencyRow row;
      row.function = fname;
      row.n = n;
      row.lower_bound = lb.value;
      row.lower_bound_se = lb.std_error;
      if (lb.value > 0.0) {
        row.trapezoid_ratio = trap->scaled_rms / lb.value;
        const double rel_a = trap->scaled_rms > 0.0 ? trap->scaled_rms_se / trap->scaled_rms : 0.0;
        const double rel_b = lb.std_error / lb.value;
        row.trapezoid_ratio_se = row.trapezoid_ratio * std::hypot(rel_a, rel_b);
      }
      for (const ErrorRow* r : {riem, trap, bridge}) {
        const double se = std::hypot(r->scaled_rms_se, lb.std_error);
        if (r->scaled_rms < lb.value - 3.0 * se) row.floor_respected = false;
      }
      row.ordering_respected = bridge->rms <= trap->rms + 2.0 * trap->rms_se &&
                               trap->rms <= riem->rms + 2.0 * riem->rms_se;
      if (!row.floor_respected) {
        report.flags.push_back("efficiency " + fname + " n=" + std::to_string(n) +
                               ": an estimator fell below the lower bound");
      }
      if (!row.ordering_respected) {
        report.flags.push_back("efficiency " + fname + " n=" + std::to_string(n) +
                               ": RMS ordering bridge <= trapezoid <= riemann violated");
      }
      report.efficiency.push_back(row);
    }
  }
  return report;
}

StudyReport diagnostics_study(const StudyConfig& cfg) {
  if (!cfg.spec) throw ConfigError("study has no process spec");
  if (!cfg.spec->is_gaussian()) {
    throw CapabilityError("diagnostics need a Brownian or deterministic Gaussian spec");
  }
  if (cfg.n_list.empty() || cfg.refine < 8) {
    throw ConfigError("diagnostics need grid.n and grid.refine >= 8");
  }
  StudyReport report;
  report.kind = StudyKind::kDiagnostics;
  const DiagnosticsSettings& ds = cfg.diagnostics;
  const auto d = static_cast<std::size_t>(cfg.spec->dim());

  const TimeGrid grid(cfg.horizon, cfg.n_list.front(), cfg.refine);
  const double t = grid.coarse_time(grid.coarse_index_floor(eval_time(cfg)));
  for (double u : ds.frequencies) {
    std::vector<double> freq(d, 0.0);
    freq[0] = u;
    const TestFunction f = complex_exponential(freq);
    std::vector<double> gap_id(ds.decomposition_paths), gap_drift(ds.decomposition_paths);
    std::vector<double> m_re(ds.decomposition_paths), m_im(ds.decomposition_paths);
    parallel_for(ds.decomposition_paths, cfg.threads, [&](std::size_t p) {
      const Path path = simulate_path(cfg.spec, grid, cfg.master_seed, p, false);
      const auto trace = decompose(f, path, t);
      double g1 = 0.0, g2 = 0.0;
      for (const auto& row : trace.rows) {
        g1 = std::max(g1, std::abs(row.martingale + row.drift - row.realized_error));
        g2 = std::max(g2, std::abs(row.drift - row.endpoint - row.drift_part -
                                   row.diffusion_part));
      }
      gap_id[p] = g1;
      gap_drift[p] = g2;
      const cplx m = trace.rows.empty() ? cplx{} : trace.rows.back().martingale;
      m_re[p] = m.real();
      m_im[p] = m.imag();
    });
    DecompositionRowSummary row;
    row.u = u;
    row.paths = ds.decomposition_paths;
    for (std::size_t p = 0; p < ds.decomposition_paths; ++p) {
      row.max_identity_gap = std::max(row.max_identity_gap, gap_id[p]);
      row.max_drift_gap = std::max(row.max_drift_gap, gap_drift[p]);
    }
    const auto re = stats::mean(m_re);
    const auto im = stats::mean(m_im);
    row.martingale_mean_re = re.value;
    row.martingale_mean_re_se = re.std_error;
    row.martingale_mean_im = im.value;
    row.martingale_mean_im_se = im.std_error;
    report.decomposition.push_back(row);
  }

  // Characteristic function of the increment over [0, lag].
  const TimeGrid lag_grid(ds.char_lag, 1, 1);
  std::vector<double> increments(ds.char_paths);
  parallel_for(ds.char_paths, cfg.threads, [&](std::size_t p) {
    const Path path = simulate_path(cfg.spec, lag_grid, cfg.master_seed, p, false);
    increments[p] = path.state(1)[0] - path.state(0)[0];
  });
  for (double u : ds.frequencies) {
    std::vector<double> freq(d, 0.0);
    freq[0] = u;
    double re = 0.0, im = 0.0;
    for (double x : increments) {
      re += std::cos(u * x);
      im += std::sin(u * x);
    }
    const double count = static_cast<double>(ds.char_paths);
    report.characteristic.push_back({u, ds.char_lag, char_increment(freq, *cfg.spec, 0.0, ds.char_lag),
                                     std::hypot(re, im) / count, 3.0 / std::sqrt(count)});
  }

  GProbeSettings gs;
  gs.horizon = cfg.horizon;
  gs.smoothness = ds.probe_smoothness;
  gs.paths = ds.probe_paths;
  gs.seed = cfg.master_seed;
  gs.threads = cfg.threads;
  report.g_probe = g_decay_probe(ds.probe_frequencies, ds.probe_n, cfg.spec, gs);
  for (const auto& trend : report.g_probe->trends) {
    if (trend.u != 0.0 && !trend.decreasing) {
      report.flags.push_back("g probe: no significant decrease in n at u = " +
                             std::to_string(trend.u));
    }
  }
  return report;
}

StudyReport run_study(const StudyConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  StudyReport report;
  switch (cfg.kind) {
    case StudyKind::kRate: report = rate_study(cfg); break;
    case StudyKind::kClt: report = clt_check(cfg); break;
    case StudyKind::kEfficiency: report = efficiency_study(cfg); break;
    case StudyKind::kDiagnostics: report = diagnostics_study(cfg); break;
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace occutime
