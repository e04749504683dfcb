#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "occutime/estimators.hpp"
#include "occutime/fourier_diagnostics.hpp"
#include "occutime/process.hpp"
#include "occutime/test_function.hpp"

namespace occutime {

enum class StudyKind { kRate, kClt, kEfficiency, kDiagnostics };

std::string to_string(StudyKind kind);

struct DiagnosticsSettings {
  std::vector<double> frequencies{1.0, 2.0, 5.0};
  std::size_t decomposition_paths = 100;
  std::vector<std::size_t> probe_n{8, 16, 32, 64, 128, 256};
  std::vector<double> probe_frequencies{0.0, 1.0, 3.0, 10.0};
  std::size_t probe_paths = 400;
  double probe_smoothness = 1.0;
  std::size_t char_paths = 100000;
  double char_lag = 0.5;
};

struct StudyConfig {
  StudyKind kind = StudyKind::kRate;
  std::shared_ptr<const ProcessSpec> spec;
  // Function expressions; all functions share the same simulated paths.
  std::vector<std::string> functions{"gaussian_bump"};
  double horizon = 1.0;
  std::vector<std::size_t> n_list{16, 32, 64, 128, 256, 512};
  std::size_t refine = 64;
  std::size_t paths = 1000;
  std::uint64_t master_seed = 1;
  std::vector<EstimatorKind> estimators{EstimatorKind::kRiemann, EstimatorKind::kTrapezoid};
  std::optional<double> t_eval;  // default: horizon
  BridgeQuadrature quadrature;
  int threads = 1;
  // Keep per-path estimates for CSV export.
  bool per_path = false;
  DiagnosticsSettings diagnostics;
};

// Throws ConfigError when the configuration violates the study contract
// (n_list not strictly increasing, P < 100, m < 8, ...).
void validate(const StudyConfig& cfg);

struct ErrorRow {
  std::string function;
  EstimatorKind estimator = EstimatorKind::kRiemann;
  std::size_t n = 0;
  double delta = 0.0;
  double rms = 0.0, rms_se = 0.0;
  double scaled_rms = 0.0, scaled_rms_se = 0.0;  // Delta^{-1} RMS
  double mean = 0.0, mean_se = 0.0;
  double max_abs = 0.0;
  std::size_t paths = 0;
};

struct SlopeRow {
  std::string function;
  EstimatorKind estimator = EstimatorKind::kRiemann;
  // Empty when every error is at floating-point noise (exact estimator).
  std::optional<double> slope;
  double slope_se = 0.0, ci_low = 0.0, ci_high = 0.0;
  double lack_of_fit_p = 1.0;
  std::size_t points_used = 0, points_dropped = 0;
  bool degenerate = false;
};

struct CltRow {
  std::string function;
  std::size_t n = 0;
  double ks_statistic = 0.0, ks_p = 1.0;
  std::size_t used = 0, excluded = 0;
  double trapezoid_mean = 0.0, trapezoid_mean_se = 0.0;  // Delta^{-1}(Gamma - Theta)
  double riemann_mean = 0.0, riemann_mean_se = 0.0;      // Delta^{-1}(Gamma - Gamma^)
  double bias_mean = 0.0, bias_mean_se = 0.0;            // (f(X_T) - f(X_0)) / 2
  double debiased_mean = 0.0, debiased_mean_se = 0.0;    // paired Riemann minus bias
  double riemann_ks_statistic = 0.0, riemann_ks_p = 1.0;
  double mean_conditional_variance = 0.0, mean_conditional_variance_se = 0.0;
};

struct EfficiencyRow {
  std::string function;
  std::size_t n = 0;
  double lower_bound = 0.0, lower_bound_se = 0.0;
  double trapezoid_ratio = 0.0, trapezoid_ratio_se = 0.0;  // scaled RMS / bound
  bool floor_respected = true;  // no scaled RMS below bound - 3 se
  bool ordering_respected = true;
};

struct DecompositionRowSummary {
  double u = 0.0;
  std::size_t paths = 0;
  double max_identity_gap = 0.0;  // |M + D - (Gamma - Gamma^)|
  double max_drift_gap = 0.0;     // |(D - E) - (F1 + F2)|
  double martingale_mean_re = 0.0, martingale_mean_re_se = 0.0;
  double martingale_mean_im = 0.0, martingale_mean_im_se = 0.0;
};

struct CharRow {
  double u = 0.0;
  double lag = 0.0;
  double exact = 0.0;
  double monte_carlo = 0.0;
  double tolerance = 0.0;  // 3 / sqrt(paths)
};

struct PathEstimateRow {
  std::size_t path_id = 0;
  std::string function;
  EstimatorKind estimator = EstimatorKind::kRiemann;
  std::size_t n = 0;
  double t = 0.0;
  double value = 0.0, reference = 0.0, error = 0.0;
};

struct StudyReport {
  StudyKind kind = StudyKind::kRate;
  std::vector<ErrorRow> errors;
  std::vector<SlopeRow> slopes;
  std::vector<CltRow> clt;
  std::vector<EfficiencyRow> efficiency;
  std::vector<DecompositionRowSummary> decomposition;
  std::vector<CharRow> characteristic;
  std::optional<GProbeTable> g_probe;
  std::vector<PathEstimateRow> per_path;
  std::vector<std::string> flags;
  std::map<std::string, std::string> config;  // resolved configuration echo
  double runtime_seconds = 0.0;
};

StudyReport rate_study(const StudyConfig& cfg);
StudyReport clt_check(const StudyConfig& cfg);
StudyReport efficiency_study(const StudyConfig& cfg);
StudyReport diagnostics_study(const StudyConfig& cfg);

// Dispatches on cfg.kind.
StudyReport run_study(const StudyConfig& cfg);

}  // namespace occutime
