#include <gtest/gtest.h>

#include <cmath>

#include "occutime/errors.hpp"
#include "occutime/experiments.hpp"

using namespace occutime;

namespace {

StudyConfig small_rate(std::vector<std::string> functions) {
  StudyConfig cfg;
  cfg.kind = StudyKind::kRate;
  cfg.spec = std::make_shared<const ProcessSpec>(ProcessSpec::brownian(1, FixedPoint{{0.0}}));
  cfg.functions = std::move(functions);
  cfg.n_list = {8, 16, 32, 64};
  cfg.refine = 16;
  cfg.paths = 300;
  cfg.master_seed = 5;
  return cfg;
}

const ErrorRow& find_error(const StudyReport& r, const std::string& f, EstimatorKind k,
                           std::size_t n) {
  for (const auto& e : r.errors) {
    if (e.function == f && e.estimator == k && e.n == n) return e;
  }
  throw std::runtime_error("missing row");
}

}  // namespace

TEST(StudyConfig, Validation) {
  auto cfg = small_rate({"identity"});
  EXPECT_NO_THROW(validate(cfg));
  auto bad = cfg;
  bad.n_list = {16, 8};
  EXPECT_THROW(validate(bad), ConfigError);
  bad = cfg;
  bad.n_list = {8, 8};
  EXPECT_THROW(validate(bad), ConfigError);
  bad = cfg;
  bad.paths = 99;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = cfg;
  bad.refine = 7;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = cfg;
  bad.t_eval = 1.5;
  EXPECT_THROW(validate(bad), ConfigError);
}

TEST(RateStudy, ConstantIsExactAndFlagged) {
  const StudyReport r = rate_study(small_rate({"constant(2.5)"}));
  for (const auto& e : r.errors) EXPECT_LE(e.max_abs, 1e-12);
  ASSERT_EQ(r.slopes.size(), 2u);
  for (const auto& s : r.slopes) {
    EXPECT_TRUE(s.degenerate);
    EXPECT_FALSE(s.slope.has_value());
  }
  EXPECT_FALSE(r.flags.empty());
}

TEST(RateStudy, IdentitySlopesNearOne) {
  const StudyReport r = rate_study(small_rate({"identity"}));
  for (const auto& s : r.slopes) {
    ASSERT_TRUE(s.slope.has_value());
    EXPECT_NEAR(*s.slope, 1.0, 0.15) << to_string(s.estimator);
    EXPECT_LE(s.ci_low, *s.slope);
    EXPECT_GE(s.ci_high, *s.slope);
  }
}

TEST(RateStudy, RmsNonIncreasingInN) {
  const StudyReport r = rate_study(small_rate({"gaussian_bump", "indicator(0, 1)"}));
  for (const auto& f : {std::string("gaussian_bump"), std::string("indicator(a=0, b=1)")}) {
    for (auto k : {EstimatorKind::kRiemann, EstimatorKind::kTrapezoid}) {
      for (std::size_t n = 8; n < 64; n *= 2) {
        const auto& a = find_error(r, f, k, n);
        const auto& b = find_error(r, f, k, 2 * n);
        EXPECT_LE(b.rms, a.rms + 2 * std::hypot(a.rms_se, b.rms_se)) << f << " n=" << n;
      }
    }
  }
}

TEST(RateStudy, ShiftDoesNotChangeSlopeConclusions) {
  auto plain = small_rate({"gaussian_bump"});
  auto shifted = plain;
  shifted.spec = std::make_shared<const ProcessSpec>(
      ProcessSpec::brownian(1, FixedPoint{{0.0}}, ShiftLaw{0.5}));
  const StudyReport a = rate_study(plain), b = rate_study(shifted);
  for (std::size_t i = 0; i < a.slopes.size(); ++i) {
    const double gap = std::abs(*a.slopes[i].slope - *b.slopes[i].slope);
    EXPECT_LE(gap, 2.0 * std::hypot(a.slopes[i].slope_se, b.slopes[i].slope_se) + 1e-12);
  }
}

TEST(RateStudy, ThreadCountDoesNotChangeResults) {
  auto cfg = small_rate({"gaussian_bump"});
  cfg.per_path = true;
  const StudyReport a = rate_study(cfg);
  cfg.threads = 4;
  const StudyReport b = rate_study(cfg);
  ASSERT_EQ(a.errors.size(), b.errors.size());
  for (std::size_t i = 0; i < a.errors.size(); ++i) EXPECT_EQ(a.errors[i].rms, b.errors[i].rms);
  ASSERT_EQ(a.per_path.size(), b.per_path.size());
  for (std::size_t i = 0; i < a.per_path.size(); ++i) {
    EXPECT_EQ(a.per_path[i].value, b.per_path[i].value);
  }
}

TEST(CltCheck, IdentityIsUnbiasedAndNormal) {
  auto cfg = small_rate({"identity", "quadratic"});
  cfg.kind = StudyKind::kClt;
  cfg.n_list = {64};
  cfg.paths = 800;
  const StudyReport r = clt_check(cfg);
  ASSERT_EQ(r.clt.size(), 2u);
  const CltRow& id = r.clt[0];
  EXPECT_GT(id.ks_p, 0.01);
  EXPECT_LT(std::abs(id.trapezoid_mean), 3 * id.trapezoid_mean_se);
  EXPECT_EQ(id.excluded, 0u);
  const CltRow& quad = r.clt[1];
  EXPECT_NEAR(quad.riemann_mean, 0.5, 3 * quad.riemann_mean_se);
}

TEST(CltCheck, ZeroVarianceExcluded) {
  auto cfg = small_rate({"constant(1)"});
  cfg.kind = StudyKind::kClt;
  cfg.n_list = {16};
  const StudyReport r = clt_check(cfg);
  ASSERT_EQ(r.clt.size(), 1u);
  EXPECT_EQ(r.clt[0].used, 0u);
  EXPECT_EQ(r.clt[0].excluded, cfg.paths);
  EXPECT_FALSE(r.flags.empty());
}

TEST(Efficiency, IdentityConstantsAndOrdering) {
  auto cfg = small_rate({"identity", "gaussian_bump"});
  cfg.kind = StudyKind::kEfficiency;
  cfg.n_list = {32};
  cfg.paths = 1000;
  const StudyReport r = efficiency_study(cfg);
  ASSERT_EQ(r.efficiency.size(), 2u);
  EXPECT_NEAR(r.efficiency[0].lower_bound, std::sqrt(1.0 / 12.0), 1e-14);
  for (const auto& e : r.efficiency) {
    EXPECT_TRUE(e.floor_respected) << e.function;
    EXPECT_TRUE(e.ordering_respected) << e.function;
  }
  const auto& trap = find_error(r, "identity", EstimatorKind::kTrapezoid, 32);
  const auto& bridge = find_error(r, "identity", EstimatorKind::kBridgeConditional, 32);
  EXPECT_NEAR(bridge.rms, trap.rms, 1e-10 * trap.rms);
}

TEST(Efficiency, RequiresBrownian) {
  auto cfg = small_rate({"identity"});
  cfg.kind = StudyKind::kEfficiency;
  cfg.spec = std::make_shared<const ProcessSpec>(1, FixedPoint{{0.0}}, StochVol{});
  EXPECT_THROW(efficiency_study(cfg), CapabilityError);
}

TEST(Diagnostics, TablesPopulated) {
  auto cfg = small_rate({"gaussian_bump"});
  cfg.kind = StudyKind::kDiagnostics;
  cfg.n_list = {16};
  cfg.diagnostics.decomposition_paths = 10;
  cfg.diagnostics.char_paths = 10000;
  cfg.diagnostics.probe_paths = 200;
  const StudyReport r = diagnostics_study(cfg);
  EXPECT_EQ(r.decomposition.size(), 3u);
  for (const auto& d : r.decomposition) {
    EXPECT_LT(d.max_identity_gap, 1e-6);
    EXPECT_LT(d.max_drift_gap, 1e-8);
  }
  for (const auto& c : r.characteristic) {
    EXPECT_NEAR(c.monte_carlo, c.exact, c.tolerance * std::sqrt(10.0));
  }
  ASSERT_TRUE(r.g_probe.has_value());
  EXPECT_TRUE(r.g_probe->bounded);
}

TEST(RunStudy, Dispatches) {
  auto cfg = small_rate({"identity"});
  cfg.kind = StudyKind::kEfficiency;
  cfg.n_list = {16};
  const StudyReport r = run_study(cfg);
  EXPECT_EQ(r.kind, StudyKind::kEfficiency);
  EXPECT_FALSE(r.efficiency.empty());
  EXPECT_GE(r.runtime_seconds, 0.0);
}
