#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gchlab/audit.hpp"
#include "gchlab/littlewood_paley.hpp"

using namespace gchlab;

TEST(Partition, MollifiedStepIsMonotoneAndSaturates) {
  EXPECT_EQ(detail::mollified_step(-1.0), 0.0);
  EXPECT_EQ(detail::mollified_step(1.0), 1.0);
  EXPECT_NEAR(detail::mollified_step(0.0), 0.5, 1e-14);
  double prev = 0.0;
  for (double t = -1.0; t <= 1.0; t += 0.01) {
    const double v = detail::mollified_step(t);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
  // Symmetry s(t) + s(-t) = 1.
  for (double t : {0.1, 0.37, 0.8}) EXPECT_NEAR(detail::mollified_step(t) + detail::mollified_step(-t), 1.0, 1e-14);
}

TEST(Partition, LowProfileSupport) {
  EXPECT_EQ(detail::low_profile(0.0), 1.0);
  EXPECT_EQ(detail::low_profile(0.75), 1.0);
  EXPECT_EQ(detail::low_profile(4.0 / 3.0), 0.0);
  EXPECT_EQ(detail::low_profile(2.0), 0.0);
  const double mid = detail::low_profile(1.0);
  EXPECT_GT(mid, 0.0);
  EXPECT_LT(mid, 1.0);
}

TEST(Partition, MultipliersSumToOneAndSquaresLieInHalfOne) {
  for (std::size_t n : {64u, 512u, 4096u}) {
    const auto P = build_partition(Grid1D(40.0, n));
    const auto b = partition_bounds(P);
    EXPECT_LT(b.max_sum_defect, 1e-14) << n;
    EXPECT_GE(b.min_sq, 0.5 - 1e-15) << n;
    EXPECT_LE(b.max_sq, 1.0 + 1e-15) << n;
  }
}

TEST(Partition, BlockSupports) {
  const Grid1D g(std::numbers::pi, 256);
  const auto P = build_partition(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = std::abs(g.wavenumber(i));
    if (xi >= 4.0 / 3.0) {
      EXPECT_EQ(P.chi[i], 0.0);
    }
    for (int j = 0; j <= P.j_max; ++j) {
      const double r = std::ldexp(xi, -j);
      if (r <= 0.75 || r >= 8.0 / 3.0) {
        EXPECT_EQ(P.phi[j][i], 0.0) << j << " " << xi;
      }
    }
  }
  EXPECT_EQ(P.multiplier(-2), std::vector<double>(g.size(), 0.0));
  EXPECT_EQ(P.multiplier(P.j_max + 1), std::vector<double>(g.size(), 0.0));
}

TEST(Partition, TopBlockReachesNyquist) {
  const Grid1D g(std::numbers::pi, 256);  // Nyquist wavenumber 128
  const auto P = build_partition(g);
  EXPECT_LT(0.75 * std::ldexp(1.0, P.j_max), g.nyquist_wavenumber());
  EXPECT_GE(0.75 * std::ldexp(1.0, P.j_max + 1), g.nyquist_wavenumber());
}

TEST(Partition, ReconstructionIsExact) {
  const Grid1D g(10.0, 1024);
  const auto P = build_partition(g);
  CorpusSpec spec;
  spec.count = 20;
  spec.seed = 5;
  for (const auto& f : make_corpus(spec, g)) EXPECT_LE(reconstruction_error(f, P), 1e-12);
  spec.kind = CorpusKind::gaussian_mix;
  for (const auto& f : make_corpus(spec, g)) EXPECT_LE(reconstruction_error(f, P), 1e-12);
}

TEST(Partition, LowCutoffTelescopes) {
  const Grid1D g(10.0, 512);
  const auto P = build_partition(g);
  const RealField f = sample(g, [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); });
  for (int j = 0; j <= P.j_max; ++j) {
    const RealField lhs = low_cutoff(f, j + 1, P) - low_cutoff(f, j, P);
    EXPECT_LT(max_abs(lhs - dyadic_block(f, j, P)), 1e-13) << j;
  }
  EXPECT_LT(max_abs(low_cutoff(f, P.j_max + 1, P) - f), 1e-13);
  EXPECT_THROW(low_cutoff(f, -1, P), PreconditionError);
  EXPECT_EQ(max_abs(dyadic_block(f, -2, P)), 0.0);
}

TEST(Partition, GridMismatchIsRejected) {
  const auto P = build_partition(Grid1D(10.0, 256));
  const RealField f(Grid1D(10.0, 512));
  EXPECT_THROW(dyadic_block(f, 0, P), ConfigError);
}

TEST(Besov, SingleModeRatioBounds) {
  const Grid1D g(std::numbers::pi, 512);
  const auto P = build_partition(g);
  for (std::size_t j = 1; j < g.size() / 2; ++j) {
    const double k = g.wavenumber(j);
    const RealField f = sample(g, [&](double x) { return std::sin(k * x); });
    const double ratio = besov_norm(f, {0.0, 2.0, 2.0}, P) / l2_norm(f);
    EXPECT_GE(ratio, std::sqrt(0.5) - 1e-12) << k;
    EXPECT_LE(ratio, 1.0 + 1e-12) << k;
  }
}

TEST(Besov, ParsevalPathMatchesPhysicalBlocks) {
  const Grid1D g(8.0, 512);
  const auto P = build_partition(g);
  const RealField f = sample(g, [](double x) { return std::exp(-x * x / 2.0) * (1.0 + std::sin(5.0 * x)); });
  const auto fast = block_norms(f, 2.0, P);
  for (int j = -1; j <= P.j_max; ++j) EXPECT_NEAR(fast[j + 1], l2_norm(dyadic_block(f, j, P)), 1e-12);
}

TEST(Besov, SupremumAndSumVariants) {
  const Grid1D g(8.0, 256);
  const auto P = build_partition(g);
  const RealField f = sample(g, [](double x) { return std::exp(-x * x); });
  const double inf = std::numeric_limits<double>::infinity();
  const double b22 = besov_norm(f, {1.0, 2.0, 2.0}, P);
  const double b2inf = besov_norm(f, {1.0, 2.0, inf}, P);
  const double b21 = besov_norm(f, {1.0, 2.0, 1.0}, P);
  EXPECT_LE(b2inf, b22);
  EXPECT_LE(b22, b21);
  EXPECT_THROW(besov_norm(f, {1.0, 0.5, 2.0}, P), ConfigError);
}

TEST(Besov, EquivalentToSobolevNorm) {
  // B^s_{2,2} and H^s are equivalent with constants depending on s only.
  const Grid1D g(10.0, 1024);
  const auto P = build_partition(g);
  CorpusSpec spec;
  spec.count = 30;
  for (double s : {0.0, 1.0, 1.5}) {
    double lo = 1e300, hi = 0.0;
    for (const auto& f : make_corpus(spec, g)) {
      const double r = besov_norm(f, {s, 2.0, 2.0}, P) / sobolev_norm(f, s);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    EXPECT_GT(lo, 0.2) << s;
    EXPECT_LT(hi, 5.0) << s;
  }
}

TEST(Audit, InterpolationHoldsWithConstantOne) {
  const Grid1D g(std::numbers::pi, 512);
  for (auto kind : {CorpusKind::bandlimited, CorpusKind::gaussian_mix}) {
    CorpusSpec spec;
    spec.kind = kind;
    spec.count = 100;
    spec.seed = 2024;
    const auto rep = inequality_audit(make_corpus(spec, g), AuditKind::interpolation);
    EXPECT_TRUE(rep.hard);
    EXPECT_TRUE(rep.passed);
    EXPECT_LE(rep.fitted_constant, 1.0 + 1e-12);
    EXPECT_EQ(rep.ratios.size(), 100u);
  }
}

TEST(Audit, CorpusIsReproducibleBySeed) {
  const Grid1D g(5.0, 256);
  CorpusSpec a;
  a.count = 5;
  a.seed = 9;
  const auto c1 = make_corpus(a, g), c2 = make_corpus(a, g);
  for (std::size_t i = 0; i < c1.size(); ++i) EXPECT_EQ(c1[i].values, c2[i].values);
  a.seed = 10;
  EXPECT_NE(make_corpus(a, g)[0].values, c1[0].values);
}

TEST(Audit, RefinementResamplesTheSameFunctions) {
  const Grid1D g(5.0, 256);
  CorpusSpec a;
  a.count = 3;
  const auto coarse = make_corpus(a, g), fine = make_corpus(a, g.refined());
  for (std::size_t q = 0; q < coarse.size(); ++q)
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(coarse[q][i], fine[q][2 * i], 1e-12);
}

TEST(Audit, FittedConstantsAreFiniteAndStable) {
  const Grid1D g(std::numbers::pi, 256);
  CorpusSpec spec;
  spec.count = 30;
  spec.max_mode = 16;
  for (auto k : {AuditKind::embedding, AuditKind::algebra, AuditKind::morse, AuditKind::kato_ponce,
                 AuditKind::monotonicity, AuditKind::besov_sobolev}) {
    const auto rep = refinement_audit(spec, g, k);
    EXPECT_TRUE(std::isfinite(rep.fitted_constant)) << rep.id;
    EXPECT_GT(rep.fitted_constant, 0.0) << rep.id;
    EXPECT_FALSE(rep.hard) << rep.id;
    EXPECT_TRUE(rep.passed) << rep.id << " ratio " << rep.refinement_ratio;
  }
}

TEST(Audit, NamesRoundTrip) {
  for (auto k : {AuditKind::embedding, AuditKind::interpolation, AuditKind::algebra, AuditKind::morse,
                 AuditKind::kato_ponce, AuditKind::monotonicity, AuditKind::besov_sobolev})
    EXPECT_EQ(parse_audit_kind(audit_name(k)), k);
  EXPECT_THROW(parse_audit_kind("nope"), ConfigError);
  EXPECT_THROW(inequality_audit({}, AuditKind::algebra), ConfigError);
}
