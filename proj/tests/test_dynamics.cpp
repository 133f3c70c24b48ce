#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gchlab/audit.hpp"
#include "gchlab/dynamics.hpp"
#include "gchlab/peakon.hpp"

using namespace gchlab;

namespace {

RealField gauss(const Grid1D& g, double A, double w = 1.0, double c = 0.0) {
  return sample(g, [&](double x) { return A * std::exp(-(x - c) * (x - c) / (2.0 * w * w)); });
}

double rel(const RealField& a, const RealField& b) { return l2_norm(a - b) / std::max(l2_norm(b), 1e-300); }

}  // namespace

TEST(Rhs, ThreeFormsAgreeOnBandLimitedFields) {
  const Grid1D g(std::numbers::pi, 256);
  CorpusSpec spec;
  spec.count = 50;
  spec.seed = 17;
  spec.max_mode = 24;  // quadratic products stay inside the retained band
  double worst = 0.0;
  for (const auto& f : make_corpus(spec, g)) {
    const RealField u = 0.3 * f;
    const RealField a = rhs_spectral_form(u);
    const RealField b = helmholtz_inverse(rhs_m_form(helmholtz(u)));
    const RealField c = rhs_u_form(u);
    worst = std::max({worst, rel(b, a), rel(c, a), rel(c, b)});
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Rhs, GreenQuadratureVariantOfUForm) {
  const Grid1D g(40.0, 1024);
  const RealField u = gauss(g, 0.4, 1.2, 0.5);
  EXPECT_LE(rel(rhs_u_form(u, true, true), rhs_u_form(u, true, false)), 1e-8);
}

TEST(Rhs, ZeroFieldHasZeroRate) {
  const Grid1D g(10.0, 128);
  const RealField z(g);
  EXPECT_EQ(max_abs(rhs_spectral_form(z)), 0.0);
  EXPECT_EQ(max_abs(rhs_m_form(z)), 0.0);
  EXPECT_EQ(max_abs(rhs_u_form(z)), 0.0);
}

TEST(Rhs, FormSelectionAndParsing) {
  EXPECT_EQ(parse_rhs_form("m_form"), RhsForm::m_form);
  EXPECT_EQ(to_string(RhsForm::u_form), "u_form");
  EXPECT_THROW(parse_rhs_form("x"), ConfigError);
}

TEST(Evolve, ZeroDataStaysZero) {
  const Grid1D g(10.0, 128);
  SolverConfig sc;
  sc.t_end = 0.5;
  const auto run = evolve(RealField(g), sc);
  EXPECT_EQ(run.stop, StopReason::reached_T_end);
  EXPECT_EQ(max_abs(run.final_field), 0.0);
  for (const auto& s : run.samples) {
    EXPECT_EQ(s.energy, 0.0);
    EXPECT_EQ(s.B, 0.0);
  }
}

TEST(Evolve, EnergyChangePerStepIsTiny) {
  const Grid1D g(40.0, 1024);
  const RealField u = dealias(gauss(g, 0.2));
  SolverConfig sc;
  auto energy = [](const RealField& f) { return std::pow(sobolev_norm(f, 1.0), 2); };
  const RealField v = step(u, 1e-3, sc);
  EXPECT_LE(std::abs(energy(v) - energy(u)) / energy(u), 1e-12);
}

TEST(Evolve, EnergyConservedForSmoothData) {
  const Grid1D g(40.0, 1024);
  SolverConfig sc;
  sc.t_end = 1.0;
  sc.cfl = 0.15;
  sc.cadence = 1;
  const auto run = evolve(gauss(g, 0.2), sc);
  EXPECT_EQ(run.stop, StopReason::reached_T_end);
  EXPECT_LE(run.max_energy_drift(), 1e-8);
}

TEST(Evolve, TimeStepRichardsonRatio) {
  // Fixed-step RK4: successive differences shrink by about 2^4.
  const Grid1D g(40.0, 1024);  // at N = 512 this bump loses resolution before t = 0.8
  const RealField u0 = gauss(g, 0.3);
  std::vector<RealField> finals;
  for (double dt : {0.04, 0.02, 0.01}) {
    SolverConfig sc;
    sc.t_end = 0.8;
    sc.dt = dt;
    const auto run = evolve(u0, sc);
    ASSERT_EQ(run.stop, StopReason::reached_T_end);
    finals.push_back(run.final_field);
  }
  const double r = l2_norm(finals[0] - finals[1]) / l2_norm(finals[1] - finals[2]);
  EXPECT_GT(r, 12.0);
  EXPECT_LT(r, 20.0);
}

TEST(Evolve, FormsGiveTheSameTrajectory) {
  const Grid1D g(40.0, 512);
  const RealField u0 = gauss(g, 0.3);
  SolverConfig sc;
  sc.t_end = 0.5;
  sc.dt = 0.01;
  const auto a = evolve(u0, sc);
  sc.rhs_form = RhsForm::m_form;
  const auto b = evolve(u0, sc);
  sc.rhs_form = RhsForm::u_form;
  const auto c = evolve(u0, sc);
  EXPECT_LE(rel(b.final_field, a.final_field), 1e-10);
  EXPECT_LE(rel(c.final_field, a.final_field), 1e-10);
}

TEST(Evolve, TranslationEquivariance) {
  const Grid1D g(20.0, 512);
  const std::size_t shift = 37;
  const RealField u0 = gauss(g, 0.3);
  RealField u1(g);
  for (std::size_t i = 0; i < g.size(); ++i) u1[(i + shift) % g.size()] = u0[i];
  SolverConfig sc;
  sc.t_end = 0.5;
  sc.dt = 0.01;
  const auto a = evolve(u0, sc).final_field;
  const auto b = evolve(u1, sc).final_field;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(b[(i + shift) % g.size()] - a[i]));
  EXPECT_LT(worst, 1e-13);
}

TEST(Evolve, PeakonTranslatesWithSecondOrderConvergence) {
  const PeakonParams pp{1.0, false};
  std::vector<double> errs;
  for (std::size_t n : {2048u, 4096u}) {
    const Grid1D g(40.0, n);
    SolverConfig sc;
    sc.t_end = 1.0;
    const auto run = evolve(sample_peakon(pp, g), sc);
    ASSERT_EQ(run.stop, StopReason::reached_T_end);
    errs.push_back(rel(run.final_field, sample_peakon(pp, g, 1.0)));
    EXPECT_LE(run.max_energy_drift(), 1e-3);
    EXPECT_EQ(run.w_violations, 0u);
    EXPECT_EQ(run.ux_violations, 0u);
  }
  EXPECT_LE(errs.back(), 1e-2);
  EXPECT_GE(errs[0] / errs[1], 3.0);
}

TEST(Evolve, NarrowDataStopsOnResolution) {
  const Grid1D g(std::numbers::pi, 2048);
  SolverConfig sc;
  sc.t_end = 0.2;
  sc.cadence = 1;
  const auto run = evolve(gauss(g, 0.00625, 0.025), sc);
  EXPECT_EQ(run.stop, StopReason::resolution_stop);
  EXPECT_LT(run.final_time, 0.06);
  EXPECT_EQ(run.w_violations, 0u);
  EXPECT_EQ(run.ux_violations, 0u);
  EXPECT_GT(run.samples.back().tail, sc.tail_tol);
}

TEST(Evolve, RejectsPollutedOrInvalidInput) {
  const Grid1D g(5.0, 128);
  SolverConfig sc;
  EXPECT_THROW(evolve(gauss(g, 1.0, 3.0), sc), ConfigError);
  RealField bad(g);
  bad[3] = std::nan("");
  EXPECT_THROW(evolve(bad, sc), ConfigError);
  sc.cfl = 0.0;
  EXPECT_THROW(evolve(RealField(g), sc), ConfigError);
  sc = SolverConfig{};
  sc.cadence = 0;
  EXPECT_THROW(evolve(RealField(g), sc), ConfigError);
}

TEST(Evolve, SnapshotsLandOnTheRequestedTimes) {
  const Grid1D g(40.0, 256);
  SolverConfig sc;
  sc.t_end = 0.5;
  sc.snapshot_interval = 0.1;
  const auto run = evolve(gauss(g, 0.2), sc);
  ASSERT_EQ(run.snapshot_times.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(run.snapshot_times[k], 0.1 * static_cast<double>(k), 1e-14);
  EXPECT_EQ(run.snapshots.back().values, run.final_field.values);
}

TEST(Monitors, RefinedMinimumLocatesOffGridExtremum) {
  const Grid1D g(10.0, 1024);
  const double x0 = 0.3 + 0.37 * g.dx();
  const RealField u = sample(g, [&](double x) { return std::exp(-(x - x0) * (x - x0) / 2.0); });
  const auto e = min_uxx(u);  // u_xx = (z^2 - 1) e^{-z^2/2}, minimum -1 at z = 0
  EXPECT_NEAR(e.location, x0, 1e-3 * g.dx());
  EXPECT_NEAR(e.value, -1.0, 5e-8);  // parabolic fit through three nodes
}

TEST(Monitors, BoundsAreMonotoneInTime) {
  const Grid1D g(40.0, 512);
  SolverConfig sc;
  sc.t_end = 0.5;
  sc.cadence = 1;
  const auto run = evolve(gauss(g, 0.3), sc);
  for (std::size_t i = 1; i < run.samples.size(); ++i) {
    EXPECT_GE(run.samples[i].w_bound, run.samples[i - 1].w_bound);
    EXPECT_GE(run.samples[i].B, run.samples[i - 1].B);
    EXPECT_EQ(run.samples[i].ux_bound, run.samples[0].ux_bound);
  }
  EXPECT_EQ(run.samples.front().w_bound, run.w0_linf);
}

TEST(DegasperisProcesi, TransformedSolutionHasSmallResidual) {
  const Grid1D g(40.0, 2048);
  std::vector<double> res;
  for (double h : {0.02, 0.01}) {
    SolverConfig sc;
    sc.t_end = 0.5;
    sc.cfl = 0.1;
    sc.snapshot_interval = h;
    const auto run = evolve(gauss(g, 0.2), sc);
    std::vector<RealField> v, mirrored;
    for (const auto& s : run.snapshots) {
      v.push_back(dp_transform(s));
      mirrored.push_back(2.0 * (2.0 * s + derivative(s, 1)));
    }
    res.push_back(dp_residual(run.snapshot_times, v));
    EXPECT_GT(dp_residual(run.snapshot_times, mirrored), 100.0 * res.back());
  }
  EXPECT_LT(res.back(), 1e-2);
  EXPECT_GT(res[0] / res[1], 3.0);  // centered time differences: second order
}

TEST(DegasperisProcesi, NeedsThreeSnapshots) {
  const Grid1D g(10.0, 64);
  EXPECT_THROW(dp_residual({0.0, 1.0}, {RealField(g), RealField(g)}), ConfigError);
}

TEST(Stability, IdenticalDataIsAPerfectMatch) {
  const Grid1D g(40.0, 512);
  const RealField u0 = gauss(g, 0.2);
  const auto rep = stability_experiment(u0, u0, 0.5, SolverConfig{});
  EXPECT_TRUE(rep.valid);
  EXPECT_TRUE(rep.perfect_match);
  EXPECT_EQ(rep.sup_ratio, 0.0);
}

TEST(Stability, RatioIsStableAcrossPerturbationSizes) {
  const Grid1D g(40.0, 512);
  const RealField u0 = gauss(g, 0.2);
  const RealField p = gauss(g, 1.0, 0.8, 1.0);
  std::vector<double> sups;
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    const auto rep = stability_experiment(u0, u0 + eps * p, 0.5, SolverConfig{});
    ASSERT_TRUE(rep.valid) << rep.note;
    sups.push_back(rep.sup_ratio);
  }
  for (double s : sups) EXPECT_NEAR(s / sups.back(), 1.0, 0.2);
  EXPECT_TRUE(std::isfinite(sups[0]));
}
