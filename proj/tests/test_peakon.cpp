#include <gtest/gtest.h>

#include <cmath>

#include "gchlab/blowup.hpp"
#include "gchlab/peakon.hpp"
#include "oracles.hpp"

using namespace gchlab;

TEST(Peakon, ProfileIsContinuouslyDifferentiableAtTheCrest) {
  const PeakonParams pp{1.0, false};
  for (double t : {0.0, 0.7}) {
    const double xc = t, e = 1e-12;
    EXPECT_NEAR(peakon_u(pp, t, xc + e), peakon_u(pp, t, xc - e), 1e-11);
    EXPECT_NEAR(peakon_ux(pp, t, xc + e), peakon_ux(pp, t, xc - e), 1e-11);
    EXPECT_NEAR(peakon_u(pp, t, xc), -1.0 / 6.0, 1e-15);
    EXPECT_NEAR(peakon_ux(pp, t, xc), 1.0 / 6.0, 1e-15);
  }
}

TEST(Peakon, DerivativeMatchesFiniteDifferences) {
  const PeakonParams pp{1.3, false};
  for (double x : {-3.0, -0.4, 0.2, 2.5}) {
    const double h = 1e-6;
    const double fd = (peakon_u(pp, 0.0, x + h) - peakon_u(pp, 0.0, x - h)) / (2.0 * h);
    EXPECT_NEAR(peakon_ux(pp, 0.0, x), fd, 1e-8) << x;
  }
}

TEST(Peakon, WIsTheClassicalPeakedShape) {
  // w = 2u - u_x = -(c/2) e^{-|x - ct|}
  const PeakonParams pp{2.0, false};
  for (double x : {-4.0, -1.0, 0.5, 0.9, 1.0, 3.0})
    EXPECT_NEAR(peakon_w(pp, 0.5, x), -1.0 * std::exp(-std::abs(x - 1.0)), 1e-14) << x;
}

TEST(Peakon, MomentumVanishesAheadOfTheCrest) {
  const PeakonParams pp{1.0, false};
  EXPECT_EQ(peakon_m(pp, 0.0, 0.1).value, 0.0);
  EXPECT_NEAR(peakon_m(pp, 0.0, -0.5).value, -std::exp(-1.0), 1e-15);
  EXPECT_TRUE(peakon_m(pp, 0.0, 0.0).at_crest);
  // m = u - u_xx behind the crest, checked by differences.
  const double x = -0.8, h = 1e-4;
  const double uxx = (peakon_u(pp, 0.0, x + h) - 2.0 * peakon_u(pp, 0.0, x) + peakon_u(pp, 0.0, x - h)) / (h * h);
  EXPECT_NEAR(peakon_m(pp, 0.0, x).value, peakon_u(pp, 0.0, x) - uxx, 1e-6);
}

TEST(Peakon, NonPositiveSpeedNeedsExperimentalFlag) {
  EXPECT_THROW((PeakonParams{0.0, false}).validate(), ConfigError);
  EXPECT_THROW((PeakonParams{-1.0, false}).validate(), ConfigError);
  EXPECT_NO_THROW((PeakonParams{-1.0, true}).validate());
  EXPECT_THROW((PeakonParams{std::nan(""), true}).validate(), ConfigError);
}

TEST(Peakon, EnergyIsOneTwelfth) {
  // Adaptive quadrature of u^2 + u_x^2 on each smooth piece.
  const PeakonParams pp{1.0, false};
  const double E = oracle::integrate(
      [&](double x) {
        const double u = peakon_u(pp, 0.0, x), ux = peakon_ux(pp, 0.0, x);
        return u * u + ux * ux;
      },
      {-40.0, -10.0, 0.0, 10.0, 40.0});
  EXPECT_NEAR(E, 1.0 / 12.0, 1e-13);
  EXPECT_NEAR(oracle::peakon_sobolev_sq(1.0), 1.0 / 12.0, 1e-10);
  const Grid1D g(40.0, 4096);
  // Sampling the kink in u_xx costs O(dx^2) in the grid norm.
  EXPECT_NEAR(std::pow(sobolev_norm(sample_peakon(pp, g), 1.0), 2), 1.0 / 12.0, 2e-7);
}

TEST(Peakon, ThreeHalvesNormConvergesToTheFourierOracle) {
  // The grid norm truncates a spectrum decaying like xi^{-3}; the error
  // falls by about 4 per doubling of N.
  const PeakonParams pp{1.0, false};
  const double exact = std::sqrt(oracle::peakon_sobolev_sq(1.5));
  std::vector<double> err;
  for (std::size_t n : {2048u, 4096u, 8192u}) {
    const Grid1D g(40.0, n);
    err.push_back(std::abs(sobolev_norm(sample_peakon(pp, g), 1.5) - exact) / exact);
  }
  EXPECT_LE(err[1], 1e-4);
  EXPECT_GT(err[0] / err[1], 3.0);
  EXPECT_GT(err[1] / err[2], 3.0);
}

TEST(Peakon, CTMatchesQuadratureOracle) {
  const PeakonParams pp{1.0, false};
  const Grid1D g(40.0, 4096);
  const double T = 1.0;
  const double h1sq = 1.0 / 12.0, h32 = std::sqrt(oracle::peakon_sobolev_sq(1.5));
  const double expect = 4.0 * (54.0 * T * h1sq + 6.0 * h32);
  EXPECT_NEAR(compute_CT(sample_peakon(pp, g), T) / expect, 1.0, 1e-4);
}

TEST(TestFunctions, DerivativesMatchFiniteDifferences) {
  const TestFunction f{0.3, 1.7, {0.5, -1.0, 0.25, 0.1}};
  const double h = 1e-5;
  for (double x : {-0.9, 0.0, 0.4, 1.5}) {
    for (double t : {0.0, 0.6}) {
      EXPECT_NEAR(f.phi_x(t, x), (f.phi(t, x + h) - f.phi(t, x - h)) / (2 * h), 1e-7);
      EXPECT_NEAR(f.phi_xx(t, x), (f.phi_x(t, x + h) - f.phi_x(t, x - h)) / (2 * h), 1e-6);
      EXPECT_NEAR(f.phi_t(t, x), (f.phi(t + h, x) - f.phi(t - h, x)) / (2 * h), 1e-7);
      EXPECT_NEAR(f.phi_txx(t, x), (f.phi_xx(t + h, x) - f.phi_xx(t - h, x)) / (2 * h), 1e-5);
    }
  }
  EXPECT_EQ(f.phi(0.0, f.hi()), 0.0);
  EXPECT_EQ(f.phi(0.0, f.lo() - 1.0), 0.0);
}

TEST(WeakForm, PeakonResidualConvergesAtSecondOrder) {
  const PeakonParams pp{1.0, false};
  const auto phis = default_test_family(1.0, 1.0);
  std::vector<double> h, e;
  for (std::size_t n : {50u, 100u, 200u, 400u, 800u}) {
    h.push_back(1.0 / static_cast<double>(n));
    e.push_back(weak_residual(pp, phis, 1.0, n, n).max_abs);
  }
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_LT(e[i], e[i - 1]);
  EXPECT_GE(fitted_order(h, e), 1.5);
  EXPECT_LE(e.back(), 1e-4);
}

TEST(WeakForm, LiteralOperatorDoesNotVanish) {
  // Using d_x(2 + d_x) phi in place of its adjoint leaves an O(1) residual.
  const PeakonParams pp{1.0, false};
  const auto phis = default_test_family(1.0, 1.0);
  WeakOptions opt;
  opt.op = WeakOperator::literal;
  const double coarse = weak_residual(pp, phis, 1.0, 100, 100, opt).max_abs;
  const double fine = weak_residual(pp, phis, 1.0, 400, 400, opt).max_abs;
  EXPECT_GT(fine, 1e-2);
  EXPECT_NEAR(fine / coarse, 1.0, 0.05);
}

TEST(WeakForm, CrestSplitKeepsConvergence) {
  const PeakonParams pp{1.0, false};
  const auto phis = default_test_family(1.0, 1.0);
  WeakOptions opt;
  opt.crest_split = true;
  EXPECT_LE(weak_residual(pp, phis, 1.0, 800, 800, opt).max_abs, 1e-4);
}

TEST(WeakForm, SampledRunOfThePeakonIsAWeakSolution) {
  const PeakonParams pp{1.0, false};
  const Grid1D g(40.0, 4096);
  std::vector<double> times;
  std::vector<RealField> snaps;
  for (int k = 0; k <= 100; ++k) {
    times.push_back(0.01 * k);
    snaps.push_back(sample_peakon(pp, g, times.back()));
  }
  const auto phis = default_test_family(1.0, 1.0);
  const double good = weak_residual(times, snaps, phis).max_abs;
  const double bad = weak_residual(times, snaps, phis, WeakOperator::literal).max_abs;
  EXPECT_LT(good, 1e-3);
  EXPECT_GT(bad, 100.0 * good);
}

TEST(WeakForm, InputValidation) {
  const PeakonParams pp{1.0, false};
  EXPECT_THROW(weak_residual(pp, {}, 1.0, 10, 10), ConfigError);
  EXPECT_THROW(weak_residual(pp, default_test_family(1.0, 1.0), 1.0, 1, 10), ConfigError);
  EXPECT_THROW(weak_residual(pp, default_test_family(1.0, 1.0), 0.0, 10, 10), ConfigError);
  const Grid1D g(3.0, 64);
  EXPECT_THROW(weak_residual({0.0, 1.0}, {RealField(g), RealField(g)}, default_test_family(1.0, 1.0)),
               ConfigError);
}

TEST(WeakForm, FittedOrderOfExactPowerLaw) {
  const std::vector<double> h{0.1, 0.05, 0.025}, e{3e-2, 7.5e-3, 1.875e-3};
  EXPECT_NEAR(fitted_order(h, e), 2.0, 1e-12);
  EXPECT_THROW(fitted_order({0.1}, {1.0}), ConfigError);
}
