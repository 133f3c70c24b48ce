#ifndef GCHLAB_PEAKON_HPP
#define GCHLAB_PEAKON_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "gchlab/errors.hpp"
#include "gchlab/grid.hpp"
#include "gchlab/spectral.hpp"

namespace gchlab {

/// Single peakon with crest at x = ct. Speeds c <= 0 are refused unless
/// `experimental` is set.
struct PeakonParams {
  double c = 1.0;
  bool experimental = false;

  void validate() const {
    if (!std::isfinite(c)) throw ConfigError("peakon: c must be finite");
    if (!(c > 0.0) && !experimental)
      throw ConfigError("peakon: c must be positive (set experimental to allow c <= 0)");
  }
};

inline double peakon_u(const PeakonParams& pp, double t, double x) {
  const double c = pp.c, z = x - c * t;
  if (z >= 0.0) return -(c / 6.0) * std::exp(-z);
  return -(c / 2.0) * std::exp(z) + (c / 3.0) * std::exp(2.0 * z);
}

inline double peakon_ux(const PeakonParams& pp, double t, double x) {
  const double c = pp.c, z = x - c * t;
  if (z >= 0.0) return (c / 6.0) * std::exp(-z);
  return -(c / 2.0) * std::exp(z) + (2.0 * c / 3.0) * std::exp(2.0 * z);
}

/// Branchwise 2u - u_x.
inline double peakon_w(const PeakonParams& pp, double t, double x) {
  return 2.0 * peakon_u(pp, t, x) - peakon_ux(pp, t, x);
}

struct MomentumValue {
  double value = 0.0;
  bool at_crest = false;  // value is the left limit
};

/// m = u - u_xx: -c e^{2(x-ct)} behind the crest, 0 ahead of it.
inline MomentumValue peakon_m(const PeakonParams& pp, double t, double x) {
  const double z = x - pp.c * t;
  if (z > 0.0) return {0.0, false};
  return {-pp.c * std::exp(2.0 * z), z == 0.0};
}

inline RealField sample_peakon(const PeakonParams& pp, const Grid1D& g, double t = 0.0) {
  pp.validate();
  return sample(g, [&](double x) { return peakon_u(pp, t, x); });
}

/// Smooth test function phi(t, x) = p(t) b((x - x0)/sigma) with
/// b(y) = exp(-1/(1 - y^2)) on |y| < 1 and p a cubic polynomial in t.
struct TestFunction {
  double x0 = 0.0;
  double sigma = 1.0;
  std::array<double, 4> coeffs{1.0, 0.0, 0.0, 0.0};

  double lo() const { return x0 - sigma; }
  double hi() const { return x0 + sigma; }

  double p(double t) const { return coeffs[0] + t * (coeffs[1] + t * (coeffs[2] + t * coeffs[3])); }
  double pt(double t) const { return coeffs[1] + t * (2.0 * coeffs[2] + t * 3.0 * coeffs[3]); }

  /// Bump and its first two x-derivatives.
  std::array<double, 3> bump(double x) const {
    const double y = (x - x0) / sigma;
    if (std::abs(y) >= 1.0) return {0.0, 0.0, 0.0};
    const double q = 1.0 - y * y;
    const double b = std::exp(-1.0 / q);
    // d/dy: b * (-2y/q^2); d2/dy2: b * (6y^4 - 2) / q^4
    const double by = b * (-2.0 * y / (q * q));
    const double byy = b * (6.0 * y * y * y * y - 2.0) / (q * q * q * q);
    return {b, by / sigma, byy / (sigma * sigma)};
  }

  double phi(double t, double x) const { return p(t) * bump(x)[0]; }
  double phi_t(double t, double x) const { return pt(t) * bump(x)[0]; }
  double phi_x(double t, double x) const { return p(t) * bump(x)[1]; }
  double phi_xx(double t, double x) const { return p(t) * bump(x)[2]; }
  double phi_tx(double t, double x) const { return pt(t) * bump(x)[1]; }
  double phi_txx(double t, double x) const { return pt(t) * bump(x)[2]; }
};

/// Operator applied to phi in the nonlinear term. The formal adjoint of
/// d_x(2 + d_x) is -d_x(2 - d_x), so the correct weight is
/// d_x(2 - d_x) phi = 2phi_x - phi_xx (`adjoint`). `literal` keeps the
/// unadjointed d_x(2 + d_x) phi; the peakon does not satisfy that identity.
enum class WeakOperator { adjoint, literal };

struct WeakOptions {
  bool crest_split = false;  // insert the crest as a quadrature node in x
  WeakOperator op = WeakOperator::adjoint;
};

struct WeakResidualReport {
  std::vector<double> residuals;  // signed, one per test function
  double max_abs = 0.0;
};

namespace detail {

inline double weak_nonlinear_weight(const TestFunction& f, double t, double x, WeakOperator op) {
  const auto b = f.bump(x);
  const double p = f.p(t);
  return op == WeakOperator::adjoint ? p * (2.0 * b[1] - b[2]) : p * (2.0 * b[1] + b[2]);
}

// Trapezoid weights on a sorted node list.
inline std::vector<double> trapezoid_weights(const std::vector<double>& nodes) {
  std::vector<double> w(nodes.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double h = nodes[i + 1] - nodes[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

inline std::vector<double> uniform_nodes(double a, double b, std::size_t n) {
  std::vector<double> v(n + 1);
  for (std::size_t i = 0; i <= n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  v[n] = b;
  return v;
}

}  // namespace detail

/// Weak-form residual for a field given pointwise by u(t, x) and w(t, x):
///   int_0^T int (phi_t - phi_txx) u - D phi w^2 dx dt
///     - [int u(T)(phi(T) - phi_xx(T)) dx - int u(0)(phi(0) - phi_xx(0)) dx]
/// with D phi = d_x(2 - d_x) phi. Trapezoid with nt cells in t and nx cells
/// over each test function's support. `crest(t)` (optional) adds a node.
inline WeakResidualReport weak_residual(const std::function<double(double, double)>& u,
                                        const std::function<double(double, double)>& w,
                                        const std::vector<TestFunction>& phis, double T, std::size_t nx,
                                        std::size_t nt, const WeakOptions& opt = {},
                                        const std::function<double(double)>& crest = nullptr,
                                        double domain_half_width = std::numeric_limits<double>::infinity()) {
  if (phis.empty()) throw ConfigError("weak_residual: empty test-function family");
  if (nx < 2 || nt < 1) throw ConfigError("weak_residual: quadrature too coarse");
  if (!(T > 0.0)) throw ConfigError("weak_residual: T must be positive");
  WeakResidualReport rep;
  const auto tn = detail::uniform_nodes(0.0, T, nt);
  const auto tw = detail::trapezoid_weights(tn);
  for (const auto& f : phis) {
    if (!(f.sigma > 0.0)) throw ConfigError("weak_residual: test-function width must be positive");
    if (f.lo() < -domain_half_width || f.hi() > domain_half_width)
      throw ConfigError("weak_residual: test-function support leaves the domain");
    auto x_nodes = [&](double t) {
      auto xs = detail::uniform_nodes(f.lo(), f.hi(), nx);
      if (opt.crest_split && crest) {
        const double xc = crest(t);
        if (xc > f.lo() && xc < f.hi()) {
          xs.push_back(xc);
          std::sort(xs.begin(), xs.end());
          xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        }
      }
      return xs;
    };
    double interior = 0.0;
    for (std::size_t it = 0; it < tn.size(); ++it) {
      const double t = tn[it];
      const auto xs = x_nodes(t);
      const auto xw = detail::trapezoid_weights(xs);
      double inner = 0.0;
      for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        const double x = xs[ix];
        const double uu = u(t, x), ww = w(t, x);
        inner += xw[ix] * ((f.phi_t(t, x) - f.phi_txx(t, x)) * uu -
                           detail::weak_nonlinear_weight(f, t, x, opt.op) * ww * ww);
      }
      interior += tw[it] * inner;
    }
    auto boundary = [&](double t) {
      const auto xs = x_nodes(t);
      const auto xw = detail::trapezoid_weights(xs);
      double acc = 0.0;
      for (std::size_t ix = 0; ix < xs.size(); ++ix)
        acc += xw[ix] * u(t, xs[ix]) * (f.phi(t, xs[ix]) - f.phi_xx(t, xs[ix]));
      return acc;
    };
    const double r = interior - (boundary(T) - boundary(0.0));
    rep.residuals.push_back(r);
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
  }
  return rep;
}

/// Residual of the closed-form peakon.
inline WeakResidualReport weak_residual(const PeakonParams& pp, const std::vector<TestFunction>& phis, double T,
                                        std::size_t nx, std::size_t nt, const WeakOptions& opt = {}) {
  pp.validate();
  return weak_residual([&](double t, double x) { return peakon_u(pp, t, x); },
                       [&](double t, double x) { return peakon_w(pp, t, x); }, phis, T, nx, nt, opt,
                       [&](double t) { return pp.c * t; });
}

/// Residual of a sampled run: snapshots at increasing times starting at 0 and
/// ending at T. x-quadrature is the periodic grid sum (test functions vanish at
/// the seam), t-quadrature the trapezoid over the snapshot times.
inline WeakResidualReport weak_residual(const std::vector<double>& times, const std::vector<RealField>& snaps,
                                        const std::vector<TestFunction>& phis,
                                        WeakOperator op = WeakOperator::adjoint) {
  if (times.size() != snaps.size() || times.size() < 2)
    throw ConfigError("weak_residual: need at least two snapshots with matching times");
  if (phis.empty()) throw ConfigError("weak_residual: empty test-function family");
  const Grid1D g = snaps.front().grid;
  for (const auto& f : phis)
    if (f.lo() <= -g.half_width() || f.hi() >= g.half_width())
      throw ConfigError("weak_residual: test-function support leaves the domain");
  std::vector<RealField> ws;
  for (const auto& s : snaps) ws.push_back(2.0 * s - derivative(s, 1));
  const auto tw = detail::trapezoid_weights(times);
  const double dx = g.dx();
  WeakResidualReport rep;
  for (const auto& f : phis) {
    double interior = 0.0;
    for (std::size_t it = 0; it < times.size(); ++it) {
      const double t = times[it];
      double inner = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        if (x <= f.lo() || x >= f.hi()) continue;
        inner += (f.phi_t(t, x) - f.phi_txx(t, x)) * snaps[it][i] -
                 detail::weak_nonlinear_weight(f, t, x, op) * ws[it][i] * ws[it][i];
      }
      interior += tw[it] * inner * dx;
    }
    auto boundary = [&](std::size_t it) {
      const double t = times[it];
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        if (x <= f.lo() || x >= f.hi()) continue;
        acc += snaps[it][i] * (f.phi(t, x) - f.phi_xx(t, x));
      }
      return acc * dx;
    };
    const double r = interior - (boundary(times.size() - 1) - boundary(0));
    rep.residuals.push_back(r);
    rep.max_abs = std::max(rep.max_abs, std::abs(r));
  }
  return rep;
}

/// Five test functions for the peakon over [0, T]: three straddle the crest
/// path x = ct and two avoid it.
inline std::vector<TestFunction> default_test_family(double c, double T) {
  const double mid = 0.5 * c * T;
  return {
      TestFunction{mid, 0.75 * std::abs(c * T) + 1.0, {1.0, 0.5, -0.25, 0.1}},
      TestFunction{0.0, 1.5, {0.5, 1.0, 0.0, -0.2}},
      TestFunction{c * T, 1.2, {-1.0, 0.3, 0.4, 0.0}},
      TestFunction{-4.0, 1.5, {1.0, -0.5, 0.2, 0.05}},
      TestFunction{c * T + 4.0, 1.5, {0.7, 0.2, -0.1, 0.3}},
  };
}

/// Least-squares slope of log(err) against log(h).
inline double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) throw ConfigError("fitted_order: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(std::max(err[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gchlab

#endif  // GCHLAB_PEAKON_HPP
