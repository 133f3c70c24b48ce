#ifndef GCHLAB_TRANSPORT_HPP
#define GCHLAB_TRANSPORT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gchlab/audit.hpp"
#include "gchlab/errors.hpp"
#include "gchlab/grid.hpp"
#include "gchlab/littlewood_paley.hpp"
#include "gchlab/spectral.hpp"

namespace gchlab {

using SpaceTimeFn = std::function<double(double t, double x)>;

/// Four-point Lagrange interpolation on the periodic grid.
inline double interp_cubic(const RealField& f, double x) {
  const Grid1D& g = f.grid;
  const double s = (x + g.half_width()) / g.dx();
  const double fl = std::floor(s);
  const double a = s - fl;
  const long n = static_cast<long>(g.size());
  long i = static_cast<long>(fl) % n;
  if (i < 0) i += n;
  auto at = [&](long q) { return f.values[static_cast<std::size_t>(((q % n) + n) % n)]; };
  if (a == 0.0) return at(i);
  const double wm = -a * (a - 1.0) * (a - 2.0) / 6.0;
  const double w0 = (a + 1.0) * (a - 1.0) * (a - 2.0) / 2.0;
  const double w1 = -(a + 1.0) * a * (a - 2.0) / 2.0;
  const double w2 = (a + 1.0) * a * (a - 1.0) / 6.0;
  return wm * at(i - 1) + w0 * at(i) + w1 * at(i + 1) + w2 * at(i + 2);
}

/// Field samples at increasing times, evaluated linearly in t (clamped at the
/// ends) and by cubic interpolation in x.
class SnapshotSeries {
 public:
  SnapshotSeries(std::vector<double> times, std::vector<RealField> frames)
      : times_(std::move(times)), frames_(std::move(frames)) {
    if (times_.empty() || times_.size() != frames_.size())
      throw ConfigError("SnapshotSeries: need matching nonempty times and frames");
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (!(times_[i] > times_[i - 1])) throw ConfigError("SnapshotSeries: times must increase");
    for (const auto& f : frames_)
      if (!f.all_finite()) throw DivergedError("SnapshotSeries: nonfinite frame");
  }

  double operator()(double t, double x) const {
    if (times_.size() == 1 || t <= times_.front()) return interp_cubic(frames_.front(), x);
    if (t >= times_.back()) return interp_cubic(frames_.back(), x);
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double th = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return (1.0 - th) * interp_cubic(frames_[k], x) + th * interp_cubic(frames_[k + 1], x);
  }

  /// Wraps a shared copy as a SpaceTimeFn.
  SpaceTimeFn as_function() const {
    auto self = std::make_shared<SnapshotSeries>(*this);
    return [self](double t, double x) { return (*self)(t, x); };
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<RealField>& frames() const { return frames_; }

 private:
  std::vector<double> times_;
  std::vector<RealField> frames_;
};

/// f_t + v f_x = g on the periodic grid of f0, for t in [0, T].
struct TransportProblem {
  SpaceTimeFn velocity;
  SpaceTimeFn source;  // may be empty: g = 0
  RealField f0;
  double T = 1.0;
};

struct TransportSolution {
  std::vector<double> times;
  std::vector<RealField> frames;
};

/// Uniform output times k dt, the last one clipped to T.
inline std::vector<double> transport_times(double T, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("solve_transport: dt must be positive");
  if (!(T > 0.0)) throw ConfigError("solve_transport: T must be positive");
  std::vector<double> ts{0.0};
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) ts.push_back(k == steps ? T : static_cast<double>(k) * dt);
  return ts;
}

/// Semi-Lagrangian solve. For every grid point the characteristic is traced
/// backward over one step with classical RK4 on the augmented system
/// dq/ds = v(s, q), dI/ds = g(s, q), so the source integral along the
/// characteristic has the same order as the foot position. The previous frame
/// is interpolated at the foot with cubic Lagrange weights.
inline TransportSolution solve_transport(const TransportProblem& tp, double dt) {
  if (!tp.velocity) throw ConfigError("solve_transport: velocity is required");
  if (!tp.f0.all_finite()) throw ConfigError("solve_transport: initial data not finite");
  const Grid1D& g = tp.f0.grid;
  const double L = g.half_width(), len = g.length();
  TransportSolution sol;
  sol.times = transport_times(tp.T, dt);
  sol.frames.push_back(tp.f0);
  auto v = [&](double s, double x) {
    const double val = tp.velocity(s, x);
    if (!std::isfinite(val)) throw DivergedError("solve_transport: nonfinite velocity");
    return val;
  };
  auto src = [&](double s, double x) { return tp.source ? tp.source(s, x) : 0.0; };
  auto wrap = [&](double x) {
    x = std::fmod(x + L, len);
    if (x < 0.0) x += len;
    return x - L;
  };
  for (std::size_t k = 0; k + 1 < sol.times.size(); ++k) {
    const double t1 = sol.times[k + 1];
    const double h = -(t1 - sol.times[k]);
    const RealField& prev = sol.frames.back();
    RealField next(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double q0 = g.x(i);
      const double k1 = v(t1, q0), g1 = src(t1, q0);
      const double q2 = q0 + 0.5 * h * k1;
      const double k2 = v(t1 + 0.5 * h, q2), g2 = src(t1 + 0.5 * h, q2);
      const double q3 = q0 + 0.5 * h * k2;
      const double k3 = v(t1 + 0.5 * h, q3), g3 = src(t1 + 0.5 * h, q3);
      const double q4 = q0 + h * k3;
      const double k4 = v(t1 + h, q4), g4 = src(t1 + h, q4);
      const double foot = q0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double integral = -h / 6.0 * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
      next[i] = (foot == q0 ? prev[i] : interp_cubic(prev, wrap(foot))) + integral;
    }
    if (!next.all_finite()) throw DivergedError("solve_transport: nonfinite solution");
    sol.frames.push_back(std::move(next));
  }
  return sol;
}

namespace detail {

inline RealField sample_at(const SpaceTimeFn& f, const Grid1D& g, double t) {
  RealField out(g);
  if (!f) return out;
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(t, g.x(i));
  return out;
}

}  // namespace detail

/// Fits the smallest C >= 0 with
///   ||f(t)||_{B^s} <= (||f0||_{B^s} + int_0^t e^{-CV} ||g||_{B^s}) e^{CV(t)},
///   V(t) = int_0^t ||v||_{B^{s+2}},
/// at every output time (Besov indices (2, 2), trapezoid in time). The
/// report's ratios are LHS / RHS at the fitted C.
inline AuditReport transport_apriori_audit(const TransportProblem& tp, const TransportSolution& sol,
                                           double s = 1.5) {
  const Grid1D& g = tp.f0.grid;
  const DyadicPartition P = build_partition(g);
  const std::size_t n = sol.times.size();
  std::vector<double> fn(n), vn(n), gn(n), V(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = sol.times[k];
    fn[k] = besov_norm(sol.frames[k], {s, 2.0, 2.0}, P);
    vn[k] = besov_norm(detail::sample_at(tp.velocity, g, t), {s + 2.0, 2.0, 2.0}, P);
    gn[k] = tp.source ? besov_norm(detail::sample_at(tp.source, g, t), {s, 2.0, 2.0}, P) : 0.0;
    if (k > 0) V[k] = V[k - 1] + 0.5 * (sol.times[k] - sol.times[k - 1]) * (vn[k] + vn[k - 1]);
  }
  auto ratios_at = [&](double C) {
    std::vector<double> r(n);
    double G = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0)
        G += 0.5 * (sol.times[k] - sol.times[k - 1]) * (std::exp(-C * V[k]) * gn[k] + std::exp(-C * V[k - 1]) * gn[k - 1]);
      r[k] = detail::safe_ratio(fn[k], (fn[0] + G) * std::exp(C * V[k]));
    }
    return r;
  };
  auto worst = [&](double C) {
    const auto r = ratios_at(C);
    return *std::max_element(r.begin(), r.end());
  };
  constexpr double slack = 1.0 + 1e-12;
  AuditReport rep;
  rep.id = "transport_apriori";
  double C = 0.0;
  if (worst(0.0) > slack) {
    double hi = 1.0;
    while (worst(hi) > slack && hi < 1e6) hi *= 2.0;
    if (worst(hi) > slack) {
      rep.fitted_constant = std::numeric_limits<double>::infinity();
      rep.passed = false;
      rep.note = "no finite constant satisfies the bound";
      rep.ratios = ratios_at(hi);
      return rep;
    }
    double lo = 0.0;
    for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (worst(mid) > slack ? lo : hi) = mid;
    }
    C = hi;
  }
  rep.fitted_constant = C;
  rep.ratios = ratios_at(C);
  return rep;
}

}  // namespace gchlab

#endif  // GCHLAB_TRANSPORT_HPP
