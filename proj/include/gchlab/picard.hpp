#ifndef GCHLAB_PICARD_HPP
#define GCHLAB_PICARD_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gchlab/errors.hpp"
#include "gchlab/grid.hpp"
#include "gchlab/littlewood_paley.hpp"
#include "gchlab/spectral.hpp"
#include "gchlab/transport.hpp"

namespace gchlab {

struct PicardConfig {
  double dt = 0.01;     // transport step, also the snapshot spacing of every iterate
  double s = 1.5;       // Besov smoothness, (p, r) = (2, 2)
  double C_cal = 1.0;   // calibration constant in the horizon condition and M
  double ratio_limit = 0.75;
  std::size_t burn_in = 3;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("picard.dt must be positive");
    if (!(C_cal > 0.0)) throw ConfigError("picard.C_cal must be positive");
  }
};

struct PicardDiagnostics {
  std::vector<double> sup_norm;  // sup_t ||m_n||_{B^s}, n = 0..n_done
  std::vector<double> U_T;       // int_0^T ||m_n||_{B^s}
  std::vector<double> diff;      // d_n = sup_t ||m_{n+1} - m_n||_{B^{s-1}}, n = 0..n_done-1
  std::vector<double> ratio;     // d_{n+1} / d_n (0 when both vanish)
  double m0_norm = 0.0;
  double horizon_value = 0.0;    // 2 C^2 T ||m0||
  bool horizon_ok = false;       // horizon_value < 1
  double M_bound = std::numeric_limits<double>::infinity();  // C ||m0|| / (1 - horizon_value)
  bool truncated = false;
  std::string reason;

  /// Geometric decay after burn-in: every ratio d_{n+1}/d_n with n >= burn_in is <= limit.
  bool decays(std::size_t burn_in, double limit) const {
    for (std::size_t n = burn_in; n < ratio.size(); ++n)
      if (ratio[n] > limit) return false;
    return true;
  }
  double max_sup_norm() const {
    double m = 0.0;
    for (double v : sup_norm) m = std::max(m, v);
    return m;
  }
  /// Smallest C with max_n sup_norm[n] <= C ||m0|| / (1 - 2 C^2 ||m0|| T);
  /// infinity when no admissible C exists.
  double fitted_C(double T) const {
    const double target = max_sup_norm();
    if (m0_norm == 0.0) return target == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    const double c_max = std::sqrt(1.0 / (2.0 * m0_norm * T));  // denominator vanishes here
    auto M = [&](double C) { return C * m0_norm / (1.0 - 2.0 * C * C * m0_norm * T); };
    double lo = 0.0, hi = c_max * (1.0 - 1e-15);
    if (M(hi) < target) return std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (M(mid) < target ? lo : hi) = mid;
    }
    return hi;
  }
};

struct PicardResult {
  PicardDiagnostics diag;
  std::vector<double> times;
  std::vector<std::vector<RealField>> iterates;  // iterates[n][k] = m_n(t_k)
};

namespace detail {

// Velocity 2u_x - 4u and source F(m, u) = 2m^2 + (8u_x - 4u)m + 2(u + u_x)^2.
inline void picard_coefficients(const RealField& m, RealField& v, RealField& F) {
  const SpectralField M = to_spectral(m);
  const SpectralField U = apply_multiplier(M, [](std::size_t, double k) { return 1.0 / (1.0 + k * k); });
  const RealField u = to_physical(U);
  const RealField ux = to_physical(derivative(U, 1));
  v = RealField(m.grid);
  F = RealField(m.grid);
  for (std::size_t i = 0; i < m.size(); ++i) {
    v[i] = 2.0 * ux[i] - 4.0 * u[i];
    const double a = u[i] + ux[i];
    F[i] = 2.0 * m[i] * m[i] + (8.0 * ux[i] - 4.0 * u[i]) * m[i] + 2.0 * a * a;
  }
}

}  // namespace detail

/// Picard iteration: m_0(t) = m0; m_{n+1} solves the linear transport problem
/// with velocity and source frozen at m_n and initial data S_{n+1} m0.
inline PicardResult picard_run(const RealField& m0, std::size_t n_max, double T, const DyadicPartition& P,
                               const PicardConfig& cfg = {}) {
  cfg.validate();
  if (!(T > 0.0)) throw ConfigError("picard: T must be positive");
  if (m0.grid != P.grid) throw ConfigError("picard: m0 and partition grids differ");
  PicardResult res;
  res.times = transport_times(T, cfg.dt);
  const BesovParams hi{cfg.s, 2.0, 2.0}, lo{cfg.s - 1.0, 2.0, 2.0};
  auto& d = res.diag;
  d.m0_norm = besov_norm(m0, hi, P);
  d.horizon_value = 2.0 * cfg.C_cal * cfg.C_cal * T * d.m0_norm;
  d.horizon_ok = d.horizon_value < 1.0;
  if (d.horizon_ok) d.M_bound = cfg.C_cal * d.m0_norm / (1.0 - d.horizon_value);

  auto record_norms = [&](const std::vector<RealField>& frames) {
    double sup = 0.0, U = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const double nk = besov_norm(frames[k], hi, P);
      sup = std::max(sup, nk);
      if (k > 0) U += 0.5 * (res.times[k] - res.times[k - 1]) * (nk + prev);
      prev = nk;
    }
    d.sup_norm.push_back(sup);
    d.U_T.push_back(U);
  };

  res.iterates.emplace_back(res.times.size(), m0);
  record_norms(res.iterates.back());

  for (std::size_t n = 0; n < n_max; ++n) {
    const auto& cur = res.iterates.back();
    std::vector<RealField> vs, Fs;
    for (const auto& m : cur) {
      RealField v, F;
      detail::picard_coefficients(m, v, F);
      vs.push_back(std::move(v));
      Fs.push_back(std::move(F));
    }
    TransportProblem tp;
    tp.T = T;
    tp.f0 = low_cutoff(m0, static_cast<int>(n) + 1, P);
    std::vector<RealField> next;
    try {
      tp.velocity = SnapshotSeries(res.times, std::move(vs)).as_function();
      tp.source = SnapshotSeries(res.times, std::move(Fs)).as_function();
      next = solve_transport(tp, cfg.dt).frames;
    } catch (const DivergedError& e) {
      d.truncated = true;
      d.reason = std::string("iterate ") + std::to_string(n + 1) + " diverged: " + e.what();
      break;
    }
    double dn = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) dn = std::max(dn, besov_norm(next[k] - cur[k], lo, P));
    d.diff.push_back(dn);
    if (d.diff.size() >= 2) {
      const double a = d.diff[d.diff.size() - 2];
      d.ratio.push_back(a == 0.0 ? (dn == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : dn / a);
    }
    res.iterates.push_back(std::move(next));
    record_norms(res.iterates.back());
  }
  return res;
}

}  // namespace gchlab

#endif  // GCHLAB_PICARD_HPP
