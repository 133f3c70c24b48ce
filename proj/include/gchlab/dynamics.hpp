#ifndef GCHLAB_DYNAMICS_HPP
#define GCHLAB_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gchlab/errors.hpp"
#include "gchlab/grid.hpp"
#include "gchlab/littlewood_paley.hpp"
#include "gchlab/spectral.hpp"

namespace gchlab {

enum class RhsForm { spectral_form, m_form, u_form };
enum class StopReason { reached_T_end, resolution_stop, nonfinite };

inline std::string to_string(RhsForm f) {
  switch (f) {
    case RhsForm::spectral_form: return "spectral_form";
    case RhsForm::m_form: return "m_form";
    case RhsForm::u_form: return "u_form";
  }
  return "unknown";
}

inline RhsForm parse_rhs_form(const std::string& s) {
  for (auto f : {RhsForm::spectral_form, RhsForm::m_form, RhsForm::u_form})
    if (to_string(f) == s) return f;
  throw ConfigError("unknown rhs_form '" + s + "'");
}

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_T_end: return "reached_T_end";
    case StopReason::resolution_stop: return "resolution_stop";
    case StopReason::nonfinite: return "nonfinite";
  }
  return "unknown";
}

/// Time integration settings. The grid is carried by the initial field.
struct SolverConfig {
  double dt = 0.0;               // fixed step; 0 selects the CFL policy
  double cfl = 0.3;              // sigma in dt = sigma dx / max|4u - 2u_x|
  double growth_cap = 0.0;       // if > 0, also dt <= growth_cap / max|u_xx|
  double t_end = 1.0;
  bool dealias = true;           // 2/3 rule on products; also projects u0 onto the band
  std::size_t cadence = 10;      // monitor every k steps
  double tail_tol = 1e-3;        // resolution stop on the H^1-weighted tail fraction
  double resolved_tol = 1e-6;    // samples with u_xx-weighted tail below this count as resolved
  bool stop_on_resolution = true;
  RhsForm rhs_form = RhsForm::spectral_form;
  double snapshot_interval = 0.0;  // 0 disables snapshots
  std::size_t max_steps = 5'000'000;

  void validate() const {
    if (dt < 0.0 || !std::isfinite(dt)) throw ConfigError("solver.dt must be >= 0 (0 selects CFL)");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("solver.sigma must lie in (0, 1]");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("T must be positive");
    if (cadence == 0) throw ConfigError("solver.cadence must be >= 1");
    if (growth_cap < 0.0) throw ConfigError("solver.growth_cap must be >= 0");
    if (snapshot_interval < 0.0) throw ConfigError("solver.snapshot_interval must be >= 0");
    if (!(tail_tol > 0.0) || !(resolved_tol > 0.0)) throw ConfigError("tail tolerances must be positive");
  }
};

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

namespace detail {

inline void check_finite(const RealField& f, const char* what) {
  if (!f.all_finite()) throw DivergedError(std::string(what) + ": nonfinite values");
}

inline void project(SpectralField& F, bool dealias) {
  if (dealias) dealias_in_place(F);
}

}  // namespace detail

/// u_t = (1 - d_xx)^{-1} d_x (2 + d_x) w^2 with w = 2u - u_x. Ground truth.
inline RealField rhs_spectral_form(const RealField& u, bool dealias = true) {
  detail::check_finite(u, "rhs_spectral_form");
  const SpectralField U = to_spectral(u);
  SpectralField W = U;
  for (std::size_t i = 0; i < W.size(); ++i) {
    const double k = i == W.grid.nyquist_index() ? 0.0 : W.grid.wavenumber(i);
    W.coeffs[i] *= std::complex<double>(2.0, -k);
  }
  RealField w = to_physical(W);
  for (double& v : w.values) v *= v;
  SpectralField Q = to_spectral(w);
  detail::project(Q, dealias);
  for (std::size_t i = 0; i < Q.size(); ++i) {
    const double k = i == Q.grid.nyquist_index() ? 0.0 : Q.grid.wavenumber(i);
    const std::complex<double> ik(0.0, k);
    Q.coeffs[i] *= ik * (2.0 + ik) / (1.0 + k * k);
  }
  RealField out = to_physical(Q);
  detail::check_finite(out, "rhs_spectral_form");
  return out;
}

/// m_t = 2m^2 + (8u_x - 4u)m + (4u - 2u_x)m_x + 2(u + u_x)^2 with u = (1 - d_xx)^{-1} m.
inline RealField rhs_m_form(const RealField& m, bool dealias = true) {
  detail::check_finite(m, "rhs_m_form");
  const SpectralField M = to_spectral(m);
  SpectralField Uh = apply_multiplier(M, [](std::size_t, double k) { return 1.0 / (1.0 + k * k); });
  const RealField u = to_physical(Uh);
  const RealField ux = to_physical(derivative(Uh, 1));
  const RealField mx = to_physical(derivative(M, 1));
  RealField q(m.grid);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double a = u[i] + ux[i];
    q[i] = 2.0 * m[i] * m[i] + (8.0 * ux[i] - 4.0 * u[i]) * m[i] + (4.0 * u[i] - 2.0 * ux[i]) * mx[i] +
           2.0 * a * a;
  }
  SpectralField Q = to_spectral(q);
  detail::project(Q, dealias);
  RealField out = to_physical(Q);
  detail::check_finite(out, "rhs_m_form");
  return out;
}

/// u_t = 4uu_x - u_x^2 + G * [d_x(2u_x^2 + 6u^2) + u_x^2]. With use_green the
/// convolution is done by kernel quadrature instead of spectral division.
inline RealField rhs_u_form(const RealField& u, bool dealias = true, bool use_green = false) {
  detail::check_finite(u, "rhs_u_form");
  const SpectralField U = to_spectral(u);
  const RealField ux = to_physical(derivative(U, 1));
  RealField local(u.grid), flux(u.grid), src(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    local[i] = 4.0 * u[i] * ux[i] - ux[i] * ux[i];
    flux[i] = 2.0 * ux[i] * ux[i] + 6.0 * u[i] * u[i];
    src[i] = ux[i] * ux[i];
  }
  SpectralField A = to_spectral(local), B = to_spectral(flux), C = to_spectral(src);
  detail::project(A, dealias);
  detail::project(B, dealias);
  detail::project(C, dealias);
  SpectralField bracket = derivative(B, 1);
  for (std::size_t i = 0; i < bracket.size(); ++i) bracket.coeffs[i] += C.coeffs[i];
  RealField nonlocal;
  if (use_green) {
    nonlocal = green_convolve(to_physical(bracket));
  } else {
    nonlocal = to_physical(apply_multiplier(bracket, [](std::size_t, double k) { return 1.0 / (1.0 + k * k); }));
  }
  RealField out = to_physical(A) + nonlocal;
  detail::check_finite(out, "rhs_u_form");
  return out;
}

/// u_t for the configured form; the m-form is mapped through (1 - d_xx) and back.
inline RealField rhs(const RealField& u, const SolverConfig& cfg) {
  switch (cfg.rhs_form) {
    case RhsForm::spectral_form: return rhs_spectral_form(u, cfg.dealias);
    case RhsForm::m_form: return helmholtz_inverse(rhs_m_form(helmholtz(u), cfg.dealias));
    case RhsForm::u_form: return rhs_u_form(u, cfg.dealias);
  }
  return rhs_spectral_form(u, cfg.dealias);
}

/// One classical Runge-Kutta step.
inline RealField step(const RealField& u, double dt, const SolverConfig& cfg) {
  if (!(dt > 0.0)) throw PreconditionError("step: dt must be positive");
  const RealField k1 = rhs(u, cfg);
  const RealField k2 = rhs(u + (0.5 * dt) * k1, cfg);
  const RealField k3 = rhs(u + (0.5 * dt) * k2, cfg);
  const RealField k4 = rhs(u + dt * k3, cfg);
  RealField out = u;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  detail::check_finite(out, "step");
  return out;
}

// ---------------------------------------------------------------------------
// Extremum tracking
// ---------------------------------------------------------------------------

struct Extremum {
  double value = 0.0;
  double location = 0.0;
};

namespace detail {

// Grid argmin refined by a three-point parabola through the periodic neighbours.
inline Extremum refined_min(const RealField& f) {
  const std::size_t n = f.size();
  const std::size_t i = static_cast<std::size_t>(std::min_element(f.values.begin(), f.values.end()) - f.values.begin());
  const double a = f[(i + n - 1) % n], b = f[i], c = f[(i + 1) % n];
  const double curv = a - 2.0 * b + c;
  double delta = 0.0, value = b;
  if (curv > 0.0) {
    delta = 0.5 * (a - c) / curv;
    value = b - 0.25 * (a - c) * delta;
  }
  const Grid1D& g = f.grid;
  double x = g.x(i) + delta * g.dx();
  if (x < -g.half_width()) x += g.length();
  if (x >= g.half_width()) x -= g.length();
  return {value, x};
}

inline Extremum refined_max(const RealField& f) {
  Extremum e = refined_min(-1.0 * f);
  e.value = -e.value;
  return e;
}

}  // namespace detail

/// Minimum of the spectral second derivative, parabolically refined.
inline Extremum min_uxx(const RealField& u) { return detail::refined_min(derivative(u, 2)); }

// ---------------------------------------------------------------------------
// Evolution with monitors
// ---------------------------------------------------------------------------

struct MonitorSample {
  double t = 0.0;
  double energy = 0.0;       // int u^2 + u_x^2
  double w_linf = 0.0;
  double w_bound = 0.0;      // 6 ||w0||_2^2 t + ||w0||_inf
  double ux_linf = 0.0;
  double ux_bound = 0.0;     // 54 T ||u0||_{H^1}^2 + 5 ||u0||_{H^{3/2}}
  double B = 0.0;            // int_0^t ||u_xx||_inf
  double min_uxx = 0.0;
  double xi = 0.0;
  double uxx_linf = 0.0;
  double min_ux = 0.0;
  double tail = 0.0;         // H^1-weighted tail fraction
  double tail_uxx = 0.0;     // u_xx-weighted tail fraction
  bool resolved = true;
};

struct RunReport {
  SolverConfig cfg;
  Grid1D grid;
  std::vector<MonitorSample> samples;
  StopReason stop = StopReason::reached_T_end;
  std::string stop_detail;
  RealField initial;         // the evolved initial state (after projection)
  RealField final_field;
  double final_time = 0.0;
  std::size_t steps = 0;
  double w0_l2 = 0.0, w0_linf = 0.0, u0_h1 = 0.0, u0_h32 = 0.0;
  // Bound violations on resolved samples (hard) and on samples past the
  // resolution limit, where Gibbs overshoot is expected (reported only).
  std::size_t w_violations = 0;
  std::size_t ux_violations = 0;
  std::size_t w_violations_unresolved = 0;
  std::size_t ux_violations_unresolved = 0;
  std::vector<double> snapshot_times;
  std::vector<RealField> snapshots;

  double max_energy_drift() const {
    if (samples.empty() || samples.front().energy == 0.0) return 0.0;
    const double e0 = samples.front().energy;
    double d = 0.0;
    for (const auto& s : samples) d = std::max(d, std::abs(s.energy - e0) / e0);
    return d;
  }
};

namespace detail {

struct FieldDiagnostics {
  double energy, w_linf, ux_linf, min_ux, uxx_linf, tail, tail_uxx;
  Extremum uxx_min;
};

inline FieldDiagnostics diagnose(const RealField& u) {
  const SpectralField U = to_spectral(u);
  const RealField ux = to_physical(derivative(U, 1));
  const RealField uxx = to_physical(derivative(U, 2));
  FieldDiagnostics d{};
  d.energy = std::pow(sobolev_norm(U, 1.0), 2);
  double wmax = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) wmax = std::max(wmax, std::abs(2.0 * u[i] - ux[i]));
  d.w_linf = wmax;
  d.ux_linf = max_abs(ux);
  d.min_ux = *std::min_element(ux.values.begin(), ux.values.end());
  d.uxx_min = refined_min(uxx);
  d.uxx_linf = std::max(-d.uxx_min.value, refined_max(uxx).value);
  d.tail = tail_fraction(U, 2.0);
  d.tail_uxx = tail_fraction(U, 4.0);
  return d;
}

inline double cfl_dt(const RealField& u, const SolverConfig& cfg, double uxx_linf) {
  if (cfg.dt > 0.0) return cfg.dt;
  const RealField ux = derivative(u, 1);
  double vmax = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) vmax = std::max(vmax, std::abs(4.0 * u[i] - 2.0 * ux[i]));
  double dt = vmax > 0.0 ? cfg.cfl * u.grid.dx() / vmax : std::numeric_limits<double>::infinity();
  if (cfg.growth_cap > 0.0 && uxx_linf > 0.0) dt = std::min(dt, cfg.growth_cap / uxx_linf);
  return dt;
}

}  // namespace detail

/// Integrate from u0 to cfg.t_end, sampling all monitors every cfg.cadence steps.
inline RunReport evolve(const RealField& u0, const SolverConfig& cfg) {
  cfg.validate();
  if (!u0.all_finite()) throw ConfigError("evolve: initial field is not finite");
  if (domain_polluted(u0))
    throw ConfigError("evolve: initial field does not decay at the domain edge (|u0(+-L)| > 1e-10 max|u0|)");

  RunReport rep;
  rep.cfg = cfg;
  rep.grid = u0.grid;
  RealField u = cfg.dealias ? dealias(u0) : u0;
  rep.initial = u;

  const RealField w0 = 2.0 * u - derivative(u, 1);
  rep.w0_l2 = l2_norm(w0);
  rep.w0_linf = max_abs(w0);
  rep.u0_h1 = sobolev_norm(u, 1.0);
  rep.u0_h32 = sobolev_norm(u, 1.5);
  const double ux_bound = 54.0 * cfg.t_end * rep.u0_h1 * rep.u0_h1 + 5.0 * rep.u0_h32;
  const double slack = 1.0 + 1e-12;

  double t = 0.0, B = 0.0;
  detail::FieldDiagnostics diag = detail::diagnose(u);

  auto record = [&](const detail::FieldDiagnostics& d) {
    MonitorSample s;
    s.t = t;
    s.energy = d.energy;
    s.w_linf = d.w_linf;
    s.w_bound = 6.0 * rep.w0_l2 * rep.w0_l2 * t + rep.w0_linf;
    s.ux_linf = d.ux_linf;
    s.ux_bound = ux_bound;
    s.B = B;
    s.min_uxx = d.uxx_min.value;
    s.xi = d.uxx_min.location;
    s.uxx_linf = d.uxx_linf;
    s.min_ux = d.min_ux;
    s.tail = d.tail;
    s.tail_uxx = d.tail_uxx;
    s.resolved = d.tail_uxx <= cfg.resolved_tol;
    const bool w_bad = s.w_linf > s.w_bound * slack;
    const bool ux_bad = t <= cfg.t_end && s.ux_linf > s.ux_bound * slack;
    (s.resolved ? rep.w_violations : rep.w_violations_unresolved) += w_bad ? 1 : 0;
    (s.resolved ? rep.ux_violations : rep.ux_violations_unresolved) += ux_bad ? 1 : 0;
    rep.samples.push_back(s);
  };
  record(diag);

  const bool snapshots = cfg.snapshot_interval > 0.0;
  std::size_t next_snap = 1;
  if (snapshots) {
    rep.snapshot_times.push_back(0.0);
    rep.snapshots.push_back(u);
  }

  rep.stop = StopReason::reached_T_end;
  while (t < cfg.t_end) {
    if (rep.steps >= cfg.max_steps) throw DivergedError("evolve: step budget exhausted");
    double dt = detail::cfl_dt(u, cfg, diag.uxx_linf);
    const double ts = static_cast<double>(next_snap) * cfg.snapshot_interval;
    const bool snap_due = snapshots && ts <= cfg.t_end * (1.0 + 1e-12);
    const double target = snap_due ? std::min(ts, cfg.t_end) : cfg.t_end;
    bool clipped = false;
    if (t + dt >= target * (1.0 - 1e-14)) {
      dt = target - t;
      clipped = true;
    }
    RealField next;
    try {
      next = step(u, dt, cfg);
    } catch (const DivergedError& e) {
      rep.stop = StopReason::nonfinite;
      rep.stop_detail = e.what();
      break;
    }
    const double prev_uxx = diag.uxx_linf;
    u = std::move(next);
    t = clipped ? target : t + dt;
    ++rep.steps;
    diag = detail::diagnose(u);
    B += 0.5 * dt * (prev_uxx + diag.uxx_linf);
    if (clipped && snap_due) {
      rep.snapshot_times.push_back(t);
      rep.snapshots.push_back(u);
      ++next_snap;
    }

    const bool unresolved = cfg.stop_on_resolution && diag.tail > cfg.tail_tol;
    const bool done = t >= cfg.t_end;
    if (rep.steps % cfg.cadence == 0 || done || unresolved) record(diag);
    if (unresolved) {
      rep.stop = StopReason::resolution_stop;
      rep.stop_detail = "spectral tail fraction exceeded tolerance";
      break;
    }
  }
  rep.final_field = u;
  rep.final_time = t;
  return rep;
}

// ---------------------------------------------------------------------------
// Degasperis-Procesi cross-check
// ---------------------------------------------------------------------------

/// v = 2(2 - d_x)u; maps a solution of the evolved equation to one of DP.
inline RealField dp_transform(const RealField& u) {
  const RealField ux = derivative(u, 1);
  RealField v(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = 2.0 * (2.0 * u[i] - ux[i]);
  return v;
}

/// max over interior snapshots of ||(1 - d_xx)v_t - (4vv_x - 3v_xv_xx - vv_xxx)||_2,
/// with v_t from the three-point difference on the (possibly uneven) time grid.
inline double dp_residual(const std::vector<double>& times, const std::vector<RealField>& v) {
  if (times.size() != v.size()) throw ConfigError("dp_residual: times and snapshots differ in length");
  if (v.size() < 3) throw ConfigError("dp_residual: need at least 3 snapshots");
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double h1 = times[i] - times[i - 1], h2 = times[i + 1] - times[i];
    if (!(h1 > 0.0 && h2 > 0.0)) throw ConfigError("dp_residual: snapshot times must increase");
    const double a = -h2 / (h1 * (h1 + h2)), b = (h2 - h1) / (h1 * h2), c = h1 / (h2 * (h1 + h2));
    RealField vt(v[i].grid);
    for (std::size_t q = 0; q < vt.size(); ++q) vt[q] = a * v[i - 1][q] + b * v[i][q] + c * v[i + 1][q];
    const SpectralField V = to_spectral(v[i]);
    const RealField vx = to_physical(derivative(V, 1));
    const RealField vxx = to_physical(derivative(V, 2));
    const RealField vxxx = to_physical(derivative(V, 3));
    const RealField lhs = helmholtz(vt);
    RealField r(vt.grid);
    for (std::size_t q = 0; q < r.size(); ++q)
      r[q] = lhs[q] - (4.0 * v[i][q] * vx[q] - 3.0 * vx[q] * vxx[q] - v[i][q] * vxxx[q]);
    worst = std::max(worst, l2_norm(r));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Twin-run stability
// ---------------------------------------------------------------------------

struct StabilityReport {
  std::vector<double> times;
  std::vector<double> ratios;   // ||M(t) - N(t)|| / ||M(0) - N(0)|| in B^{s-1}_{2,2}
  double sup_ratio = 0.0;
  bool perfect_match = false;   // identical data: 0/0 reported as a match
  bool valid = true;
  std::string note;
};

/// Evolve u0 and v0 on a shared fixed time grid and compare the m-fields.
/// When cfg.dt is 0, the step is frozen at the CFL value of u0 so both runs
/// take identical steps.
inline StabilityReport stability_experiment(const RealField& u0, const RealField& v0, double T, SolverConfig cfg,
                                            double s = 1.5, std::size_t samples = 20) {
  require_same_grid(u0, v0, "stability_experiment");
  cfg.t_end = T;
  cfg.stop_on_resolution = false;
  if (cfg.dt == 0.0) {
    const RealField p = cfg.dealias ? dealias(u0) : u0;
    cfg.dt = detail::cfl_dt(p, cfg, 0.0);
    if (!std::isfinite(cfg.dt)) cfg.dt = T / 100.0;
  }
  cfg.snapshot_interval = T / static_cast<double>(samples);
  StabilityReport rep;
  RunReport a, b;
  try {
    a = evolve(u0, cfg);
    b = evolve(v0, cfg);
  } catch (const DivergedError& e) {
    rep.valid = false;
    rep.note = e.what();
    return rep;
  }
  if (a.stop != StopReason::reached_T_end || b.stop != StopReason::reached_T_end ||
      a.snapshots.size() != b.snapshots.size()) {
    rep.valid = false;
    rep.note = "a twin run did not reach T";
    return rep;
  }
  const DyadicPartition P = build_partition(u0.grid);
  const BesovParams bp{s - 1.0, 2.0, 2.0};
  const double d0 = besov_norm(helmholtz(a.snapshots[0] - b.snapshots[0]), bp, P);
  if (d0 == 0.0) rep.perfect_match = true;
  for (std::size_t q = 0; q < a.snapshots.size(); ++q) {
    const double d = besov_norm(helmholtz(a.snapshots[q] - b.snapshots[q]), bp, P);
    const double r = d0 == 0.0 ? (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : d / d0;
    rep.times.push_back(a.snapshot_times[q]);
    rep.ratios.push_back(r);
    rep.sup_ratio = std::max(rep.sup_ratio, r);
  }
  return rep;
}

}  // namespace gchlab

#endif  // GCHLAB_DYNAMICS_HPP
