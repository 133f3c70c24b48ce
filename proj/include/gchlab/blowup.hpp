#ifndef GCHLAB_BLOWUP_HPP
#define GCHLAB_BLOWUP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gchlab/dynamics.hpp"
#include "gchlab/errors.hpp"
#include "gchlab/grid.hpp"
#include "gchlab/spectral.hpp"

namespace gchlab {

/// C_T = 4(54 T ||u0||_{H^1}^2 + 6 ||u0||_{H^{3/2}}).
inline double compute_CT(const RealField& u0, double T) {
  if (T < 0.0) throw PreconditionError("compute_CT: T must be >= 0");
  const double h1 = sobolev_norm(u0, 1.0);
  return 4.0 * (54.0 * T * h1 * h1 + 6.0 * sobolev_norm(u0, 1.5));
}

/// Blow-up time of dw/dt = -w^2 + C^2 started at w0 < -C < 0.
inline double riccati_bound_time(double w0, double C) {
  if (!(C > 0.0) || !(w0 < -C)) throw PreconditionError("riccati_bound_time: requires w0 < -C < 0");
  return -std::log((w0 + C) / (w0 - C)) / (2.0 * C);
}

struct BlowupSetup {
  double T = 0.0;
  double C_T = 0.0;
  double min_uxx0 = 0.0;       // min u0'' (drives the verdict)
  double x0 = 0.0;             // its location
  double w0_char = 0.0;        // 2 min(u0'' - 2u0_x)
  bool verdict = false;        // min u0'' < -C_T
  double bound_time = std::numeric_limits<double>::quiet_NaN();       // Riccati time with w0 = min u0''
  double bound_time_char = std::numeric_limits<double>::quiet_NaN();  // Riccati time with w0 = w0_char
  bool self_consistent = false;  // verdict and bound_time <= T
};

inline BlowupSetup check_condition(const RealField& u0, double T) {
  BlowupSetup s;
  s.T = T;
  s.C_T = compute_CT(u0, T);
  const Extremum e = min_uxx(u0);
  s.min_uxx0 = e.value;
  s.x0 = e.location;
  const SpectralField U = to_spectral(u0);
  const RealField ux = to_physical(derivative(U, 1));
  const RealField uxx = to_physical(derivative(U, 2));
  s.w0_char = detail::refined_min(uxx - 2.0 * ux).value * 2.0;
  s.verdict = s.min_uxx0 < -s.C_T;
  if (s.C_T > 0.0 && s.min_uxx0 < -s.C_T) s.bound_time = riccati_bound_time(s.min_uxx0, s.C_T);
  if (s.C_T > 0.0 && s.w0_char < -s.C_T) s.bound_time_char = riccati_bound_time(s.w0_char, s.C_T);
  s.self_consistent = s.verdict && s.bound_time <= T;
  return s;
}

struct RiccatiTrajectory {
  std::vector<double> t;
  std::vector<double> w;
  double divergence_time = 0.0;
  bool stays_below_minus_C = true;
  bool strictly_decreasing = true;
};

/// RK4 on dw/dt = -w^2 + C^2 with step min(dt, eta/|w|) until |w| > 1e8. The
/// divergence time adds the leading-order remainder 1/|w| to the last time.
inline RiccatiTrajectory riccati_solve(double w0, double C, double dt, double eta = 2e-3) {
  if (!(w0 < -C)) throw PreconditionError("riccati_solve: requires w0 < -C");
  if (!(dt > 0.0)) throw ConfigError("riccati_solve: dt must be positive");
  auto f = [C](double w) { return -w * w + C * C; };
  RiccatiTrajectory tr;
  double t = 0.0, w = w0;
  tr.t.push_back(t);
  tr.w.push_back(w);
  while (std::abs(w) <= 1e8) {
    const double h = std::min(dt, eta / std::abs(w));
    const double k1 = f(w), k2 = f(w + 0.5 * h * k1), k3 = f(w + 0.5 * h * k2), k4 = f(w + h * k3);
    const double next = w + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(next < w)) tr.strictly_decreasing = false;
    if (!(next < -C)) tr.stays_below_minus_C = false;
    w = next;
    t += h;
    tr.t.push_back(t);
    tr.w.push_back(w);
  }
  tr.divergence_time = t + 1.0 / std::abs(w);
  return tr;
}

// ---------------------------------------------------------------------------
// Blow-up time and rate from a run
// ---------------------------------------------------------------------------

struct BlowupEstimate {
  double T_est = std::numeric_limits<double>::quiet_NaN();
  double fit_residual = 0.0;  // rms of the linear fit to 1/min_uxx
  std::size_t first = 0;      // sample index range of the fit window
  std::size_t last = 0;
  std::vector<std::size_t> window;
};

/// Fits 1/y(t) = a t + b on the given samples; T_est = -b/a.
inline BlowupEstimate estimate_blowup_time(const std::vector<double>& t, const std::vector<double>& min_uxx) {
  if (t.size() != min_uxx.size() || t.size() < 3)
    throw EstimationError("estimate_blowup_time: need at least 3 samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(min_uxx[i] < 0.0)) throw EstimationError("estimate_blowup_time: min u_xx not negative in window");
    if (i > 0 && !(min_uxx[i] < min_uxx[i - 1]))
      throw EstimationError("estimate_blowup_time: min u_xx not decreasing in window");
  }
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += 1.0 / min_uxx[i];
  }
  const double tm = st / n, ym = sy / n;
  double stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (1.0 / min_uxx[i] - ym);
  }
  const double a = sty / stt, b = ym - a * tm;
  if (!(a > 0.0)) throw EstimationError("estimate_blowup_time: 1/min u_xx is not increasing toward 0");
  BlowupEstimate est;
  est.T_est = -b / a;
  double rss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = 1.0 / min_uxx[i] - (a * t[i] + b);
    rss += r * r;
  }
  est.fit_residual = std::sqrt(rss / n);
  est.first = 0;
  est.last = t.size() - 1;
  if (!(est.T_est > t.back())) throw EstimationError("estimate_blowup_time: root precedes the last sample");
  return est;
}

/// Indices of the last K resolved samples with negative min u_xx.
inline std::vector<std::size_t> resolved_window(const RunReport& run, std::size_t K) {
  std::vector<std::size_t> idx;
  for (std::size_t i = run.samples.size(); i-- > 0 && idx.size() < K;)
    if (run.samples[i].resolved && run.samples[i].min_uxx < 0.0) idx.push_back(i);
  std::reverse(idx.begin(), idx.end());
  return idx;
}

inline BlowupEstimate estimate_blowup_time(const RunReport& run, std::size_t K = 20) {
  if (run.stop != StopReason::resolution_stop)
    throw EstimationError("estimate_blowup_time: run did not end in resolution_stop");
  const auto idx = resolved_window(run, K);
  std::vector<double> t, y;
  for (auto i : idx) {
    t.push_back(run.samples[i].t);
    y.push_back(run.samples[i].min_uxx);
  }
  BlowupEstimate est = estimate_blowup_time(t, y);
  est.window = idx;
  est.first = idx.front();
  est.last = idx.back();
  return est;
}

struct RateReport {
  double T_est = 0.0;
  std::vector<double> t;
  std::vector<double> P;        // min u_xx (T_est - t)
  std::vector<double> P_ux;     // min u_x (T_est - t)
  double window_mean = 0.0;
  bool inconclusive = false;    // fewer than 5 samples
  bool in_band = false;         // window mean in [-0.70, -0.35]
  bool ux_product_shrinking = false;
};

inline RateReport rate_report(const std::vector<double>& t, const std::vector<double>& min_uxx,
                              const std::vector<double>& min_ux, double T_est) {
  if (t.size() != min_uxx.size() || t.size() != min_ux.size())
    throw ConfigError("rate_report: series lengths differ");
  if (!std::isfinite(T_est)) throw PreconditionError("rate_report: invalid T_est");
  RateReport r;
  r.T_est = T_est;
  r.t = t;
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    r.P.push_back(min_uxx[i] * (T_est - t[i]));
    r.P_ux.push_back(min_ux[i] * (T_est - t[i]));
    acc += r.P.back();
  }
  r.inconclusive = t.size() < 5;
  r.window_mean = t.empty() ? std::numeric_limits<double>::quiet_NaN() : acc / static_cast<double>(t.size());
  r.in_band = r.window_mean >= -0.70 && r.window_mean <= -0.35;
  r.ux_product_shrinking = !r.P_ux.empty() && std::abs(r.P_ux.back()) < std::abs(r.P_ux.front());
  return r;
}

/// Rate over the same window the blow-up time was fitted on.
inline RateReport rate_report(const RunReport& run, const BlowupEstimate& est) {
  std::vector<double> t, y, yx;
  for (auto i : est.window) {
    t.push_back(run.samples[i].t);
    y.push_back(run.samples[i].min_uxx);
    yx.push_back(run.samples[i].min_ux);
  }
  return rate_report(t, y, yx, est.T_est);
}

/// True when the refined report's window mean is strictly closer to -1/2.
inline bool closer_to_half(const RateReport& coarse, const RateReport& fine) {
  return std::abs(fine.window_mean + 0.5) < std::abs(coarse.window_mean + 0.5);
}

/// Mean growth rate of B over the second half of the last K samples exceeds
/// that of the first half by the given margin.
inline bool B_superlinear(const RunReport& run, std::size_t K = 20, double margin = 0.05) {
  if (run.samples.size() < 3) return false;
  const std::size_t n = run.samples.size();
  const std::size_t first = n > K ? n - K : 0;
  const std::size_t mid = first + (n - 1 - first) / 2;
  const auto& a = run.samples[first];
  const auto& m = run.samples[mid];
  const auto& b = run.samples[n - 1];
  if (!(m.t > a.t && b.t > m.t)) return false;
  const double s1 = (m.B - a.B) / (m.t - a.t);
  const double s2 = (b.B - m.B) / (b.t - m.t);
  return s2 > (1.0 + margin) * s1;
}

/// max |B(t)/t - mean| / mean over samples with t > 0.
inline double B_linear_spread(const RunReport& run) {
  std::vector<double> r;
  for (const auto& s : run.samples)
    if (s.t > 0.0) r.push_back(s.B / s.t);
  if (r.empty()) return 0.0;
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= static_cast<double>(r.size());
  double d = 0.0;
  for (double v : r) d = std::max(d, std::abs(v - mean));
  return mean != 0.0 ? d / mean : 0.0;
}

}  // namespace gchlab

#endif  // GCHLAB_BLOWUP_HPP
