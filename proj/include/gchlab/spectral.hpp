#ifndef GCHLAB_SPECTRAL_HPP
#define GCHLAB_SPECTRAL_HPP

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "gchlab/errors.hpp"
#include "gchlab/grid.hpp"

namespace gchlab {

namespace detail {

// FFTW plans are created once per size under a lock (the planner is not
// thread safe); fftw_execute_dft on a finished plan is.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  std::pair<fftw_plan, fftw_plan> get(std::size_t n) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> a(n), b(n);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, flags);
    fftw_plan bwd = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_BACKWARD, flags);
    return plans_.emplace(n, std::make_pair(fwd, bwd)).first->second;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [n, p] : plans_) {
      fftw_destroy_plan(p.first);
      fftw_destroy_plan(p.second);
    }
  }

  std::mutex mu_;
  std::map<std::size_t, std::pair<fftw_plan, fftw_plan>> plans_;
};

inline void execute(fftw_plan p, std::vector<std::complex<double>>& in,
                    std::vector<std::complex<double>>& out) {
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail

/// Forward transform, normalized by 1/N so coeffs[0] is the sample mean.
inline SpectralField to_spectral(const RealField& f) {
  if (f.values.size() != f.grid.size())
    throw ConfigError("to_spectral: field length does not match its grid");
  const std::size_t n = f.size();
  std::vector<std::complex<double>> in(n), out(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = f[i];
  detail::execute(detail::FftPlans::instance().get(n).first, in, out);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= inv;
  return SpectralField(f.grid, std::move(out));
}

/// Inverse transform; keeps the real part.
inline RealField to_physical(const SpectralField& F) {
  if (F.coeffs.size() != F.grid.size())
    throw ConfigError("to_physical: coefficient length does not match its grid");
  const std::size_t n = F.size();
  std::vector<std::complex<double>> in(F.coeffs), out(n);
  detail::execute(detail::FftPlans::instance().get(n).second, in, out);
  RealField f(F.grid);
  for (std::size_t i = 0; i < n; ++i) f[i] = out[i].real();
  return f;
}

/// Multiply every coefficient by mult(bin index, wavenumber).
template <class Mult>
SpectralField apply_multiplier(SpectralField F, Mult&& mult) {
  for (std::size_t i = 0; i < F.size(); ++i) F.coeffs[i] *= mult(i, F.grid.wavenumber(i));
  return F;
}

/// (ik)^order; the Nyquist bin is zeroed for odd orders.
inline SpectralField derivative(SpectralField F, int order) {
  if (order < 1 || order > 4) throw ConfigError("derivative: order must be in 1..4");
  const std::size_t nyq = F.grid.nyquist_index();
  for (std::size_t i = 0; i < F.size(); ++i) {
    if ((order % 2 == 1) && i == nyq) {
      F.coeffs[i] = 0.0;
      continue;
    }
    const std::complex<double> ik(0.0, F.grid.wavenumber(i));
    std::complex<double> m = 1.0;
    for (int q = 0; q < order; ++q) m *= ik;
    F.coeffs[i] *= m;
  }
  return F;
}

inline RealField derivative(const RealField& f, int order) {
  return to_physical(derivative(to_spectral(f), order));
}

/// (1 - d^2/dx^2)^{-1} by division of coefficients.
inline RealField helmholtz_inverse(const RealField& f) {
  auto F = apply_multiplier(to_spectral(f), [](std::size_t, double k) { return 1.0 / (1.0 + k * k); });
  return to_physical(F);
}

/// (1 - d^2/dx^2) applied spectrally.
inline RealField helmholtz(const RealField& f) {
  auto F = apply_multiplier(to_spectral(f), [](std::size_t, double k) { return 1.0 + k * k; });
  return to_physical(F);
}

namespace detail {

// Eighth-order centered second difference on a periodic grid.
inline std::vector<double> second_difference(const std::vector<double>& f, double dx) {
  static constexpr double c[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  const std::size_t n = f.size();
  std::vector<double> out(n);
  const double inv = 1.0 / (dx * dx);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = c[0] * f[i];
    for (std::size_t q = 1; q <= 4; ++q) acc += c[q] * (f[(i + q) % n] + f[(i + n - q) % n]);
    out[i] = acc * inv;
  }
  return out;
}

// Samples of the periodized kernel sum_n (1/2) e^{-|z + 2Ln|} at z = m*dx.
inline std::vector<double> periodized_green(const Grid1D& g) {
  const std::size_t n = g.size();
  const double period = g.length();
  std::vector<double> K(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double z = static_cast<double>(m) * g.dx();
    double acc = 0.5 * std::exp(-z);
    for (int img = 1;; ++img) {
      const double right = 0.5 * std::exp(-(z + period * img));
      const double left = 0.5 * std::exp(-(period * img - z));
      acc += right + left;
      if (left < 1e-16 && right < 1e-16) break;
    }
    K[m] = acc;
  }
  return K;
}

}  // namespace detail

/// Circular trapezoid convolution with the periodized kernel (1/2)e^{-|x|}.
///
/// The kernel has a slope jump of -1 at the origin, which limits the plain
/// trapezoid rule to O(dx^2). Each correction level adds the next
/// Euler-Maclaurin term for that jump, using even derivatives of f from an
/// eighth-order finite-difference stencil (no FFT involved). corrections = 0
/// gives the plain rule; the maximum is 5.
inline RealField green_convolve(const RealField& f, int corrections = 4) {
  if (corrections < 0 || corrections > 5)
    throw ConfigError("green_convolve: corrections must be in 0..5");
  const Grid1D& g = f.grid;
  const std::size_t n = g.size();
  const double dx = g.dx();
  const std::vector<double> K = detail::periodized_green(g);

  RealField out(g);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += K[m] * f[(i + n - m) % n];
    out[i] = acc * dx;
  }
  if (corrections == 0) return out;

  // d[q] holds the 2q-th derivative of f.
  std::vector<std::vector<double>> d{f.values};
  for (int q = 1; q < corrections; ++q) d.push_back(detail::second_difference(d.back(), dx));

  // Integral = trapezoid - sum_k B_{2k}/(2k)! dx^{2k} sum_{odd i<2k} C(2k-1,i) f^{(2k-1-i)}.
  static constexpr double bern[5] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0};
  auto binom = [](int a, int b) {
    double r = 1.0;
    for (int q = 1; q <= b; ++q) r = r * (a - b + q) / q;
    return r;
  };
  double fact = 1.0, hpow = 1.0;
  for (int k = 1; k <= corrections; ++k) {
    fact *= (2.0 * k - 1.0) * (2.0 * k);
    hpow *= dx * dx;
    const double scale = bern[k - 1] / fact * hpow;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int odd = 1; odd <= 2 * k - 1; odd += 2) s += binom(2 * k - 1, odd) * d[(2 * k - 1 - odd) / 2][i];
      out[i] -= scale * s;
    }
  }
  return out;
}

/// Riemann-sum L^p norm; p = infinity gives max|f|.
inline double lp_norm(const RealField& f, double p) {
  if (!(p >= 1.0)) throw ConfigError("lp_norm: p must be >= 1");
  if (std::isinf(p)) return max_abs(f);
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : f.values) acc += v * v;
    return std::sqrt(acc * f.grid.dx());
  }
  for (double v : f.values) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid.dx(), 1.0 / p);
}

inline double l2_norm(const RealField& f) { return lp_norm(f, 2.0); }

/// Sobolev norm with Parseval weight 2L sum (1+k^2)^s |c_k|^2.
inline double sobolev_norm(const SpectralField& F, double s) {
  if (s < -4.0 || s > 4.0) throw ConfigError("sobolev_norm: s must be in [-4, 4]");
  double acc = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double k = F.grid.wavenumber(i);
    acc += std::pow(1.0 + k * k, s) * std::norm(F.coeffs[i]);
  }
  return std::sqrt(acc * F.grid.length());
}

inline double sobolev_norm(const RealField& f, double s) {
  if (s == 0.0) return lp_norm(f, 2.0);
  return sobolev_norm(to_spectral(f), s);
}

/// True when |f| at the periodic seam exceeds 1e-10 of max|f|.
inline bool domain_polluted(const RealField& f, double rel_tol = 1e-10) {
  const double m = max_abs(f);
  if (m == 0.0) return false;
  const double edge = std::max(std::abs(f[0]), std::abs(f[f.size() - 1]));
  return edge > rel_tol * m;
}

/// Index bound of the 2/3 rule: modes with |j| >= N/3 are removed.
inline long dealias_cutoff(const Grid1D& g) { return static_cast<long>(g.size() / 3); }

inline void dealias_in_place(SpectralField& F) {
  const long cut = dealias_cutoff(F.grid);
  for (std::size_t i = 0; i < F.size(); ++i)
    if (std::labs(F.grid.mode(i)) > cut - 1) F.coeffs[i] = 0.0;
}

inline RealField dealias(const RealField& f) {
  auto F = to_spectral(f);
  dealias_in_place(F);
  return to_physical(F);
}

/// Fraction of the k^weight_power weighted energy carried by the top third of
/// the retained 2/3 band, i.e. |j| in [2N/9, N/3).
inline double tail_fraction(const SpectralField& F, double weight_power = 2.0) {
  const long cut = dealias_cutoff(F.grid);
  const long lo = (2 * static_cast<long>(F.size())) / 9;
  double total = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const long j = std::labs(F.grid.mode(i));
    if (j >= cut) continue;
    const double k = F.grid.wavenumber(i);
    const double w = std::pow(1.0 + k * k, 0.5 * weight_power) * std::norm(F.coeffs[i]);
    total += w;
    if (j >= lo) tail += w;
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace gchlab

#endif  // GCHLAB_SPECTRAL_HPP
