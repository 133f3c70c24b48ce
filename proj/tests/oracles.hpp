// Independent reference computations used by the tests. Nothing here calls
// into the spectral machinery under test.

#ifndef GCHLAB_TESTS_ORACLES_HPP
#define GCHLAB_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// O(N^2) DFT with the library's normalization: c_j = (1/N) sum_n f_n e^{-i k_j (x_n + L)}.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& f) {
  const std::size_t n = f.size();
  std::vector<std::complex<double>> c(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double> acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(j * q % n) / static_cast<double>(n);
      acc += f[q] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    c[j] = acc / static_cast<double>(n);
  }
  return c;
}

/// Adaptive Simpson on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                      int depth = 50) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double a0, double b0, double fa, double fm, double fb, double whole, double eps, int d) {
        const double m = 0.5 * (a0 + b0), lm = 0.5 * (a0 + m), rm = 0.5 * (m + b0);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a0) / 6.0 * (fa + 4.0 * flm + fm);
        const double right = (b0 - m) / 6.0 * (fm + 4.0 * frm + fb);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
          return left + right + (left + right - whole) / 15.0;
        return rec(a0, m, fa, flm, fm, left, 0.5 * eps, d - 1) + rec(m, b0, fm, frm, fb, right, 0.5 * eps, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

/// Piecewise-smooth integral split at the given interior points.
inline double integrate(const std::function<double(double)>& f, std::vector<double> cuts, double tol = 1e-13) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) acc += simpson(f, cuts[i], cuts[i + 1], tol);
  return acc;
}

/// Fourier transform of the c = 1 peakon profile at t = 0:
/// u = -e^{-x}/6 (x >= 0), -e^{x}/2 + e^{2x}/3 (x < 0).
inline std::complex<double> peakon_hat(double xi) {
  const std::complex<double> I(0.0, 1.0);
  return -1.0 / 6.0 / (1.0 + I * xi) - 0.5 / (1.0 - I * xi) + (1.0 / 3.0) / (2.0 - I * xi);
}

/// ||u||_{H^s}^2 = (1/2pi) int (1 + xi^2)^s |u_hat|^2 over the real line, by
/// quadrature on [0, X] plus the leading-order tail (|u_hat|^2 ~ a / xi^6).
inline double peakon_sobolev_sq(double s, double X = 2000.0) {
  auto f = [s](double xi) { return std::pow(1.0 + xi * xi, s) * std::norm(peakon_hat(xi)); };
  std::vector<double> cuts{0.0};
  for (double c = 1.0; c < X; c *= 2.0) cuts.push_back(c);
  cuts.push_back(X);
  const double body = integrate(f, cuts, 1e-15);
  // The 1/xi and 1/xi^2 terms cancel (u and u_x are continuous); the leading
  // term is -1/(i xi)^3, so |u_hat|^2 xi^6 -> 1.
  const double a = 1.0;
  const double tail = a * std::pow(X, 2.0 * s - 5.0) / (5.0 - 2.0 * s);
  return 2.0 * (body + tail) / (2.0 * std::numbers::pi);
}

}  // namespace oracle

#endif  // GCHLAB_TESTS_ORACLES_HPP
