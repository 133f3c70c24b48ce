#ifndef GCHLAB_GRID_HPP
#define GCHLAB_GRID_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "gchlab/errors.hpp"

namespace gchlab {

/// Uniform periodic grid on [-L, L) with N points (N a power of two, N >= 16).
class Grid1D {
 public:
  Grid1D() : Grid1D(40.0, 4096) {}

  Grid1D(double half_width, std::size_t n_points) : L_(half_width), n_(n_points) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw ConfigError("grid: half_width must be positive and finite");
    if (n_points < 16 || (n_points & (n_points - 1)) != 0)
      throw ConfigError("grid: n_points must be a power of two >= 16, got " +
                        std::to_string(n_points));
    // N is a power of two, so this division is exact and dx*N == 2L.
    dx_ = 2.0 * L_ / static_cast<double>(n_);
  }

  double half_width() const { return L_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double length() const { return 2.0 * L_; }
  double x(std::size_t i) const { return -L_ + static_cast<double>(i) * dx_; }

  /// Signed mode index of FFT bin i, in [-N/2, N/2).
  long mode(std::size_t i) const {
    const long n = static_cast<long>(n_);
    const long j = static_cast<long>(i);
    return j < n / 2 ? j : j - n;
  }

  /// Wavenumber k = pi*j/L of FFT bin i.
  double wavenumber(std::size_t i) const {
    return std::numbers::pi * static_cast<double>(mode(i)) / L_;
  }

  std::size_t nyquist_index() const { return n_ / 2; }
  double nyquist_wavenumber() const { return std::numbers::pi * static_cast<double>(n_ / 2) / L_; }

  /// Grid refined by a factor two on the same domain.
  Grid1D refined() const { return Grid1D(L_, 2 * n_); }

  bool operator==(const Grid1D& o) const { return L_ == o.L_ && n_ == o.n_; }
  bool operator!=(const Grid1D& o) const { return !(*this == o); }

 private:
  double L_;
  std::size_t n_;
  double dx_;
};

/// Real samples of a function on a grid.
struct RealField {
  Grid1D grid;
  std::vector<double> values;

  RealField() = default;
  explicit RealField(const Grid1D& g) : grid(g), values(g.size(), 0.0) {}
  RealField(const Grid1D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
      throw ConfigError("field: sample count " + std::to_string(values.size()) +
                        " does not match grid size " + std::to_string(grid.size()));
  }

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Fourier coefficients c_j = (1/N) sum_n f_n e^{-i k_j (x_n + L)}, FFT-ordered.
struct SpectralField {
  Grid1D grid;
  std::vector<std::complex<double>> coeffs;

  SpectralField() = default;
  explicit SpectralField(const Grid1D& g) : grid(g), coeffs(g.size()) {}
  SpectralField(const Grid1D& g, std::vector<std::complex<double>> c)
      : grid(g), coeffs(std::move(c)) {
    if (coeffs.size() != grid.size())
      throw ConfigError("spectral field: coefficient count does not match grid size");
  }

  std::size_t size() const { return coeffs.size(); }
};

inline RealField sample(const Grid1D& g, const std::function<double(double)>& f) {
  RealField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.x(i));
  return out;
}

inline void require_same_grid(const RealField& a, const RealField& b, const char* what) {
  if (a.grid != b.grid || a.size() != b.size())
    throw ConfigError(std::string(what) + ": fields live on different grids");
}

// Pointwise arithmetic used throughout the solvers.
inline RealField operator+(RealField a, const RealField& b) {
  require_same_grid(a, b, "operator+");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}
inline RealField operator-(RealField a, const RealField& b) {
  require_same_grid(a, b, "operator-");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}
inline RealField operator*(double s, RealField a) {
  for (double& v : a.values) v *= s;
  return a;
}
inline RealField operator*(RealField a, const RealField& b) {
  require_same_grid(a, b, "operator*");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return a;
}

inline double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace gchlab

#endif  // GCHLAB_GRID_HPP
