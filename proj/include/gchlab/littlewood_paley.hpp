#ifndef GCHLAB_LITTLEWOOD_PALEY_HPP
#define GCHLAB_LITTLEWOOD_PALEY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gchlab/errors.hpp"
#include "gchlab/grid.hpp"
#include "gchlab/spectral.hpp"

namespace gchlab {

namespace detail {

// Normalized integral of the bump exp(-1/(1-t^2)) from -1 to t: a C-infinity
// step that is 0 for t <= -1 and 1 for t >= 1. Composite 8-point
// Gauss-Legendre on 64 panels gives about 1e-15; evaluating t > 0 through
// the mirror image keeps s(t) + s(-t) = 1 to rounding.
inline double mollified_step(double t) {
  if (t <= -1.0) return 0.0;
  if (t >= 1.0) return 1.0;
  static constexpr std::array<double, 4> node = {0.1834346424956498, 0.5255324099163290,
                                                 0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> weight = {0.3626837833783620, 0.3137066458778873,
                                                   0.2223810344533745, 0.1012285362903763};
  auto bump = [](double s) { return s <= -1.0 || s >= 1.0 ? 0.0 : std::exp(-1.0 / (1.0 - s * s)); };
  auto integrate = [&](double a, double b) {
    constexpr int panels = 64;
    const double h = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (std::size_t q = 0; q < node.size(); ++q)
        acc += weight[q] * (bump(mid - 0.5 * h * node[q]) + bump(mid + 0.5 * h * node[q]));
    }
    return 0.5 * h * acc;
  };
  static const double total = integrate(-1.0, 1.0);
  if (t > 0.0) return std::clamp(1.0 - integrate(-1.0, -t) / total, 0.0, 1.0);
  return std::clamp(integrate(-1.0, t) / total, 0.0, 1.0);
}

// Radial profile equal to 1 on [0, 3/4], 0 on [4/3, inf), smooth between.
inline double low_profile(double r) {
  constexpr double a = 0.75, b = 4.0 / 3.0;
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  return 1.0 - mollified_step(2.0 * (r - a) / (b - a) - 1.0);
}

}  // namespace detail

/// Littlewood-Paley multipliers sampled at the grid's FFT bins.
struct DyadicPartition {
  Grid1D grid;
  std::vector<double> chi;
  std::vector<std::vector<double>> phi;  // phi[j] samples phi(2^{-j} xi), j = 0..j_max
  int j_max = -1;

  /// Multiplier of block j (j = -1 is chi); zero vector outside [-1, j_max].
  std::vector<double> multiplier(int j) const {
    if (j == -1) return chi;
    if (j < -1 || j > j_max) return std::vector<double>(grid.size(), 0.0);
    return phi[static_cast<std::size_t>(j)];
  }
};

/// phi(xi) = h(xi/2) - h(xi) with h the smooth low profile, so
/// supp phi is inside [3/4, 8/3] and the dyadic sum telescopes. chi is the
/// complement of the phi-sum, clamped to exactly zero past 4/3.
inline DyadicPartition build_partition(const Grid1D& grid) {
  const double kmax = grid.nyquist_wavenumber();
  int j_max = -1;
  while (0.75 * std::ldexp(1.0, j_max + 1) < kmax) ++j_max;
  if (j_max < 0) throw ConfigError("build_partition: grid too coarse to host any dyadic annulus");

  DyadicPartition P;
  P.grid = grid;
  P.j_max = j_max;
  const std::size_t n = grid.size();
  P.phi.assign(static_cast<std::size_t>(j_max) + 1, std::vector<double>(n, 0.0));
  P.chi.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = std::abs(grid.wavenumber(i));
    double sum = 0.0;
    for (int j = 0; j <= j_max; ++j) {
      const double r = std::ldexp(xi, -j);
      double v = 0.0;
      if (r > 0.75 && r < 8.0 / 3.0) v = detail::low_profile(0.5 * r) - detail::low_profile(r);
      P.phi[static_cast<std::size_t>(j)][i] = v;
      sum += v;
    }
    P.chi[i] = xi >= 4.0 / 3.0 ? 0.0 : 1.0 - sum;
  }
  return P;
}

inline void require_partition_grid(const RealField& f, const DyadicPartition& P, const char* what) {
  if (f.grid != P.grid) throw ConfigError(std::string(what) + ": field and partition grids differ");
}

/// Delta_j f; zero for j < -1 and for j beyond the grid's top block.
inline RealField dyadic_block(const RealField& f, int j, const DyadicPartition& P) {
  require_partition_grid(f, P, "dyadic_block");
  if (j < -1 || j > P.j_max) return RealField(f.grid);
  const auto& mult = j == -1 ? P.chi : P.phi[static_cast<std::size_t>(j)];
  auto F = to_spectral(f);
  for (std::size_t i = 0; i < F.size(); ++i) F.coeffs[i] *= mult[i];
  return to_physical(F);
}

/// S_j f = sum of Delta_{j'} f over j' <= j - 1.
inline RealField low_cutoff(const RealField& f, int j, const DyadicPartition& P) {
  require_partition_grid(f, P, "low_cutoff");
  if (j < 0) throw PreconditionError("low_cutoff: j must be >= 0");
  auto F = to_spectral(f);
  const int top = std::min(j - 1, P.j_max);
  for (std::size_t i = 0; i < F.size(); ++i) {
    double m = P.chi[i];
    for (int q = 0; q <= top; ++q) m += P.phi[static_cast<std::size_t>(q)][i];
    F.coeffs[i] *= m;
  }
  return to_physical(F);
}

/// Range of chi^2 + sum_j phi_j^2 over the grid's bins.
struct PartitionBounds {
  double min_sq = 0.0;
  double max_sq = 0.0;
  double max_sum_defect = 0.0;  // max |chi + sum_j phi_j - 1|
};

inline PartitionBounds partition_bounds(const DyadicPartition& P) {
  PartitionBounds b;
  b.min_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < P.grid.size(); ++i) {
    double sq = P.chi[i] * P.chi[i], sum = P.chi[i];
    for (const auto& ph : P.phi) {
      sq += ph[i] * ph[i];
      sum += ph[i];
    }
    b.min_sq = std::min(b.min_sq, sq);
    b.max_sq = std::max(b.max_sq, sq);
    b.max_sum_defect = std::max(b.max_sum_defect, std::abs(sum - 1.0));
  }
  return b;
}

/// Relative L2 error of f against the sum of its blocks.
inline double reconstruction_error(const RealField& f, const DyadicPartition& P) {
  RealField acc(f.grid);
  for (int j = -1; j <= P.j_max; ++j) acc = acc + dyadic_block(f, j, P);
  const double n = l2_norm(f);
  return n == 0.0 ? l2_norm(acc) : l2_norm(acc - f) / n;
}

struct BesovParams {
  double s = 0.0;
  double p = 2.0;
  double r = 2.0;

  void validate() const {
    if (!(p >= 1.0) || !(r >= 1.0)) throw ConfigError("BesovParams: p and r must be >= 1");
    if (!std::isfinite(s)) throw ConfigError("BesovParams: s must be finite");
  }
};

/// L^p norms of Delta_j f for j = -1..j_max (index 0 holds j = -1).
inline std::vector<double> block_norms(const RealField& f, double p, const DyadicPartition& P) {
  require_partition_grid(f, P, "block_norms");
  const auto F = to_spectral(f);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(P.j_max) + 2);
  for (int j = -1; j <= P.j_max; ++j) {
    const auto& mult = j == -1 ? P.chi : P.phi[static_cast<std::size_t>(j)];
    if (p == 2.0) {
      // Parseval: same value as the Riemann sum of the block, without the inverse FFT.
      double acc = 0.0;
      for (std::size_t i = 0; i < F.size(); ++i) acc += mult[i] * mult[i] * std::norm(F.coeffs[i]);
      out.push_back(std::sqrt(acc * f.grid.length()));
    } else {
      SpectralField B = F;
      for (std::size_t i = 0; i < B.size(); ++i) B.coeffs[i] *= mult[i];
      out.push_back(lp_norm(to_physical(B), p));
    }
  }
  return out;
}

/// (sum_j 2^{rjs} ||Delta_j f||_p^r)^{1/r}; r = infinity takes the sup.
inline double besov_norm(const RealField& f, const BesovParams& bp, const DyadicPartition& P) {
  bp.validate();
  const auto norms = block_norms(f, bp.p, P);
  if (std::isinf(bp.r)) {
    double m = 0.0;
    for (std::size_t q = 0; q < norms.size(); ++q) {
      const int j = static_cast<int>(q) - 1;
      m = std::max(m, std::exp2(j * bp.s) * norms[q]);
    }
    return m;
  }
  double acc = 0.0;
  for (std::size_t q = 0; q < norms.size(); ++q) {
    const int j = static_cast<int>(q) - 1;
    acc += std::pow(std::exp2(j * bp.s) * norms[q], bp.r);
  }
  return std::pow(acc, 1.0 / bp.r);
}

}  // namespace gchlab

#endif  // GCHLAB_LITTLEWOOD_PALEY_HPP
