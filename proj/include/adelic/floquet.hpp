#pragma once

// Floquet-Bloch band structure of the even periodic Hill operator
//   H = -d^2/dy^2 + U(y),   U(y) = sum_r c_r cos(2 pi r y / L),
// discretized in the plane-wave basis exp(2 pi i m y / L), |m| <= M, on each
// kappa-twisted fiber.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "adelic/error.hpp"
#include "adelic/linalg.hpp"

namespace adelic::floquet {

inline constexpr double kGapTolerance = 1e-6;
inline constexpr int kDefaultBands = 8;

/// Even L-periodic potential stored by its cosine coefficients c_1..c_R.
struct PotentialSpec {
  double period = 1.0;
  std::vector<double> cosine_coefficients;

  /// U(y) = 2 cos(2 pi y), L = 1.
  static PotentialSpec mathieu() { return {1.0, {2.0}}; }
  static PotentialSpec free(double period = 1.0) { return {period, {}}; }

  int harmonics() const { return static_cast<int>(cosine_coefficients.size()); }

  double operator()(double y) const {
    double u = 0.0;
    for (std::size_t r = 0; r < cosine_coefficients.size(); ++r)
      u += cosine_coefficients[r] *
           std::cos(2.0 * std::numbers::pi * static_cast<double>(r + 1) * y / period);
    return u;
  }

  void validate() const {
    if (!(period > 0.0) || !std::isfinite(period))
      throw Error("floquet", "potential period must be positive and finite");
    for (double c : cosine_coefficients)
      if (!std::isfinite(c)) throw Error("floquet", "non-finite cosine coefficient");
  }
};

/// Uniform quasi-momentum nodes on [-pi/L, pi/L], N odd, endpoints and 0
/// included. Node N-1-j is the exact negation of node j.
class QuasiMomentumGrid {
 public:
  QuasiMomentumGrid(int n_kappa, double period) : period_(period) {
    if (n_kappa < 1 || n_kappa % 2 == 0)
      throw Error("floquet", "N_kappa must be a positive odd integer");
    if (!(period > 0.0)) throw Error("floquet", "period must be positive");
    const auto n = static_cast<std::size_t>(n_kappa);
    nodes_.assign(n, 0.0);
    const std::size_t half = n / 2;
    const double edge = std::numbers::pi / period;
    for (std::size_t j = 0; j < half; ++j) {
      nodes_[j] = -edge + 2.0 * edge * static_cast<double>(j) / static_cast<double>(n - 1);
      nodes_[n - 1 - j] = -nodes_[j];
    }
    nodes_[half] = 0.0;
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  double operator[](std::size_t j) const { return nodes_[j]; }
  std::span<const double> nodes() const noexcept { return nodes_; }
  double period() const noexcept { return period_; }
  std::size_t mirror(std::size_t j) const noexcept { return nodes_.size() - 1 - j; }

  /// Trapezoid weights; they sum to 2 pi / L.
  std::vector<double> trapezoid_weights() const {
    const std::size_t n = nodes_.size();
    std::vector<double> w(n, 0.0);
    if (n == 1) {
      w[0] = 2.0 * std::numbers::pi / period_;
      return w;
    }
    const double h = 2.0 * std::numbers::pi / period_ / static_cast<double>(n - 1);
    std::fill(w.begin(), w.end(), h);
    w.front() = w.back() = 0.5 * h;
    return w;
  }

 private:
  double period_;
  std::vector<double> nodes_;
};

struct GapInterval {
  double lower;  // beta_n
  double upper;  // alpha_{n+1}
  int index;     // n

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (lower + upper); }
};

struct BandEdge {
  double min;  // alpha_n
  double max;  // beta_n
};

/// Band functions E[n][j] on a quasi-momentum grid, with band edges and the
/// open gaps between consecutive stored bands.
class BandStructure {
 public:
  /// Build from precomputed samples; energies[n][j] must be ascending in n
  /// for each j.
  static BandStructure from_samples(QuasiMomentumGrid grid,
                                    std::vector<std::vector<double>> energies,
                                    int truncation = 0) {
    if (energies.empty()) throw Error("floquet", "band structure needs at least one band");
    for (const auto& row : energies)
      if (row.size() != grid.size())
        throw Error("floquet", "band row length does not match the kappa grid");
    for (std::size_t j = 0; j < grid.size(); ++j)
      for (std::size_t n = 0; n + 1 < energies.size(); ++n)
        if (energies[n][j] > energies[n + 1][j])
          throw Error("floquet", "bands are not ordered at fiber " + std::to_string(j));
    BandStructure b(std::move(grid));
    b.bands_ = std::move(energies);
    b.truncation_ = truncation;
    b.finish();
    return b;
  }

  std::size_t band_count() const noexcept { return bands_.size(); }
  const QuasiMomentumGrid& grid() const noexcept { return grid_; }
  double period() const noexcept { return grid_.period(); }
  int truncation() const noexcept { return truncation_; }
  double energy(std::size_t n, std::size_t j) const { return bands_[n][j]; }
  std::span<const double> band(std::size_t n) const { return bands_[n]; }
  const std::vector<BandEdge>& edges() const noexcept { return edges_; }
  const std::vector<GapInterval>& gaps() const noexcept { return gaps_; }

 private:
  explicit BandStructure(QuasiMomentumGrid grid) : grid_(std::move(grid)) {}

  void finish() {
    edges_.clear();
    for (const auto& row : bands_) {
      const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
      edges_.push_back({*lo, *hi});
    }
    gaps_.clear();
    for (std::size_t n = 0; n + 1 < edges_.size(); ++n) {
      const double lower = edges_[n].max;
      const double upper = edges_[n + 1].min;
      if (upper - lower > kGapTolerance) gaps_.push_back({lower, upper, static_cast<int>(n)});
    }
  }

  QuasiMomentumGrid grid_;
  std::vector<std::vector<double>> bands_;
  std::vector<BandEdge> edges_;
  std::vector<GapInterval> gaps_;
  int truncation_ = 0;
};

/// Plane-wave matrix of the kappa fiber: diagonal (kappa + 2 pi m / L)^2 for
/// m = -M..M, and c_|m-m'| / 2 on the off-diagonals |m - m'| <= R.
inline linalg::SquareMatrix build_fiber_matrix(const PotentialSpec& potential, double kappa,
                                               int truncation) {
  potential.validate();
  if (!std::isfinite(kappa)) throw Error("floquet", "kappa is not finite");
  if (std::abs(kappa) > std::numbers::pi / potential.period + 1e-12)
    throw Error("floquet", "kappa outside the Brillouin zone [-pi/L, pi/L]");
  if (truncation < potential.harmonics())
    throw Error("floquet", "truncation M=" + std::to_string(truncation) +
                               " is below the number of potential harmonics R=" +
                               std::to_string(potential.harmonics()));
  const auto size = static_cast<std::size_t>(2 * truncation + 1);
  linalg::SquareMatrix a(size);
  const double g = 2.0 * std::numbers::pi / potential.period;
  for (std::size_t i = 0; i < size; ++i) {
    const double k = kappa + g * static_cast<double>(static_cast<int>(i) - truncation);
    a(i, i) = k * k;
  }
  for (std::size_t r = 1; r <= potential.cosine_coefficients.size(); ++r) {
    const double v = 0.5 * potential.cosine_coefficients[r - 1];
    for (std::size_t i = 0; i + r < size; ++i) {
      a(i, i + r) = v;
      a(i + r, i) = v;
    }
  }
  return a;
}

/// Ascending eigenvalues of one fiber matrix.
inline std::vector<double> fiber_eigenvalues(const PotentialSpec& potential, double kappa,
                                             int truncation) {
  return linalg::symmetric_eigenvalues(build_fiber_matrix(potential, kappa, truncation));
}

/// Lowest n_bands fiber eigenvalues for every grid node. Only nodes with
/// kappa >= 0 are solved; the rest are mirror copies.
inline BandStructure compute_band_structure(const PotentialSpec& potential,
                                            const QuasiMomentumGrid& grid, int truncation,
                                            int n_bands = kDefaultBands) {
  if (n_bands < 1) throw Error("floquet", "n_bands must be positive");
  if (n_bands > 2 * truncation)
    throw Error("floquet", "n_bands=" + std::to_string(n_bands) + " exceeds 2M=" +
                               std::to_string(2 * truncation));
  if (std::abs(grid.period() - potential.period) > 0.0)
    throw Error("floquet", "grid period does not match the potential period");
  const auto nb = static_cast<std::size_t>(n_bands);
  std::vector<std::vector<double>> energies(nb, std::vector<double>(grid.size(), 0.0));
  const std::size_t half = grid.size() / 2;
  for (std::size_t j = half; j < grid.size(); ++j) {
    std::vector<double> values;
    try {
      values = fiber_eigenvalues(potential, grid[j], truncation);
    } catch (const Error& e) {
      throw Error("floquet", "eigensolve failed at fiber " + std::to_string(j) + ": " +
                                 e.what());
    }
    for (std::size_t n = 0; n < nb; ++n) {
      energies[n][j] = values[n];
      energies[n][grid.mirror(j)] = values[n];
    }
  }
  return BandStructure::from_samples(grid, std::move(energies), truncation);
}

/// Midpoint of the selected open gap.
inline double select_reference_energy(const BandStructure& bands, std::size_t gap_index = 0) {
  const auto& gaps = bands.gaps();
  if (gaps.empty())
    throw Error("floquet", "no open gaps; increase the potential strength");
  if (gap_index >= gaps.size())
    throw Error("floquet", "gap index " + std::to_string(gap_index) + " but only " +
                               std::to_string(gaps.size()) + " open gaps");
  return gaps[gap_index].midpoint();
}

}  // namespace adelic::floquet
