#pragma once

// Gap eigenvalues of the truncated chiral operator. Each fiber (n, j, m)
// contributes the pair +-(E_n(kappa_j) - E_* + m_m); a value is kept when it
// falls in an open gap of the symmetric band image +-(spec(H) - E_*).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "adelic/error.hpp"
#include "adelic/floquet.hpp"

namespace adelic::gapspec {

inline constexpr double kMembershipMargin = 1e-8;
inline constexpr double kGroupingTolerance = 1e-9;

struct Interval {
  double lower;
  double upper;

  bool operator==(const Interval&) const = default;
};

/// Union of the intervals +-([alpha_n, beta_n] - E_*), sorted and merged.
/// Neighbouring intervals separated by no more than the gap tolerance are
/// merged as well, so only open gaps survive.
class DiracBandSet {
 public:
  explicit DiracBandSet(std::vector<Interval> raw) {
    if (raw.empty()) throw Error("gapspec", "empty band set");
    std::sort(raw.begin(), raw.end(),
              [](const Interval& a, const Interval& b) { return a.lower < b.lower; });
    for (const auto& iv : raw) {
      if (!intervals_.empty() && iv.lower - intervals_.back().upper <= floquet::kGapTolerance)
        intervals_.back().upper = std::max(intervals_.back().upper, iv.upper);
      else
        intervals_.push_back(iv);
    }
  }

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }

  /// Largest |x| covered by the resolved bands.
  double outer_radius() const {
    return std::max(std::abs(intervals_.front().lower), std::abs(intervals_.back().upper));
  }

  double distance(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& iv : intervals_) {
      double d = 0.0;
      if (x < iv.lower) d = iv.lower - x;
      else if (x > iv.upper) d = x - iv.upper;
      best = std::min(best, d);
    }
    return best;
  }

  /// Index of the gap containing x: the number of intervals lying entirely
  /// below it, counted from the central gap (0 for the gap around the
  /// origin, +-1 for the next ones).
  int gap_index(double x) const {
    int below = 0;
    for (const auto& iv : intervals_)
      if (iv.upper < x) ++below;
    int origin_below = 0;
    for (const auto& iv : intervals_)
      if (iv.upper < 0.0) ++origin_below;
    return below - origin_below;
  }

  bool is_symmetric() const {
    const std::size_t n = intervals_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = intervals_[i];
      const auto& b = intervals_[n - 1 - i];
      if (a.lower != -b.upper || a.upper != -b.lower) return false;
    }
    return true;
  }

 private:
  std::vector<Interval> intervals_;
};

inline DiracBandSet dirac_band_set(const floquet::BandStructure& bands, double e_star) {
  for (const auto& edge : bands.edges())
    if (e_star >= edge.min && e_star <= edge.max)
      throw Error("gapspec", "reference energy lies inside a band");
  std::vector<Interval> raw;
  for (const auto& edge : bands.edges()) {
    const double lo = edge.min - e_star;
    const double hi = edge.max - e_star;
    raw.push_back({lo, hi});
    raw.push_back({-hi, -lo});
  }
  return DiracBandSet(std::move(raw));
}

struct FiberIndex {
  std::size_t band;
  std::size_t kappa;
  std::size_t mode;

  bool operator==(const FiberIndex&) const = default;
};

struct GapEigenvalue {
  double value;
  FiberIndex fiber;
  int gap;
};

/// Values +-(E[n][j] - E_* + m[m]) at distance > membership margin from every
/// band interval and inside the resolved range |x| < outer_radius. Emission
/// order is lexicographic in (n, j, m, sign) with + before -.
inline std::vector<GapEigenvalue> fiber_gap_eigenvalues(const floquet::BandStructure& bands,
                                                        double e_star,
                                                        std::span<const double> shifts,
                                                        const DiracBandSet& band_set) {
  std::vector<GapEigenvalue> out;
  const double outer = band_set.outer_radius();
  auto keep = [&](double x) {
    return std::abs(x) < outer && band_set.distance(x) > kMembershipMargin;
  };
  for (std::size_t n = 0; n < bands.band_count(); ++n)
    for (std::size_t j = 0; j < bands.grid().size(); ++j)
      for (std::size_t m = 0; m < shifts.size(); ++m) {
        const double v = bands.energy(n, j) - e_star + shifts[m];
        for (double x : {v, -v})
          if (keep(x)) out.push_back({x, {n, j, m}, band_set.gap_index(x)});
      }
  return out;
}

/// Positive gap eigenvalues with multiplicities; the full spectrum is the
/// symmetric closure {+-values}.
struct GapSpectrum {
  std::vector<double> values;
  std::vector<int> multiplicities;
  std::vector<std::vector<FiberIndex>> fibers;
  std::vector<int> gaps;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }

  int total_multiplicity() const {
    int s = 0;
    for (int m : multiplicities) s += m;
    return s;
  }

  /// Leading k values.
  std::vector<double> leading(std::size_t k) const {
    k = std::min(k, values.size());
    return {values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k)};
  }
};

inline double round12(double x) { return std::round(x * 1e12) / 1e12; }

/// Group positive values (rounded to 12 decimals) whose consecutive spacing is
/// at most the grouping tolerance; a group's value is its smallest member.
inline GapSpectrum aggregate_spectrum(std::span<const GapEigenvalue> values) {
  std::vector<GapEigenvalue> positive;
  for (const auto& g : values)
    if (g.value > 0.0) positive.push_back({round12(g.value), g.fiber, g.gap});
  std::stable_sort(positive.begin(), positive.end(),
                   [](const GapEigenvalue& a, const GapEigenvalue& b) { return a.value < b.value; });
  GapSpectrum s;
  double last = 0.0;
  for (const auto& g : positive) {
    if (!s.values.empty() && g.value - last <= kGroupingTolerance) {
      ++s.multiplicities.back();
      s.fibers.back().push_back(g.fiber);
    } else {
      s.values.push_back(g.value);
      s.multiplicities.push_back(1);
      s.fibers.push_back({g.fiber});
      s.gaps.push_back(g.gap);
    }
    last = g.value;
  }
  return s;
}

}  // namespace adelic::gapspec
