#pragma once

// Aligns gap eigenvalues to tabulated zeta-zero ordinates by an affine map
// and measures how well the mapped staircase tracks the zero staircase.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "adelic/error.hpp"
#include "adelic/shift.hpp"
#include "adelic/zeta_zeros_data.hpp"

namespace adelic::zeta {

class ZeroTable {
 public:
  ZeroTable(std::vector<double> ordinates, std::string source)
      : ordinates_(std::move(ordinates)), source_(std::move(source)) {
    if (ordinates_.empty()) throw Error("zeta", "zero table is empty");
    if (!(ordinates_.front() > 14.13 && ordinates_.front() < 14.14))
      throw Error("zeta", "first ordinate outside (14.13, 14.14): corrupt zero table");
    for (std::size_t k = 1; k < ordinates_.size(); ++k)
      if (!(ordinates_[k] > ordinates_[k - 1]))
        throw Error("zeta", "zero ordinates are not strictly ascending at entry " +
                                std::to_string(k + 1));
  }

  std::size_t size() const noexcept { return ordinates_.size(); }
  double operator[](std::size_t k) const { return ordinates_[k]; }
  std::span<const double> ordinates() const noexcept { return ordinates_; }
  const std::string& source() const noexcept { return source_; }

  void require(std::size_t k) const {
    if (k > ordinates_.size())
      throw Error("zeta", "insufficient zeros: requested " + std::to_string(k) + ", table has " +
                              std::to_string(ordinates_.size()));
  }

 private:
  std::vector<double> ordinates_;
  std::string source_;
};

inline ZeroTable load_embedded_zeros() {
  return ZeroTable({kEmbeddedZeros.begin(), kEmbeddedZeros.end()}, "embedded");
}

/// Reads a single-column CSV with header `gamma`.
inline ZeroTable load_zero_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("zeta", "cannot open zero table '" + path + "'");
  std::string line;
  std::vector<double> values;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line == "gamma") continue;
    }
    try {
      std::size_t used = 0;
      values.push_back(std::stod(line, &used));
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw Error("zeta", "malformed zero ordinate '" + line + "'");
    }
  }
  return ZeroTable(std::move(values), path);
}

struct AffineMap {
  double a = 1.0;
  double b = 0.0;
  bool fallback = false;

  double operator()(double x) const { return a * x + b; }
};

/// Least squares for a x_k + b ~ gamma_k, k < K, via the normal equations in
/// centered form. A non-positive slope falls back to the endpoint slope with
/// matched means.
inline AffineMap fit_affine(std::span<const double> lambdas, const ZeroTable& zeros, std::size_t k) {
  if (k < 2) throw Error("zeta", "affine fit needs K >= 2");
  if (lambdas.size() < k)
    throw Error("zeta", "only " + std::to_string(lambdas.size()) + " gap eigenvalues for K=" +
                            std::to_string(k));
  zeros.require(k);
  const auto n = static_cast<double>(k);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += lambdas[i];
    my += zeros[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = lambdas[i] - mx;
    sxx += dx * dx;
    sxy += dx * (zeros[i] - my);
  }
  if (!(sxx > 0.0)) throw Error("zeta", "degenerate gap eigenvalues (all equal)");
  AffineMap map{sxy / sxx, 0.0, false};
  if (!(map.a > 0.0)) {
    const double span = lambdas[k - 1] - lambdas[0];
    if (!(span > 0.0)) throw Error("zeta", "degenerate gap eigenvalues (all equal)");
    map.a = (zeros[k - 1] - zeros[0]) / span;
    map.fallback = true;
  }
  map.b = my - map.a * mx;
  return map;
}

inline double residual(const AffineMap& map, std::span<const double> lambdas, const ZeroTable& zeros,
                       std::size_t k) {
  double r = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = map(lambdas[i]) - zeros[i];
    r += d * d;
  }
  return r;
}

/// Model staircase under the map: odd, with weight m_k at +-|a l_k + b|.
inline shift::Staircase mapped_staircase(const shift::Staircase& model, const AffineMap& map) {
  std::map<double, int> merged;
  for (std::size_t k = 0; k < model.locations().size(); ++k) {
    const double x = std::abs(map(model.locations()[k]));
    if (x > 0.0) merged[x] += model.weights()[k];
  }
  std::vector<double> loc;
  std::vector<int> w;
  for (const auto& [x, m] : merged) {
    loc.push_back(x);
    w.push_back(m);
  }
  return shift::Staircase(std::move(loc), std::move(w));
}

/// Signed zero staircase with unit jumps at +-gamma_k.
inline shift::Staircase zero_staircase(const ZeroTable& zeros) {
  return shift::Staircase({zeros.ordinates().begin(), zeros.ordinates().end()},
                          std::vector<int>(zeros.size(), 1));
}

struct HalfIntegrals {
  double negative;  // int_{-T}^{0} |f - g|
  double positive;  // int_{0}^{T} |f - g|
};

/// Exact L1 distance of two odd staircases on [-T, 0] and [0, T]: a sweep over
/// the merged breakpoints, each segment valued at its midpoint. Segment terms
/// are summed in sorted order, so mirrored halves agree bitwise.
inline HalfIntegrals staircase_l1_halves(const shift::Staircase& f, const shift::Staircase& g,
                                         double t) {
  std::vector<double> cuts{0.0, t};
  for (const auto* s : {&f, &g})
    for (double x : s->locations())
      if (x < t) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> pos_terms, neg_terms;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const double len = hi - lo;
    const double mid = 0.5 * (lo + hi);
    pos_terms.push_back(static_cast<double>(std::llabs(f(mid) - g(mid))) * len);
    // mirrored segment [-hi, -lo]: its length is computed from negated cuts
    const double nlo = -hi, nhi = -lo;
    const double nmid = 0.5 * (nlo + nhi);
    neg_terms.push_back(static_cast<double>(std::llabs(f(nmid) - g(nmid))) * (nhi - nlo));
  }
  auto sorted_sum = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  };
  return {sorted_sum(neg_terms), sorted_sum(pos_terms)};
}

/// E_step(T) = (1 / 2T) int_{-T}^{T} |xi_A - xi_Z| dl.
inline double staircase_mismatch(const shift::Staircase& mapped_model, const shift::Staircase& zeros,
                                 double t) {
  if (!(t > 0.0)) throw Error("zeta", "E_step window T must be positive");
  const auto h = staircase_l1_halves(mapped_model, zeros, t);
  return (h.negative + h.positive) / (2.0 * t);
}

struct DiagnosticsReport {
  std::size_t k = 0;
  AffineMap map;
  std::vector<double> deviations;
  double mae = 0.0;
  double max_abs = 0.0;
  double e_step = 0.0;
  double window = 0.0;
  HalfIntegrals halves{0.0, 0.0};
  std::vector<std::string> flags;
};

inline DiagnosticsReport diagnostics(const AffineMap& map, const shift::Staircase& model,
                                     const ZeroTable& zeros, std::size_t k, double t) {
  if (!(t > 0.0)) throw Error("zeta", "E_step window T must be positive");
  if (model.locations().size() < k)
    throw Error("zeta", "only " + std::to_string(model.locations().size()) +
                            " gap eigenvalues for K=" + std::to_string(k));
  zeros.require(k);
  DiagnosticsReport r;
  r.k = k;
  r.map = map;
  r.window = t;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = map(model.locations()[i]) - zeros[i];
    r.deviations.push_back(d);
    sum += std::abs(d);
    r.max_abs = std::max(r.max_abs, std::abs(d));
  }
  r.mae = sum / static_cast<double>(k);
  const auto mapped = mapped_staircase(model, map);
  r.halves = staircase_l1_halves(mapped, zero_staircase(zeros), t);
  r.e_step = (r.halves.negative + r.halves.positive) / (2.0 * t);
  if (map.fallback) r.flags.push_back("affine_fit_fallback");
  if (zeros.size() > 0 && zeros[zeros.size() - 1] < t)
    r.flags.push_back("zero_table_shorter_than_window");
  return r;
}

}  // namespace adelic::zeta
