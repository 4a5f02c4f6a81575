#pragma once

// Finite matrix model of the chiral operators on a subsample of fibers.
//
//   D_glob  = [[0, Q], [Q, 0]],         Q  = diag(q_i) (x) I_{N_H}
//   D_arith = [[0, Q + M], [Q + M, 0]], M  = I (x) diag(m_m)
//   Gamma   = diag(+I, -I)
//
// Every block is diagonal in the (fiber, mode) basis, so spectra are closed
// form: spec(D_glob) = {+-q_i} (each N_H times), spec(D_arith) = {+-(q_i + m_m)}.
// Basis order: index (i, m) -> i * N_H + m in each half.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "adelic/arithmetic.hpp"
#include "adelic/error.hpp"
#include "adelic/floquet.hpp"
#include "adelic/shift.hpp"

namespace adelic::matmodel {

inline constexpr std::size_t kMaxDenseProduct = 4096;

class MatrixModel {
 public:
  /// Fiber energies q_i, masses m_m, and a permutation of the fibers that
  /// leaves q invariant (the real reflection kappa -> -kappa). An empty
  /// permutation means the identity.
  MatrixModel(std::vector<double> q, std::vector<double> mass,
              std::vector<std::size_t> reflection = {})
      : q_(std::move(q)), mass_(std::move(mass)), reflection_(std::move(reflection)) {
    if (q_.empty()) throw Error("matmodel", "model has no fibers");
    if (mass_.empty()) throw Error("matmodel", "model has no modes");
    if (reflection_.empty()) {
      reflection_.resize(q_.size());
      std::iota(reflection_.begin(), reflection_.end(), std::size_t{0});
    }
    if (reflection_.size() != q_.size()) throw Error("matmodel", "reflection size mismatch");
    std::vector<bool> seen(q_.size(), false);
    for (auto r : reflection_) {
      if (r >= q_.size() || seen[r]) throw Error("matmodel", "reflection is not a permutation");
      seen[r] = true;
    }
  }

  std::span<const double> fibers() const noexcept { return q_; }
  std::span<const double> masses() const noexcept { return mass_; }
  std::span<const std::size_t> reflection() const noexcept { return reflection_; }
  std::size_t half_dimension() const noexcept { return q_.size() * mass_.size(); }
  std::size_t dimension() const noexcept { return 2 * half_dimension(); }

  /// Diagonal entry of the off-diagonal block at basis index (i, m).
  double block_entry(std::size_t i, std::size_t m, bool perturbed) const {
    return perturbed ? q_[i] + mass_[m] : q_[i];
  }

  /// Ascending closed-form spectrum of D_glob (perturbed = false) or D_arith.
  std::vector<double> spectrum(bool perturbed) const {
    std::vector<double> s;
    s.reserve(dimension());
    for (std::size_t i = 0; i < q_.size(); ++i)
      for (std::size_t m = 0; m < mass_.size(); ++m) {
        const double v = block_entry(i, m, perturbed);
        s.push_back(v);
        s.push_back(-v);
      }
    std::sort(s.begin(), s.end());
    return s;
  }

 private:
  std::vector<double> q_;
  std::vector<double> mass_;
  std::vector<std::size_t> reflection_;
};

struct Caps {
  std::size_t max_fibers = 256;
  std::size_t max_modes = 16;
};

/// Flattens q_{n,j} = E[n][j] - E_* over (n, j), keeping every stride-th
/// fiber (and every stride-th mode) when the caps are exceeded. The kappa
/// reflection j -> mirror(j) is carried along when both partners survive.
inline MatrixModel assemble(const floquet::BandStructure& bands, double e_star,
                            std::span<const double> shifts, Caps caps = {}) {
  if (bands.band_count() == 0) throw Error("matmodel", "empty band structure");
  if (caps.max_fibers == 0 || caps.max_modes == 0) throw Error("matmodel", "caps must be positive");
  if (caps.max_fibers * caps.max_modes > kMaxDenseProduct)
    throw Error("matmodel", "caps exceed F*H <= 4096");
  const std::size_t nk = bands.grid().size();
  const std::size_t total = bands.band_count() * nk;
  const std::size_t fiber_stride = (total + caps.max_fibers - 1) / caps.max_fibers;
  const std::size_t mode_stride = (shifts.size() + caps.max_modes - 1) / caps.max_modes;

  std::vector<double> q;
  std::vector<std::size_t> flat;  // original flattened index n * nk + j
  for (std::size_t f = 0; f < total; f += fiber_stride) {
    q.push_back(bands.energy(f / nk, f % nk) - e_star);
    flat.push_back(f);
  }
  std::vector<double> mass;
  for (std::size_t m = 0; m < shifts.size(); m += mode_stride) mass.push_back(shifts[m]);

  std::vector<std::size_t> reflection(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const std::size_t n = flat[i] / nk, j = flat[i] % nk;
    const std::size_t partner = n * nk + bands.grid().mirror(j);
    const auto it = std::lower_bound(flat.begin(), flat.end(), partner);
    reflection[i] = (it != flat.end() && *it == partner) ? static_cast<std::size_t>(it - flat.begin()) : i;
  }
  // Partners must pair up; fall back to the identity otherwise.
  for (std::size_t i = 0; i < q.size(); ++i)
    if (reflection[reflection[i]] != i) reflection[i] = i;
  return MatrixModel(std::move(q), std::move(mass), std::move(reflection));
}

struct ChiralReport {
  double anticommutator_norm;            // ||Gamma D + D Gamma|| for D_glob and D_arith
  double pairing_defect;                 // max_k |lambda_k + lambda_{rev(k)}|
  double j_reflection_commutator_norm;        // ||J D J^-1 - D||
  double j_reflection_anticommutation_defect; // ||J D J^-1 + D||
};

/// Structural checks. Gamma D + D Gamma: the off-diagonal blocks of Gamma D
/// are (+Q', -Q') and those of D Gamma are (-Q', +Q'), so each entry of the
/// anticommutator is q' - q'. J = [[0, R], [R, 0]] with R the reflection
/// permutation maps the upper-right block Q' to R Q' R^-1.
inline ChiralReport verify_chiral(const MatrixModel& model) {
  ChiralReport r{0.0, 0.0, 0.0, 0.0};
  for (bool perturbed : {false, true}) {
    for (std::size_t i = 0; i < model.fibers().size(); ++i)
      for (std::size_t m = 0; m < model.masses().size(); ++m) {
        const double b = model.block_entry(i, m, perturbed);
        const double upper_right = b + (-b);  // (Gamma D)_{12} + (D Gamma)_{12}
        const double lower_left = -b + b;     // (Gamma D)_{21} + (D Gamma)_{21}
        r.anticommutator_norm = std::max({r.anticommutator_norm, std::abs(upper_right),
                                          std::abs(lower_left)});
        const double conj = model.block_entry(model.reflection()[i], m, perturbed);
        r.j_reflection_commutator_norm = std::max(r.j_reflection_commutator_norm, std::abs(conj - b));
        r.j_reflection_anticommutation_defect =
            std::max(r.j_reflection_anticommutation_defect, std::abs(conj + b));
      }
    const auto s = model.spectrum(perturbed);
    for (std::size_t k = 0; k < s.size(); ++k)
      r.pairing_defect = std::max(r.pairing_defect, std::abs(s[k] + s[s.size() - 1 - k]));
  }
  return r;
}

struct KreinCheck {
  std::vector<double> probe_points;
  std::vector<long long> xi_values;  // N_arith - N_glob at each probe point
  double trace_difference;           // sum phi(spec D_arith) - sum phi(spec D_glob)
  double jump_pairing;               // sum over jumps of weight * phi(location)
  double gap;
};

inline long long counting(std::span<const double> sorted, double lambda) {
  return static_cast<long long>(std::upper_bound(sorted.begin(), sorted.end(), lambda) -
                                sorted.begin());
}

/// xi_full = N_arith - N_glob from the closed-form spectra, and the two
/// evaluations of Tr(phi(D_arith) - phi(D_glob)): direct spectral sums, and
/// the Stieltjes pairing int phi dxi_full from the merged jump list.
inline KreinCheck krein_from_counting(const MatrixModel& model, const shift::TestFunction& phi,
                                      std::span<const double> probe_points) {
  const auto arith = model.spectrum(true);
  const auto glob = model.spectrum(false);
  KreinCheck k;
  k.probe_points.assign(probe_points.begin(), probe_points.end());
  for (double x : probe_points) k.xi_values.push_back(counting(arith, x) - counting(glob, x));

  double sum_arith = 0.0, sum_glob = 0.0;
  for (double x : arith) sum_arith += phi(x);
  for (double x : glob) sum_glob += phi(x);
  k.trace_difference = sum_arith - sum_glob;

  // Merge jumps: +1 at each arith eigenvalue, -1 at each glob eigenvalue.
  std::vector<std::pair<double, int>> jumps;
  jumps.reserve(arith.size() + glob.size());
  for (double x : arith) jumps.emplace_back(x, +1);
  for (double x : glob) jumps.emplace_back(x, -1);
  std::sort(jumps.begin(), jumps.end());
  double pairing = 0.0;
  for (std::size_t a = 0; a < jumps.size();) {
    std::size_t b = a;
    int weight = 0;
    while (b < jumps.size() && jumps[b].first == jumps[a].first) weight += jumps[b++].second;
    if (weight != 0) pairing += weight * phi(jumps[a].first);
    a = b;
  }
  k.jump_pairing = pairing;
  k.gap = std::abs(k.trace_difference - k.jump_pairing);
  return k;
}

struct NormBoundReport {
  std::vector<std::uint64_t> primes;
  std::vector<double> local_norms;   // ||eta_p(T_p)|| = max_m |eta_p(lambda[p][m])|
  std::vector<double> local_bounds;  // p^-(1+eps)
  std::vector<std::size_t> prefix_sizes;
  std::vector<double> tail_norms;    // ||M^(S_max) - M^(S_k)||
  std::vector<double> tail_bounds;   // sum_{p in S_max \ S_k} p^-(1+eps)
  bool local_ok = true;
  bool tail_ok = true;
  bool monotone = true;

  bool ok() const { return local_ok && tail_ok && monotone; }
};

/// Operator-norm checks with T_p = diag(lambda[p][.]) on nested prefix sets
/// S_1 ⊂ S_2 ⊂ ... ⊂ S_max = all primes of the ensemble.
inline NormBoundReport norm_bound_checks(const arithmetic::CoefficientFamily& family,
                                         const arithmetic::HeckeEnsemble& ensemble,
                                         std::vector<std::size_t> prefix_sizes) {
  family.validate();
  const auto& primes = ensemble.primes();
  NormBoundReport r;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto p = primes[i];
    double norm = 0.0;
    for (double lambda : ensemble.row(i)) norm = std::max(norm, std::abs(family(p, lambda)));
    r.primes.push_back(p);
    r.local_norms.push_back(norm);
    r.local_bounds.push_back(family.sup_norm(p));
    if (norm > family.sup_norm(p)) r.local_ok = false;
  }
  std::sort(prefix_sizes.begin(), prefix_sizes.end());
  for (auto k : prefix_sizes)
    if (k > primes.size()) throw Error("matmodel", "prefix larger than the prime set");
  r.prefix_sizes = prefix_sizes;
  for (auto k : prefix_sizes) {
    double norm = 0.0;
    for (std::size_t m = 0; m < ensemble.mode_count(); ++m) {
      double tail = 0.0;
      for (std::size_t i = k; i < primes.size(); ++i) tail += family(primes[i], ensemble.sample(i, m));
      norm = std::max(norm, std::abs(tail));
    }
    double bound = 0.0;
    for (std::size_t i = k; i < primes.size(); ++i) bound += family.sup_norm(primes[i]);
    r.tail_norms.push_back(norm);
    r.tail_bounds.push_back(bound);
    if (norm > bound) r.tail_ok = false;
    if (r.tail_norms.size() > 1 && norm > r.tail_norms[r.tail_norms.size() - 2])
      r.monotone = false;
  }
  return r;
}

}  // namespace adelic::matmodel
