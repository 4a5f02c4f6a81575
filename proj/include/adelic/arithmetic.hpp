#pragma once

// Prime-indexed arithmetic data: prime sets, synthetic Hecke eigenvalue
// ensembles, the quadratic coefficient family eta_p(l) = p^-(1+eps) l^2, mass
// shifts and empirical local factors A_p(t).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adelic/error.hpp"

namespace adelic::arithmetic {

using Complex = std::complex<double>;

/// Ascending list of the first N primes.
class PrimeSet {
 public:
  PrimeSet() = default;
  explicit PrimeSet(std::vector<std::uint64_t> primes) : primes_(std::move(primes)) {
    if (!std::is_sorted(primes_.begin(), primes_.end()) ||
        std::adjacent_find(primes_.begin(), primes_.end()) != primes_.end())
      throw Error("arithmetic", "prime set must be strictly ascending");
  }

  std::size_t size() const noexcept { return primes_.size(); }
  bool empty() const noexcept { return primes_.empty(); }
  std::uint64_t operator[](std::size_t i) const { return primes_[i]; }
  std::span<const std::uint64_t> values() const noexcept { return primes_; }
  std::uint64_t largest() const { return primes_.back(); }

  /// Position of p, or throws when p is not in the set.
  std::size_t index_of(std::uint64_t p) const {
    const auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p)
      throw Error("arithmetic", "prime " + std::to_string(p) + " is not in S");
    return static_cast<std::size_t>(it - primes_.begin());
  }

  /// First k primes of this set.
  PrimeSet prefix(std::size_t k) const {
    k = std::min(k, primes_.size());
    return PrimeSet(std::vector<std::uint64_t>(primes_.begin(), primes_.begin() + k));
  }

 private:
  std::vector<std::uint64_t> primes_;
};

/// First n primes via a sieve sized by the n(ln n + ln ln n) bound.
inline PrimeSet generate_primes(std::size_t n) {
  if (n == 0) throw Error("arithmetic", "N_P must be at least 1");
  const double x = static_cast<double>(n);
  std::size_t limit = 15;
  if (n >= 6) limit = static_cast<std::size_t>(x * (std::log(x) + std::log(std::log(x)))) + 1;
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint64_t> out;
  out.reserve(n);
  for (std::size_t i = 2; i <= limit && out.size() < n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::size_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return PrimeSet(std::move(out));
}

/// Standard splitmix64 finalizer applied to x (one step of the generator
/// whose state is x).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic sample in [-1, 1) keyed by (seed, p, m).
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t p, std::uint64_t m) noexcept {
  const std::uint64_t z =
      splitmix64(seed ^ (p * 0x9E3779B97F4A7C15ULL) ^ (m * 0xBF58476D1CE4E5B9ULL));
  return 2.0 * static_cast<double>(z >> 11) / 9007199254740992.0 - 1.0;
}

enum class SamplingMode { iid_uniform, constant_one };

inline std::string to_string(SamplingMode mode) {
  return mode == SamplingMode::iid_uniform ? "iid_uniform" : "constant_one";
}

inline SamplingMode sampling_mode_from_string(const std::string& s) {
  if (s == "iid_uniform") return SamplingMode::iid_uniform;
  if (s == "constant_one") return SamplingMode::constant_one;
  throw Error("arithmetic", "unknown sampling mode '" + s + "'");
}

/// Joint eigenvalue samples lambda[p][m] in [-1, 1], m = 1..N_H.
class HeckeEnsemble {
 public:
  /// Explicit samples, row-major by prime: values[i * n_modes + (m - 1)].
  static HeckeEnsemble from_samples(PrimeSet primes, std::size_t n_modes,
                                    std::vector<double> values, std::uint64_t seed = 0,
                                    SamplingMode mode = SamplingMode::iid_uniform) {
    if (n_modes == 0) throw Error("arithmetic", "N_H must be at least 1");
    if (values.size() != primes.size() * n_modes)
      throw Error("arithmetic", "sample count does not match |S| * N_H");
    for (double v : values)
      if (!(std::abs(v) <= 1.0)) throw Error("arithmetic", "Hecke sample outside [-1, 1]");
    HeckeEnsemble e;
    e.primes_ = std::move(primes);
    e.n_modes_ = n_modes;
    e.samples_ = std::move(values);
    e.seed_ = seed;
    e.mode_ = mode;
    return e;
  }

  const PrimeSet& primes() const noexcept { return primes_; }
  std::size_t mode_count() const noexcept { return n_modes_; }
  std::uint64_t seed() const noexcept { return seed_; }
  SamplingMode mode() const noexcept { return mode_; }

  /// Sample for the i-th prime of S and zero-based mode index.
  double sample(std::size_t prime_index, std::size_t mode_index) const {
    return samples_[prime_index * n_modes_ + mode_index];
  }
  std::span<const double> row(std::size_t prime_index) const {
    return std::span<const double>(samples_).subspan(prime_index * n_modes_, n_modes_);
  }

 private:
  PrimeSet primes_;
  std::size_t n_modes_ = 0;
  std::vector<double> samples_;
  std::uint64_t seed_ = 0;
  SamplingMode mode_ = SamplingMode::iid_uniform;
};

inline HeckeEnsemble sample_hecke_ensemble(const PrimeSet& primes, std::size_t n_modes,
                                           std::uint64_t seed, SamplingMode mode) {
  if (n_modes == 0) throw Error("arithmetic", "N_H must be at least 1");
  std::vector<double> values(primes.size() * n_modes, 1.0);
  if (mode == SamplingMode::iid_uniform) {
    for (std::size_t i = 0; i < primes.size(); ++i)
      for (std::size_t m = 0; m < n_modes; ++m)
        values[i * n_modes + m] = keyed_uniform(seed, primes[i], m + 1);
  }
  return HeckeEnsemble::from_samples(primes, n_modes, std::move(values), seed, mode);
}

/// Quadratic family eta_p(l) = p^-(1+eps) l^2.
struct CoefficientFamily {
  double epsilon = 0.35;

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw Error("arithmetic",
                  "Assumption B violated: epsilon must be positive for sum_p ||eta_p|| < inf");
  }

  /// ||eta_p||_inf on [-1, 1].
  double sup_norm(std::uint64_t p) const {
    return std::pow(static_cast<double>(p), -(1.0 + epsilon));
  }

  double operator()(std::uint64_t p, double lambda) const {
    return sup_norm(p) * lambda * lambda;
  }
};

inline double eta_eval(const CoefficientFamily& family, std::uint64_t p, double lambda) {
  return family(p, lambda);
}

/// m[m] = sum_{p in S} eta_p(lambda[p][m]), summed in ascending-prime order.
inline std::vector<double> mass_shifts(const HeckeEnsemble& ensemble,
                                       const CoefficientFamily& family) {
  family.validate();
  const auto& primes = ensemble.primes();
  std::vector<double> mass(ensemble.mode_count(), 0.0);
  for (std::size_t m = 0; m < mass.size(); ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < primes.size(); ++i) s += family(primes[i], ensemble.sample(i, m));
    mass[m] = s;
  }
  return mass;
}

struct SummabilityReport {
  double partial_sum;          // sum_{p in S} p^-(1+eps)
  double analytic_tail_bound;  // P_max^-eps / eps
};

inline SummabilityReport summability_report(const CoefficientFamily& family,
                                            const PrimeSet& primes) {
  family.validate();
  if (primes.empty()) throw Error("arithmetic", "empty prime set");
  double s = 0.0;
  for (auto p : primes.values()) s += family.sup_norm(p);
  const double pmax = static_cast<double>(primes.largest());
  return {s, std::pow(pmax, -family.epsilon) / family.epsilon};
}

/// Empirical local factor A_p(t) = (1/N_H) sum_m exp(i t eta_p(lambda[p][m])).
inline Complex local_factor(const HeckeEnsemble& ensemble, const CoefficientFamily& family,
                            std::uint64_t p, double t) {
  const std::size_t i = ensemble.primes().index_of(p);
  Complex acc{0.0, 0.0};
  for (double lambda : ensemble.row(i)) {
    const double phase = t * family(p, lambda);
    acc += Complex(std::cos(phase), std::sin(phase));
  }
  return acc / static_cast<double>(ensemble.mode_count());
}

}  // namespace adelic::arithmetic
