#pragma once

// Odd spectral-shift staircase built from a gap spectrum, its pairings with
// probe functions, the stationary-point scan of translated traces, and the
// exploratory prime-indexed shift density.
//
// Convention: xi = N_arith - N_glob (difference of right-continuous counting
// functions). A new gap eigenvalue of multiplicity m produces a jump of +m,
// and the trace identity reads Tr(phi(D_arith) - phi(D_glob)) = int phi dxi.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "adelic/arithmetic.hpp"
#include "adelic/error.hpp"
#include "adelic/gapspec.hpp"

namespace adelic::shift {

/// Odd right-continuous staircase: xi(l) = sum_{l_k <= l} m_k for l > 0,
/// xi(-l) = -xi(l), xi(0) = 0. Only the positive jumps are stored.
class Staircase {
 public:
  Staircase() = default;
  Staircase(std::vector<double> locations, std::vector<int> weights)
      : locations_(std::move(locations)), weights_(std::move(weights)) {
    if (locations_.size() != weights_.size())
      throw Error("shift", "jump locations and weights differ in length");
    for (std::size_t k = 0; k < locations_.size(); ++k) {
      if (!(locations_[k] > 0.0)) throw Error("shift", "jump locations must be positive");
      if (k > 0 && !(locations_[k] > locations_[k - 1]))
        throw Error("shift", "jump locations must be strictly ascending");
    }
    cumulative_.resize(weights_.size());
    long long s = 0;
    for (std::size_t k = 0; k < weights_.size(); ++k) cumulative_[k] = s += weights_[k];
  }

  std::span<const double> locations() const noexcept { return locations_; }
  std::span<const int> weights() const noexcept { return weights_; }
  bool empty() const noexcept { return locations_.empty(); }
  long long total() const noexcept { return cumulative_.empty() ? 0 : cumulative_.back(); }

  long long operator()(double lambda) const {
    if (lambda == 0.0 || locations_.empty()) return 0;
    const double x = std::abs(lambda);
    const auto it = std::upper_bound(locations_.begin(), locations_.end(), x);
    const auto count = static_cast<std::size_t>(it - locations_.begin());
    const long long v = count == 0 ? 0 : cumulative_[count - 1];
    return lambda > 0.0 ? v : -v;
  }

 private:
  std::vector<double> locations_;
  std::vector<int> weights_;
  std::vector<long long> cumulative_;
};

inline Staircase build_staircase(const gapspec::GapSpectrum& spectrum) {
  return Staircase(spectrum.values, spectrum.multiplicities);
}

inline long long eval_staircase(const Staircase& s, double lambda) { return s(lambda); }

/// Gaussian probe phi(l) = exp(-l^2 / alpha^2).
struct TestFunction {
  double alpha = 0.5;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw Error("shift", "Assumption G violated: Gaussian width must be positive");
  }
  double operator()(double x) const { return std::exp(-(x * x) / (alpha * alpha)); }
  double derivative(double x) const { return -2.0 * x / (alpha * alpha) * (*this)(x); }
  /// phi_hat(t) = int phi(l) exp(-i l t) dl = alpha sqrt(pi) exp(-alpha^2 t^2 / 4).
  double fourier(double t) const {
    return alpha * std::sqrt(std::numbers::pi) * std::exp(-alpha * alpha * t * t / 4.0);
  }
};

using Probe = std::function<double(double)>;

/// Stieltjes pairing int psi dxi = sum_k m_k (psi(l_k) + psi(-l_k)).
/// Equals -int psi' xi dl whenever psi(+inf) + psi(-inf) = 0.
inline double krein_pairing(const Staircase& s, const Probe& psi) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.locations().size(); ++k) {
    const double l = s.locations()[k];
    acc += s.weights()[k] * (psi(l) + psi(-l));
  }
  return acc;
}

/// Pairing with the signed jump measure sum_k m_k (delta_{l_k} - delta_{-l_k}).
/// Vanishes for even probes.
inline double signed_jump_pairing(const Staircase& s, const Probe& psi) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.locations().size(); ++k) {
    const double l = s.locations()[k];
    acc += s.weights()[k] * (psi(l) - psi(-l));
  }
  return acc;
}

struct UniformGrid {
  double lower;
  double upper;
  std::size_t points;

  double step() const { return (upper - lower) / static_cast<double>(points - 1); }
  /// Node i; a grid with lower == -upper has node n-1-i == -node i exactly.
  double operator[](std::size_t i) const {
    const auto n = static_cast<double>(points - 1);
    const auto k = static_cast<double>(i);
    return ((n - k) * lower + k * upper) / n;
  }

  void validate() const {
    if (points < 2 || !(upper > lower)) throw Error("shift", "invalid uniform grid");
  }
};

enum class ExtremumKind { maximum, minimum };

inline const char* to_string(ExtremumKind k) {
  return k == ExtremumKind::maximum ? "max" : "min";
}

struct StationaryPoint {
  double t;
  ExtremumKind kind;
};

struct StationaryScan {
  std::vector<StationaryPoint> points;
  std::vector<std::string> warnings;
};

/// F(t) = sum over the symmetric spectrum of m_k phi(x - t) and its
/// derivative. Mirror terms are added in pairs so that F'(0) vanishes
/// exactly.
class TranslatedTrace {
 public:
  TranslatedTrace(const gapspec::GapSpectrum& spectrum, TestFunction phi)
      : spectrum_(spectrum), phi_(phi) {}

  double value(double t) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < spectrum_.size(); ++k) {
      const double l = spectrum_.values[k];
      acc += spectrum_.multiplicities[k] * (phi_(l - t) + phi_(-l - t));
    }
    return acc;
  }

  double derivative(double t) const {
    // d/dt phi(x - t) = -phi'(x - t)
    double acc = 0.0;
    for (std::size_t k = 0; k < spectrum_.size(); ++k) {
      const double l = spectrum_.values[k];
      acc -= spectrum_.multiplicities[k] * (phi_.derivative(l - t) + phi_.derivative(-l - t));
    }
    return acc;
  }

 private:
  const gapspec::GapSpectrum& spectrum_;
  TestFunction phi_;
};

/// Sign changes of F' on the grid, refined by bisection to 1e-10. A grid node
/// with F' exactly zero is reported when its neighbours change sign.
inline StationaryScan stationary_scan(const gapspec::GapSpectrum& spectrum,
                                      const TestFunction& phi, const UniformGrid& grid) {
  phi.validate();
  grid.validate();
  StationaryScan scan;
  if (spectrum.empty()) return scan;

  double min_spacing = 2.0 * spectrum.values.front();
  for (std::size_t k = 1; k < spectrum.size(); ++k)
    min_spacing = std::min(min_spacing, spectrum.values[k] - spectrum.values[k - 1]);
  if (grid.step() > 0.5 * min_spacing)
    scan.warnings.push_back("grid step exceeds half the minimum eigenvalue spacing");
  if (phi.alpha > 0.25 * min_spacing)
    scan.warnings.push_back("Gaussian width exceeds a quarter of the minimum eigenvalue spacing");

  const TranslatedTrace f(spectrum, phi);
  std::vector<double> d(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) d[i] = f.derivative(grid[i]);

  auto classify = [](double left, double right) {
    return left > 0.0 && right < 0.0 ? ExtremumKind::maximum : ExtremumKind::minimum;
  };
  for (std::size_t i = 0; i + 1 < grid.points; ++i) {
    const double a = grid[i], b = grid[i + 1];
    if (d[i] == 0.0) {
      if (i > 0 && d[i - 1] * d[i + 1] < 0.0)
        scan.points.push_back({a, classify(d[i - 1], d[i + 1])});
      continue;
    }
    if (d[i] * d[i + 1] >= 0.0) continue;
    double lo = a, hi = b, flo = d[i];
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f.derivative(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    scan.points.push_back({0.5 * (lo + hi), classify(d[i], d[i + 1])});
  }
  return scan;
}

/// Exploratory: Re[(1/2 pi i) d/dl sum_p log A_p(l)] on the grid, with the
/// phase of each A_p unwrapped along the grid and central differences in the
/// interior (one-sided at the ends).
inline std::vector<double> arithmetic_shift_density(const arithmetic::HeckeEnsemble& ensemble,
                                                    const arithmetic::CoefficientFamily& family,
                                                    std::span<const double> grid) {
  if (grid.size() < 2) throw Error("shift", "density grid needs at least two points");
  const auto& primes = ensemble.primes();
  std::vector<std::complex<double>> log_sum(grid.size(), {0.0, 0.0});
  for (std::size_t i = 0; i < primes.size(); ++i) {
    double previous_phase = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto a = arithmetic::local_factor(ensemble, family, primes[i], grid[g]);
      if (std::abs(a) < 1e-12)
        throw Error("shift", "local factor vanishes near t=" + std::to_string(grid[g]) +
                                 " (ambiguous branch)");
      double phase = std::arg(a);
      if (g > 0) {
        const double two_pi = 2.0 * std::numbers::pi;
        phase += two_pi * std::round((previous_phase - phase) / two_pi);
      }
      previous_phase = phase;
      log_sum[g] += std::complex<double>(std::log(std::abs(a)), phase);
    }
  }
  const std::complex<double> two_pi_i(0.0, 2.0 * std::numbers::pi);
  std::vector<double> density(grid.size());
  const std::size_t last = grid.size() - 1;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::complex<double> diff;
    if (g == 0) diff = (log_sum[1] - log_sum[0]) / (grid[1] - grid[0]);
    else if (g == last) diff = (log_sum[last] - log_sum[last - 1]) / (grid[last] - grid[last - 1]);
    else diff = (log_sum[g + 1] - log_sum[g - 1]) / (grid[g + 1] - grid[g - 1]);
    density[g] = (diff / two_pi_i).real();
  }
  return density;
}

}  // namespace adelic::shift
