#pragma once

// Two routes to Theta(phi) = Tr phi(D_arith) on a finite prime set:
//   fiber sum:  2 sum_n int dkappa (1/N_H) sum_m phi(E_n(kappa) - E_* + m_m)
//   separated:  (1/pi) int phi_hat(t) (sum_n G_n(t)) A(t) dt
// plus the Euler-factorization gap between the joint empirical factor and the
// product of local factors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "adelic/arithmetic.hpp"
#include "adelic/error.hpp"
#include "adelic/floquet.hpp"
#include "adelic/shift.hpp"

namespace adelic::tracekit {

using Complex = std::complex<double>;

/// Prefactor of the separated representation. Fixed by agreement with the
/// fiber sum: 2 (fiber pair) x 1/(2 pi) (Fourier inversion).
inline constexpr double kSeparatedPrefactor = 1.0 / std::numbers::pi;

inline double theta_fiber(const shift::TestFunction& phi, const floquet::BandStructure& bands,
                          double e_star, std::span<const double> shifts) {
  if (shifts.empty()) throw Error("tracekit", "no mass shifts");
  const auto w = bands.grid().trapezoid_weights();
  const double inv_modes = 1.0 / static_cast<double>(shifts.size());
  double total = 0.0;
  for (std::size_t n = 0; n < bands.band_count(); ++n)
    for (std::size_t j = 0; j < w.size(); ++j) {
      double inner = 0.0;
      for (double m : shifts) inner += phi(bands.energy(n, j) - e_star + m);
      total += w[j] * inv_modes * inner;
    }
  return 2.0 * total;
}

/// G_n(t) = int exp(i t (E_n(kappa) - E_*)) dkappa by the trapezoid rule.
inline Complex geometric_factor(const floquet::BandStructure& bands, double e_star,
                                std::size_t n, double t) {
  if (n >= bands.band_count()) throw Error("tracekit", "band index out of range");
  const auto w = bands.grid().trapezoid_weights();
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double phase = t * (bands.energy(n, j) - e_star);
    acc += w[j] * Complex(std::cos(phase), std::sin(phase));
  }
  return acc;
}

/// Quadrature grid t_i = -t_max + i h, i = 0..2N, symmetric about 0.
struct TimeGrid {
  double t_max;
  double step;
  std::size_t half_points;

  std::size_t size() const { return 2 * half_points + 1; }
  double operator[](std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(half_points)) * step;
  }
};

/// Grid for a Gaussian probe: t_max from phi_hat(t_max) < 1e-14, widened
/// until the neglected tail of the separated integral is below 1e-10; step at
/// most 0.01 and small enough that the trapezoid aliases (period 2 pi / h)
/// land beyond 12 alpha of every fiber value.
inline TimeGrid choose_time_grid(const shift::TestFunction& phi, double max_abs_value,
                                 double total_fiber_mass, double max_step = 0.01) {
  phi.validate();
  if (!(max_step > 0.0) || max_step > 0.01) throw Error("tracekit", "h_t must lie in (0, 0.01]");
  const double a = phi.alpha;
  double t_max = 2.0 / a * std::sqrt(std::max(0.0, std::log(a * std::sqrt(std::numbers::pi) / 1e-14)));
  t_max = std::max(t_max, 1.0);
  // tail <= (2/pi) * total_fiber_mass * int_{t_max}^inf phi_hat = 2 mass erfc(a t_max / 2)
  while (2.0 * total_fiber_mass * std::erfc(a * t_max / 2.0) > 1e-10) t_max *= 1.25;
  const double step = std::min(max_step, 2.0 * std::numbers::pi / (2.0 * max_abs_value + 24.0 * a));
  const auto half = static_cast<std::size_t>(std::ceil(t_max / step));
  return {static_cast<double>(half) * step, step, half};
}

struct TraceFactors {
  TimeGrid grid;
  std::vector<Complex> geometric_sum;  // sum_n G_n(t_i)
  std::vector<Complex> joint;          // A_joint(t_i)
  std::vector<Complex> product;        // prod_p A_p(t_i)
};

struct ArithmeticFactors {
  std::vector<Complex> joint;
  std::vector<Complex> product;
};

/// A_joint(t) = (1/N_H) sum_m exp(i t m_m);  A_prod(t) = prod_{p in S} A_p(t).
inline ArithmeticFactors arithmetic_factors(const arithmetic::HeckeEnsemble& ensemble,
                                            const arithmetic::CoefficientFamily& family,
                                            std::span<const double> shifts,
                                            std::span<const double> times) {
  ArithmeticFactors f;
  f.joint.resize(times.size());
  f.product.resize(times.size());
  const double inv_modes = 1.0 / static_cast<double>(shifts.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    Complex joint{0.0, 0.0};
    for (double m : shifts) joint += Complex(std::cos(t * m), std::sin(t * m));
    f.joint[i] = joint * inv_modes;
    Complex prod{1.0, 0.0};
    for (auto p : ensemble.primes().values()) prod *= arithmetic::local_factor(ensemble, family, p, t);
    f.product[i] = prod;
  }
  return f;
}

inline TraceFactors trace_factors(const shift::TestFunction& phi,
                                  const floquet::BandStructure& bands, double e_star,
                                  const arithmetic::HeckeEnsemble& ensemble,
                                  const arithmetic::CoefficientFamily& family,
                                  std::span<const double> shifts, double max_step = 0.01) {
  double max_abs = 0.0;
  for (const auto& e : bands.edges())
    for (double m : shifts)
      max_abs = std::max({max_abs, std::abs(e.min - e_star + m), std::abs(e.max - e_star + m)});
  const double fiber_mass =
      2.0 * static_cast<double>(bands.band_count()) * 2.0 * std::numbers::pi / bands.period();
  TraceFactors f;
  f.grid = choose_time_grid(phi, max_abs, fiber_mass, max_step);
  std::vector<double> times(f.grid.size());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = f.grid[i];

  f.geometric_sum.assign(times.size(), {0.0, 0.0});
  const auto w = bands.grid().trapezoid_weights();
  for (std::size_t i = 0; i < times.size(); ++i) {
    Complex acc{0.0, 0.0};
    for (std::size_t n = 0; n < bands.band_count(); ++n)
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double phase = times[i] * (bands.energy(n, j) - e_star);
        acc += w[j] * Complex(std::cos(phase), std::sin(phase));
      }
    f.geometric_sum[i] = acc;
  }
  auto arith = arithmetic_factors(ensemble, family, shifts, times);
  f.joint = std::move(arith.joint);
  f.product = std::move(arith.product);
  return f;
}

struct SeparatedTrace {
  double value;
  double imaginary_residue;
};

/// (1/pi) trapezoid sum of phi_hat(t) (sum_n G_n(t)) A_joint(t).
inline SeparatedTrace theta_separated(const shift::TestFunction& phi, const TraceFactors& f) {
  Complex acc{0.0, 0.0};
  const std::size_t n = f.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double weight = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    acc += weight * phi.fourier(f.grid[i]) * f.geometric_sum[i] * f.joint[i];
  }
  acc *= f.grid.step * kSeparatedPrefactor;
  return {acc.real(), acc.imag()};
}

inline double euler_gap(const TraceFactors& f) {
  double gap = 0.0;
  for (std::size_t i = 0; i < f.joint.size(); ++i)
    gap = std::max(gap, std::abs(f.joint[i] - f.product[i]));
  return gap;
}

struct TraceReport {
  double theta_fiber;
  double theta_separated;
  double imaginary_residue;
  double rel_gap;
  double euler_gap;
  double t_max;
  double h_t;
  double prefactor;
};

inline TraceReport compare_trace_representations(const shift::TestFunction& phi,
                                                  const floquet::BandStructure& bands,
                                                  double e_star,
                                                  const arithmetic::HeckeEnsemble& ensemble,
                                                  const arithmetic::CoefficientFamily& family,
                                                  std::span<const double> shifts,
                                                  double max_step = 0.01) {
  const double fiber = theta_fiber(phi, bands, e_star, shifts);
  const auto factors = trace_factors(phi, bands, e_star, ensemble, family, shifts, max_step);
  const auto sep = theta_separated(phi, factors);
  const double rel = fiber != 0.0 ? std::abs(fiber - sep.value) / std::abs(fiber)
                                  : std::abs(sep.value);
  return {fiber,        sep.value,          sep.imaginary_residue, rel, euler_gap(factors),
          factors.grid.t_max, factors.grid.step, kSeparatedPrefactor};
}

/// Taylor coefficients c_r (r = 1..r_max) of log A_p(t) = sum_r c_r t^r,
/// c_r = kappa_r i^r / r! with kappa_r the cumulants of eta_p(lambda[p][.]).
inline std::vector<Complex> log_local_coefficients(const arithmetic::HeckeEnsemble& ensemble,
                                                   const arithmetic::CoefficientFamily& family,
                                                   std::uint64_t p, int r_max) {
  if (r_max < 1 || r_max > 6) throw Error("tracekit", "r_max must be in 1..6");
  const std::size_t i = ensemble.primes().index_of(p);
  const auto rmax = static_cast<std::size_t>(r_max);
  std::vector<double> moment(rmax + 1, 0.0);
  for (double lambda : ensemble.row(i)) {
    const double x = family(p, lambda);
    double pw = 1.0;
    for (std::size_t r = 1; r <= rmax; ++r) moment[r] += (pw *= x);
  }
  for (std::size_t r = 1; r <= rmax; ++r) moment[r] /= static_cast<double>(ensemble.mode_count());

  // kappa_n = mu_n - sum_{k=1}^{n-1} C(n-1, k-1) kappa_k mu_{n-k}
  std::vector<double> cumulant(rmax + 1, 0.0);
  for (std::size_t n = 1; n <= rmax; ++n) {
    double c = moment[n];
    double binom = 1.0;  // C(n-1, k-1), starting at k = 1
    for (std::size_t k = 1; k < n; ++k) {
      c -= binom * cumulant[k] * moment[n - k];
      binom = binom * static_cast<double>(n - k) / static_cast<double>(k);
    }
    cumulant[n] = c;
  }
  std::vector<Complex> out(rmax);
  Complex i_pow{1.0, 0.0};
  double factorial = 1.0;
  for (std::size_t r = 1; r <= rmax; ++r) {
    i_pow *= Complex(0.0, 1.0);
    factorial *= static_cast<double>(r);
    out[r - 1] = cumulant[r] * i_pow / factorial;
  }
  return out;
}

}  // namespace adelic::tracekit
