#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "adelic/arithmetic.hpp"
#include "adelic/floquet.hpp"
#include "adelic/gapspec.hpp"
#include "adelic/shift.hpp"

using namespace adelic;
using namespace adelic::shift;

namespace {

gapspec::GapSpectrum make_spectrum(std::vector<double> values, std::vector<int> mult) {
  gapspec::GapSpectrum s;
  s.values = std::move(values);
  s.multiplicities = std::move(mult);
  s.fibers.resize(s.values.size());
  s.gaps.assign(s.values.size(), 0);
  return s;
}

const gapspec::GapSpectrum& golden_spectrum() {
  static const gapspec::GapSpectrum s = [] {
    const auto bands = floquet::compute_band_structure(floquet::PotentialSpec::mathieu(),
                                                       floquet::QuasiMomentumGrid(201, 1.0), 32, 8);
    const double e_star = floquet::select_reference_energy(bands, 0);
    const auto ens = arithmetic::sample_hecke_ensemble(arithmetic::generate_primes(20), 20, 12345,
                                                       arithmetic::SamplingMode::iid_uniform);
    const auto shifts = arithmetic::mass_shifts(ens, {0.35});
    const auto set = gapspec::dirac_band_set(bands, e_star);
    return gapspec::aggregate_spectrum(gapspec::fiber_gap_eigenvalues(bands, e_star, shifts, set));
  }();
  return s;
}

}  // namespace

TEST(Staircase, Basics) {
  const Staircase empty;
  EXPECT_EQ(eval_staircase(empty, 3.0), 0);
  EXPECT_EQ(eval_staircase(empty, -3.0), 0);

  const Staircase one({0.1}, {1});
  EXPECT_EQ(eval_staircase(one, 0.05), 0);
  EXPECT_EQ(eval_staircase(one, 0.2), 1);
  EXPECT_EQ(eval_staircase(one, -0.2), -1);
  EXPECT_EQ(eval_staircase(one, 0.0), 0);

  const Staircase two({0.1}, {2});
  EXPECT_EQ(eval_staircase(two, 0.1), 2);
  EXPECT_THROW(Staircase({0.2, 0.1}, {1, 1}), adelic::Error);
  EXPECT_THROW(Staircase({-0.1}, {1}), adelic::Error);
}

TEST(Staircase, GoldenMatchesRecount) {
  const auto& spec = golden_spectrum();
  const auto s = build_staircase(spec);
  EXPECT_EQ(s.total(), spec.total_multiplicity());
  for (double x = -31.0; x <= 31.0; x += 0.0137) {
    long long count = 0;
    for (std::size_t k = 0; k < spec.size(); ++k)
      if (spec.values[k] <= std::abs(x)) count += spec.multiplicities[k];
    EXPECT_EQ(s(x), x > 0 ? count : (x < 0 ? -count : 0));
  }
}

TEST(Staircase, OddAtRandomPoints) {
  const auto s = build_staircase(golden_spectrum());
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(s(-x), -s(x));
  }
}

TEST(Pairing, SpecExamples) {
  const Staircase one({0.1}, {1});
  EXPECT_EQ(signed_jump_pairing(one, [](double x) { return x; }), 0.2);
  const auto s = build_staircase(golden_spectrum());
  const TestFunction phi{0.5};
  EXPECT_EQ(signed_jump_pairing(s, [&](double x) { return phi(x); }), 0.0);
  EXPECT_EQ(signed_jump_pairing(s, [](double x) { return std::cos(x); }), 0.0);
}

namespace {

// -int psi'(l) xi(l) dl by composite Simpson on each smooth piece of xi.
double quadrature_pairing(const Staircase& s, const Probe& dpsi, double radius) {
  std::vector<double> cuts{-radius};
  for (auto it = s.locations().rbegin(); it != s.locations().rend(); ++it) cuts.push_back(-*it);
  cuts.push_back(0.0);
  for (double l : s.locations()) cuts.push_back(l);
  cuts.push_back(radius);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const auto value = static_cast<double>(s(0.5 * (a + b)));
    if (value == 0.0) continue;
    const int n = std::max(2, 2 * static_cast<int>(std::ceil((b - a) / 1e-4 / 2)));
    const double h = (b - a) / n;
    double acc = dpsi(a) + dpsi(b);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * dpsi(a + k * h);
    total += value * acc * h / 3.0;
  }
  return -total;
}

}  // namespace

TEST(Pairing, StieltjesMatchesQuadrature) {
  const auto s = build_staircase(golden_spectrum());
  // tanh is odd with psi(+inf) + psi(-inf) = 0
  const double q_tanh = quadrature_pairing(
      s, [](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); }, 60.0);
  EXPECT_NEAR(krein_pairing(s, [](double x) { return std::tanh(x); }), q_tanh, 1e-9);
  // Gaussian probe and a shifted (asymmetric) Gaussian
  const TestFunction phi{0.5};
  const double q_phi = quadrature_pairing(s, [&](double x) { return phi.derivative(x); }, 60.0);
  EXPECT_NEAR(krein_pairing(s, [&](double x) { return phi(x); }), q_phi, 1e-9);
  const double q_shift =
      quadrature_pairing(s, [&](double x) { return phi.derivative(x - 0.6); }, 60.0);
  EXPECT_NEAR(krein_pairing(s, [&](double x) { return phi(x - 0.6); }), q_shift, 1e-9);
  // odd probes see nothing in the Stieltjes form
  EXPECT_EQ(krein_pairing(s, [](double x) { return std::tanh(x); }), 0.0);
}

TEST(TestFunctionTest, GaussianProperties) {
  const TestFunction phi{0.7};
  EXPECT_EQ(phi(0.0), 1.0);
  for (double x = 0.01; x < 5.0; x += 0.01) {
    EXPECT_EQ(phi(x), phi(-x));
    EXPECT_LT(phi(x), phi(x - 0.01));
    const double h = 1e-6;
    EXPECT_NEAR(phi.derivative(x), (phi(x + h) - phi(x - h)) / (2 * h), 1e-8);
  }
  // Fourier transform against trapezoid quadrature
  for (double t : {0.0, 0.5, 3.0}) {
    double acc = 0.0;
    const double h = 1e-3;
    for (double x = -10.0; x <= 10.0; x += h) acc += phi(x) * std::cos(x * t) * h;
    EXPECT_NEAR(phi.fourier(t), acc, 1e-9);
  }
  EXPECT_THROW((TestFunction{0.0}.validate()), adelic::Error);
}

TEST(Stationary, ToyPair) {
  const auto spec = make_spectrum({1.0}, {1});
  const TestFunction phi{0.2};
  const TranslatedTrace f(spec, phi);
  EXPECT_LE(std::abs(f.derivative(0.0)), 1e-12);
  const UniformGrid grid{-3.0, 3.0, 6001};
  for (std::size_t i = 0; i < grid.points; ++i)
    EXPECT_LE(std::abs(f.value(grid[i]) - f.value(-grid[i])), 1e-12 * f.value(0.0));
  const auto scan = stationary_scan(spec, phi, grid);
  int maxima = 0;
  bool saw_zero = false;
  for (const auto& p : scan.points) {
    if (p.kind == ExtremumKind::maximum) {
      ++maxima;
      EXPECT_LT(std::abs(std::abs(p.t) - 1.0), 0.02);
      EXPECT_LT(std::abs(std::abs(p.t) - 1.0), phi.alpha / 10);
    }
    if (std::abs(p.t) < 1e-9) saw_zero = true;
  }
  EXPECT_EQ(maxima, 2);
  EXPECT_TRUE(saw_zero);

  // brute-force fine-grid maxima of F agree
  double best = -1.0, arg = 0.0;
  for (double t = 0.5; t <= 1.5; t += 1e-6)
    if (f.value(t) > best) best = f.value(t), arg = t;
  for (const auto& p : scan.points) {
    if (p.kind == ExtremumKind::maximum && p.t > 0) {
      EXPECT_NEAR(p.t, arg, 2e-6);
    }
  }
}

TEST(Stationary, EmptyAndWarnings) {
  const auto empty = make_spectrum({}, {});
  EXPECT_TRUE(stationary_scan(empty, {0.2}, {-1.0, 1.0, 11}).points.empty());
  EXPECT_EQ(TranslatedTrace(empty, {0.2}).value(0.3), 0.0);
  const auto close = make_spectrum({1.0, 1.05}, {1, 1});
  EXPECT_FALSE(stationary_scan(close, {0.2}, {-2.0, 2.0, 11}).warnings.empty());
}

TEST(Stationary, IsolatedPairsLocalize) {
  const auto spec = make_spectrum({2.0, 4.0, 7.5}, {1, 3, 2});
  const TestFunction phi{0.3};
  const auto scan = stationary_scan(spec, phi, {-10.0, 10.0, 20001});
  EXPECT_TRUE(scan.warnings.empty());
  for (double l : spec.values)
    for (double sign : {-1.0, 1.0}) {
      bool found = false;
      for (const auto& p : scan.points)
        if (p.kind == ExtremumKind::maximum && std::abs(p.t - sign * l) < phi.alpha / 10) found = true;
      EXPECT_TRUE(found) << sign * l;
    }
}

TEST(Density, ConstantOneClosedForm) {
  const arithmetic::CoefficientFamily f{0.35};
  const auto primes = arithmetic::generate_primes(10);
  const auto e = arithmetic::sample_hecke_ensemble(primes, 4, 0, arithmetic::SamplingMode::constant_one);
  const double expected = arithmetic::summability_report(f, primes).partial_sum / (2 * std::numbers::pi);
  std::vector<double> grid;
  for (int i = -50; i <= 50; ++i) grid.push_back(0.4 * i);
  for (double d : arithmetic_shift_density(e, f, grid)) EXPECT_NEAR(d, expected, 1e-12);
}

TEST(Density, IidMatchesAnalyticDerivative) {
  const arithmetic::CoefficientFamily f{0.35};
  const auto primes = arithmetic::generate_primes(10);
  const auto e = arithmetic::sample_hecke_ensemble(primes, 200, 5, arithmetic::SamplingMode::iid_uniform);
  std::vector<double> grid;
  const double h = 1e-3;
  for (int i = -2000; i <= 2000; ++i) grid.push_back(h * i);
  const auto density = arithmetic_shift_density(e, f, grid);
  for (std::size_t g = 1; g + 1 < grid.size(); g += 97) {
    // Im(A'/A) summed over primes, A' = (1/N) sum i eta exp(i t eta)
    double exact = 0.0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      std::complex<double> a{0, 0}, da{0, 0};
      for (double lam : e.row(i)) {
        const double eta = f(primes[i], lam);
        const auto z = std::exp(std::complex<double>(0.0, grid[g] * eta));
        a += z;
        da += std::complex<double>(0.0, eta) * z;
      }
      exact += (da / a).imag();
    }
    EXPECT_NEAR(density[g], exact / (2 * std::numbers::pi), 1e-6);
  }
  // finite at t = 0
  EXPECT_TRUE(std::isfinite(density[2000]));
}

TEST(Density, RejectsVanishingFactor) {
  // A_p(t) = (1 + exp(i t eta)) / 2 vanishes at t = pi / eta
  const auto primes = arithmetic::generate_primes(1);
  const auto e = arithmetic::HeckeEnsemble::from_samples(primes, 2, {0.0, 1.0});
  const arithmetic::CoefficientFamily f{0.35};
  const double t0 = std::numbers::pi / f.sup_norm(2);
  const std::vector<double> grid{t0 - 1.0, t0, t0 + 1.0};
  EXPECT_THROW(arithmetic_shift_density(e, f, grid), adelic::Error);
}
