#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "adelic/arithmetic.hpp"
#include "golden.hpp"

using namespace adelic::arithmetic;

namespace {

bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST(Primes, SmallCases) {
  EXPECT_EQ(generate_primes(1).largest(), 2u);
  const auto five = generate_primes(5);
  const std::vector<std::uint64_t> expected{2, 3, 5, 7, 11};
  EXPECT_TRUE(std::equal(five.values().begin(), five.values().end(), expected.begin()));
  EXPECT_EQ(generate_primes(20).largest(), 71u);
  EXPECT_THROW(generate_primes(0), adelic::Error);
}

TEST(Primes, TrialDivisionAndCompleteness) {
  for (std::size_t n : {1u, 2u, 6u, 7u, 100u, 1000u, 5000u}) {
    const auto s = generate_primes(n);
    ASSERT_EQ(s.size(), n);
    std::size_t count = 0;
    for (std::uint64_t k = 2; k <= s.largest(); ++k) count += is_prime_trial(k);
    EXPECT_EQ(count, n);
    for (auto p : s.values()) EXPECT_TRUE(is_prime_trial(p));
  }
  EXPECT_EQ(generate_primes(1000).largest(), 7919u);
}

TEST(Ensemble, GoldenSamples) {
  EXPECT_EQ(keyed_uniform(12345, 2, 1), golden::kSample_12345_2_1);
  EXPECT_EQ(keyed_uniform(12345, 3, 7), golden::kSample_12345_3_7);
  EXPECT_EQ(keyed_uniform(54321, 71, 20), golden::kSample_54321_71_20);
  const auto e = sample_hecke_ensemble(generate_primes(20), 20, 12345, SamplingMode::iid_uniform);
  EXPECT_EQ(e.sample(0, 0), golden::kSample_12345_2_1);
  EXPECT_EQ(e.sample(1, 6), golden::kSample_12345_3_7);
}

TEST(Ensemble, DeterministicAndBounded) {
  const auto primes = generate_primes(50);
  const auto a = sample_hecke_ensemble(primes, 64, 99, SamplingMode::iid_uniform);
  const auto b = sample_hecke_ensemble(primes, 64, 99, SamplingMode::iid_uniform);
  for (std::size_t i = 0; i < primes.size(); ++i)
    for (std::size_t m = 0; m < 64; ++m) {
      EXPECT_EQ(a.sample(i, m), b.sample(i, m));
      EXPECT_LE(std::abs(a.sample(i, m)), 1.0);
    }
  // a prefix of S sees the same samples as the full set
  const auto c = sample_hecke_ensemble(primes.prefix(10), 64, 99, SamplingMode::iid_uniform);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(c.sample(i, 5), a.sample(i, 5));
}

TEST(Ensemble, ConstantOne) {
  const auto e = sample_hecke_ensemble(generate_primes(7), 5, 1, SamplingMode::constant_one);
  for (std::size_t i = 0; i < 7; ++i)
    for (double v : e.row(i)) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(sampling_mode_from_string(to_string(SamplingMode::constant_one)),
            SamplingMode::constant_one);
  EXPECT_THROW(sampling_mode_from_string("gaussian"), adelic::Error);
}

TEST(Ensemble, RoughlyUniform) {
  const auto e = sample_hecke_ensemble(generate_primes(1), 100000, 7, SamplingMode::iid_uniform);
  double mean = 0.0, second = 0.0;
  for (double v : e.row(0)) {
    mean += v;
    second += v * v;
  }
  mean /= 1e5;
  second /= 1e5;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(second, 1.0 / 3.0, 0.01);
}

TEST(Eta, ClosedForm) {
  const CoefficientFamily f{0.35};
  EXPECT_EQ(eta_eval(f, 2, 0.0), 0.0);
  EXPECT_NEAR(eta_eval(f, 2, 1.0), 0.392292, 1e-6);
  EXPECT_EQ(eta_eval(f, 3, -1.0), eta_eval(f, 3, 1.0));
  EXPECT_EQ(f.sup_norm(5), std::pow(5.0, -1.35));
  EXPECT_THROW((CoefficientFamily{0.0}.validate()), adelic::Error);
  EXPECT_THROW((CoefficientFamily{-1.0}.validate()), adelic::Error);
}

TEST(MassShifts, ClosedFormAndBounds) {
  const CoefficientFamily f{0.35};
  const auto s = generate_primes(2);
  const auto ones = sample_hecke_ensemble(s, 4, 0, SamplingMode::constant_one);
  const double closed = std::pow(2.0, -1.35) + std::pow(3.0, -1.35);  // 0.6192191...
  for (double m : mass_shifts(ones, f)) EXPECT_NEAR(m, closed, 1e-15);

  const auto zeros = HeckeEnsemble::from_samples(s, 3, std::vector<double>(6, 0.0));
  for (double m : mass_shifts(zeros, f)) EXPECT_EQ(m, 0.0);

  const auto primes = generate_primes(100);
  const auto e = sample_hecke_ensemble(primes, 200, 4, SamplingMode::iid_uniform);
  const double bound = summability_report(f, primes).partial_sum;
  for (double m : mass_shifts(e, f)) {
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, bound);
  }
}

TEST(MassShifts, GoldenDefaults) {
  const auto e = sample_hecke_ensemble(generate_primes(20), 20, 12345, SamplingMode::iid_uniform);
  const auto m = mass_shifts(e, CoefficientFamily{0.35});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(m[i], golden::kDefaultFirstMasses[i], 1e-15);
}

TEST(MassShifts, PermutationEquivariant) {
  const auto primes = generate_primes(8);
  const auto e = sample_hecke_ensemble(primes, 6, 3, SamplingMode::iid_uniform);
  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<double> permuted;
  for (std::size_t i = 0; i < primes.size(); ++i)
    for (std::size_t k : perm) permuted.push_back(e.sample(i, k));
  const auto p = HeckeEnsemble::from_samples(primes, 6, permuted);
  const CoefficientFamily f{0.35};
  const auto a = mass_shifts(e, f);
  const auto b = mass_shifts(p, f);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(b[k], a[perm[k]]);
}

TEST(Summability, ReportAndMonotoneTail) {
  const CoefficientFamily f{0.35};
  EXPECT_NEAR(summability_report(f, generate_primes(1)).partial_sum, 0.392292, 1e-6);
  EXPECT_THROW(summability_report(CoefficientFamily{0.0}, generate_primes(3)), adelic::Error);
  double previous = 1e300;
  for (std::size_t n = 1; n <= 200; ++n) {
    const double bound = summability_report(f, generate_primes(n)).analytic_tail_bound;
    EXPECT_LE(bound, previous);
    previous = bound;
  }
}

TEST(LocalFactor, Properties) {
  const CoefficientFamily f{0.35};
  const auto primes = generate_primes(5);
  const auto e = sample_hecke_ensemble(primes, 50, 8, SamplingMode::iid_uniform);
  EXPECT_EQ(local_factor(e, f, 7, 0.0), Complex(1.0, 0.0));
  for (double t : {-30.0, -1.0, 0.3, 2.0, 100.0}) {
    const auto a = local_factor(e, f, 3, t);
    EXPECT_LE(std::abs(a), 1.0 + 1e-15);
    const auto b = local_factor(e, f, 3, -t);
    EXPECT_NEAR(b.real(), a.real(), 1e-15);
    EXPECT_NEAR(b.imag(), -a.imag(), 1e-15);
  }
  EXPECT_THROW(local_factor(e, f, 13, 1.0), adelic::Error);

  const auto ones = sample_hecke_ensemble(primes, 3, 0, SamplingMode::constant_one);
  for (double t : {0.5, 1.0, 7.0}) {
    const auto a = local_factor(ones, f, 5, t);
    const auto expected = std::exp(Complex(0.0, t * std::pow(5.0, -1.35)));
    EXPECT_NEAR(std::abs(a - expected), 0.0, 1e-15);
  }
}

TEST(LocalFactor, BruteForceAverage) {
  const CoefficientFamily f{0.35};
  const auto primes = generate_primes(3);
  const auto e = sample_hecke_ensemble(primes, 10000, 12345, SamplingMode::iid_uniform);
  long double re = 0.0L, im = 0.0L;
  for (std::uint64_t m = 1; m <= 10000; ++m) {
    const long double lam = keyed_uniform(12345, 2, m);
    const long double phase = std::pow(2.0L, -1.35L) * lam * lam;
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const auto a = local_factor(e, f, 2, 1.0);
  EXPECT_LT(std::abs(a), 1.0);
  EXPECT_NEAR(a.real(), static_cast<double>(re / 10000), 1e-12);
  EXPECT_NEAR(a.imag(), static_cast<double>(im / 10000), 1e-12);
}
