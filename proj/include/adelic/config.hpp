#pragma once

// Experiment configuration: a single JSON document, every key optional.
// Validation names the standing assumption a bad value would break.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adelic/arithmetic.hpp"
#include "adelic/error.hpp"
#include "adelic/floquet.hpp"

namespace adelic::config {

using nlohmann::json;

struct ExperimentConfig {
  floquet::PotentialSpec potential = floquet::PotentialSpec::mathieu();
  int truncation = 32;  // M
  int n_kappa = 201;
  int n_bands = floquet::kDefaultBands;
  std::size_t gap_index = 0;
  std::size_t n_primes = 20;  // N_P
  std::size_t n_modes = 20;   // N_H
  double epsilon = 0.35;
  std::uint64_t seed = 12345;
  arithmetic::SamplingMode mode = arithmetic::SamplingMode::iid_uniform;
  double alpha = 0.5;     // Gaussian test-function width
  std::size_t k = 20;     // zeros used in the affine fit
  double window = 80.0;   // T in E_step(T)
  double h_t_max = 0.01;  // upper bound on the trace quadrature step
  std::size_t scan_points = 4001;
  std::size_t max_fibers = 256;
  std::size_t max_modes = 16;
  std::string zeros;  // empty: embedded table

  bool operator==(const ExperimentConfig& o) const {
    return potential.period == o.potential.period &&
           potential.cosine_coefficients == o.potential.cosine_coefficients &&
           truncation == o.truncation && n_kappa == o.n_kappa && n_bands == o.n_bands &&
           gap_index == o.gap_index && n_primes == o.n_primes && n_modes == o.n_modes &&
           epsilon == o.epsilon && seed == o.seed && mode == o.mode && alpha == o.alpha &&
           k == o.k && window == o.window && h_t_max == o.h_t_max &&
           scan_points == o.scan_points && max_fibers == o.max_fibers &&
           max_modes == o.max_modes && zeros == o.zeros;
  }
};

inline void fail(const std::string& message) { throw Error("config", message); }

inline void validate(const ExperimentConfig& c) {
  if (!(c.potential.period > 0.0)) fail("Assumption C violated: period L must be positive");
  for (double v : c.potential.cosine_coefficients)
    if (!std::isfinite(v)) fail("Assumption C violated: non-finite cosine coefficient");
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon))
    fail("Assumption B violated: epsilon must be > 0 so that sum_p ||eta_p|| converges");
  if (c.n_modes == 0) fail("Assumption A violated: N_H must be at least 1");
  if (c.n_primes == 0) fail("Assumption A violated: N_P must be at least 1");
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha))
    fail("Assumption G violated: test-function width alpha must be positive");
  if (c.truncation < c.potential.harmonics())
    fail("M must be at least the number of potential harmonics");
  if (c.n_kappa < 1 || c.n_kappa % 2 == 0) fail("N_kappa must be a positive odd integer");
  if (c.n_bands < 1 || c.n_bands > 2 * c.truncation) fail("n_bands must lie in 1..2M");
  if (c.k < 2) fail("K must be at least 2");
  if (!(c.window > 0.0)) fail("T must be positive");
  if (!(c.h_t_max > 0.0) || c.h_t_max > 0.01) fail("h_t_max must lie in (0, 0.01]");
  if (c.scan_points < 3) fail("scan_points must be at least 3");
  if (c.max_fibers == 0 || c.max_modes == 0 || c.max_fibers * c.max_modes > 4096)
    fail("matrix-model caps must satisfy 1 <= F*H <= 4096");
}

inline json to_json(const ExperimentConfig& c) {
  return json{{"period", c.potential.period},
              {"cosine_coefficients", c.potential.cosine_coefficients},
              {"M", c.truncation},
              {"N_kappa", c.n_kappa},
              {"n_bands", c.n_bands},
              {"gap_index", c.gap_index},
              {"N_P", c.n_primes},
              {"N_H", c.n_modes},
              {"epsilon", c.epsilon},
              {"seed", c.seed},
              {"mode", arithmetic::to_string(c.mode)},
              {"alpha", c.alpha},
              {"K", c.k},
              {"T", c.window},
              {"h_t_max", c.h_t_max},
              {"scan_points", c.scan_points},
              {"max_fibers", c.max_fibers},
              {"max_modes", c.max_modes},
              {"zeros", c.zeros}};
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2); }

namespace detail {

template <typename T>
T read(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(std::string("key '") + key + "' has the wrong type");
  }
  return T{};
}

inline std::size_t read_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  const bool non_negative =
      v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
  if (!non_negative) fail(std::string("key '") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace detail

/// Parses a JSON document; empty or whitespace-only text yields the defaults.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    validate(c);
    return c;
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("configuration must be a JSON object");

  static const std::vector<std::string> known{
      "period", "cosine_coefficients", "sine_coefficients", "M", "N_kappa", "n_bands",
      "gap_index", "N_P", "N_H", "epsilon", "seed", "mode", "alpha", "K", "T", "h_t_max",
      "scan_points", "max_fibers", "max_modes", "zeros"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      fail("unknown key '" + item.key() + "'");

  using detail::read;
  using detail::read_count;
  if (j.contains("period")) c.potential.period = read<double>(j, "period");
  if (j.contains("cosine_coefficients"))
    c.potential.cosine_coefficients = read<std::vector<double>>(j, "cosine_coefficients");
  if (j.contains("sine_coefficients"))
    for (double s : read<std::vector<double>>(j, "sine_coefficients"))
      if (s != 0.0) fail("Assumption C violated: potential must be even (sine coefficients must vanish)");
  if (j.contains("M")) c.truncation = read<int>(j, "M");
  if (j.contains("N_kappa")) c.n_kappa = read<int>(j, "N_kappa");
  if (j.contains("n_bands")) c.n_bands = read<int>(j, "n_bands");
  if (j.contains("gap_index")) c.gap_index = read_count(j, "gap_index");
  if (j.contains("N_P")) c.n_primes = read_count(j, "N_P");
  if (j.contains("N_H")) c.n_modes = read_count(j, "N_H");
  if (j.contains("epsilon")) c.epsilon = read<double>(j, "epsilon");
  if (j.contains("seed")) c.seed = read<std::uint64_t>(j, "seed");
  if (j.contains("mode")) {
    try {
      c.mode = arithmetic::sampling_mode_from_string(read<std::string>(j, "mode"));
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  if (j.contains("alpha")) c.alpha = read<double>(j, "alpha");
  if (j.contains("K")) c.k = read_count(j, "K");
  if (j.contains("T")) c.window = read<double>(j, "T");
  if (j.contains("h_t_max")) c.h_t_max = read<double>(j, "h_t_max");
  if (j.contains("scan_points")) c.scan_points = read_count(j, "scan_points");
  if (j.contains("max_fibers")) c.max_fibers = read_count(j, "max_fibers");
  if (j.contains("max_modes")) c.max_modes = read_count(j, "max_modes");
  if (j.contains("zeros")) c.zeros = read<std::string>(j, "zeros");
  validate(c);
  return c;
}

}  // namespace adelic::config
