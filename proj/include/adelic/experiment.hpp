#pragma once

// End-to-end runs: band structure -> Hecke ensemble -> mass shifts -> gap
// filter -> staircase, then the consistency checks and the zero alignment.
// Artifacts land in one directory next to a manifest of content hashes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <future>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "adelic/arithmetic.hpp"
#include "adelic/config.hpp"
#include "adelic/error.hpp"
#include "adelic/floquet.hpp"
#include "adelic/gapspec.hpp"
#include "adelic/io.hpp"
#include "adelic/matmodel.hpp"
#include "adelic/shift.hpp"
#include "adelic/svg.hpp"
#include "adelic/tracekit.hpp"
#include "adelic/zeta.hpp"

namespace adelic::experiment {

namespace fs = std::filesystem;
using nlohmann::json;
using config::ExperimentConfig;

inline constexpr const char* kVersion = "1.0.0";

struct Background {
  floquet::BandStructure bands;
  double e_star;
  gapspec::DiracBandSet band_set;
};

inline Background compute_background(const ExperimentConfig& c) {
  const floquet::QuasiMomentumGrid grid(c.n_kappa, c.potential.period);
  auto bands = floquet::compute_band_structure(c.potential, grid, c.truncation, c.n_bands);
  const double e_star = floquet::select_reference_energy(bands, c.gap_index);
  auto band_set = gapspec::dirac_band_set(bands, e_star);
  return {std::move(bands), e_star, std::move(band_set)};
}

struct ArithmeticStage {
  arithmetic::PrimeSet primes;
  arithmetic::HeckeEnsemble ensemble;
  arithmetic::CoefficientFamily family;
  std::vector<double> shifts;
};

inline ArithmeticStage compute_arithmetic(const ExperimentConfig& c) {
  ArithmeticStage a;
  a.primes = arithmetic::generate_primes(c.n_primes);
  a.ensemble = arithmetic::sample_hecke_ensemble(a.primes, c.n_modes, c.seed, c.mode);
  a.family = arithmetic::CoefficientFamily{c.epsilon};
  a.shifts = arithmetic::mass_shifts(a.ensemble, a.family);
  return a;
}

struct SpectrumStage {
  std::vector<gapspec::GapEigenvalue> emitted;
  gapspec::GapSpectrum spectrum;
  shift::Staircase staircase;
};

inline SpectrumStage compute_spectrum(const Background& bg, std::span<const double> shifts) {
  SpectrumStage s;
  s.emitted = gapspec::fiber_gap_eigenvalues(bg.bands, bg.e_star, shifts, bg.band_set);
  s.spectrum = gapspec::aggregate_spectrum(s.emitted);
  s.staircase = shift::build_staircase(s.spectrum);
  return s;
}

inline zeta::ZeroTable load_zeros(const ExperimentConfig& c) {
  return c.zeros.empty() ? zeta::load_embedded_zeros() : zeta::load_zero_table(c.zeros);
}

inline zeta::DiagnosticsReport compute_diagnostics(const ExperimentConfig& c,
                                                   const SpectrumStage& s,
                                                   const zeta::ZeroTable& zeros) {
  const auto map = zeta::fit_affine(s.spectrum.values, zeros, c.k);
  return zeta::diagnostics(map, s.staircase, zeros, c.k, c.window);
}

// ---------------------------------------------------------------------------
// serialization

inline std::string bands_csv(const floquet::BandStructure& bands) {
  io::CsvWriter w({"n", "kappa", "energy"});
  for (std::size_t n = 0; n < bands.band_count(); ++n)
    for (std::size_t j = 0; j < bands.grid().size(); ++j)
      w.row(n, bands.grid()[j], bands.energy(n, j));
  return w.str();
}

inline std::string gaps_csv(const floquet::BandStructure& bands) {
  io::CsvWriter w({"n", "beta_n", "alpha_n1", "width"});
  for (const auto& g : bands.gaps()) w.row(g.index, g.lower, g.upper, g.width());
  return w.str();
}

inline std::string ensemble_csv(const arithmetic::HeckeEnsemble& e) {
  io::CsvWriter w({"p", "m", "lambda"});
  for (std::size_t i = 0; i < e.primes().size(); ++i)
    for (std::size_t m = 0; m < e.mode_count(); ++m) w.row(e.primes()[i], m + 1, e.sample(i, m));
  return w.str();
}

inline std::string mass_csv(std::span<const double> shifts) {
  io::CsvWriter w({"m", "mass"});
  for (std::size_t m = 0; m < shifts.size(); ++m) w.row(m + 1, shifts[m]);
  return w.str();
}

inline std::string spectrum_csv(const gapspec::GapSpectrum& s) {
  io::CsvWriter w({"k", "lambda_k", "multiplicity"});
  for (std::size_t k = 0; k < s.size(); ++k) w.row(k + 1, s.values[k], s.multiplicities[k]);
  return w.str();
}

inline std::string spectrum_fibers_csv(const gapspec::GapSpectrum& s) {
  io::CsvWriter w({"k", "n", "j", "m", "gap"});
  for (std::size_t k = 0; k < s.size(); ++k)
    for (const auto& f : s.fibers[k]) w.row(k + 1, f.band, f.kappa, f.mode + 1, s.gaps[k]);
  return w.str();
}

/// Right-continuous values at 0 and at every jump location +-l_k.
inline std::string staircase_csv(const shift::Staircase& s) {
  std::vector<double> points{0.0};
  for (double l : s.locations()) {
    points.push_back(l);
    points.push_back(-l);
  }
  std::sort(points.begin(), points.end());
  io::CsvWriter w({"lambda", "xi"});
  for (double x : points) w.row(x, static_cast<long long>(s(x)));
  return w.str();
}

inline std::string stationary_csv(const shift::StationaryScan& scan) {
  io::CsvWriter w({"t_root", "kind"});
  for (const auto& p : scan.points) w.row(p.t, shift::to_string(p.kind));
  return w.str();
}

inline json trace_json(const tracekit::TraceReport& r) {
  return json{{"theta_fiber", r.theta_fiber},   {"theta_separated", r.theta_separated},
              {"rel_gap", r.rel_gap},           {"euler_gap", r.euler_gap},
              {"t_max", r.t_max},               {"h_t", r.h_t},
              {"prefactor", r.prefactor},       {"imaginary_residue", r.imaginary_residue}};
}

inline json diagnostics_json(const zeta::DiagnosticsReport& d) {
  return json{{"K", d.k},         {"a", d.map.a},          {"b", d.map.b},
              {"MAE", d.mae},     {"max_abs", d.max_abs},  {"E_step", d.e_step},
              {"T", d.window},    {"flags", d.flags},      {"deviations", d.deviations}};
}

// ---------------------------------------------------------------------------
// run

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

struct RunArtifacts {
  fs::path directory;
  std::vector<fs::path> files;
  std::vector<Check> checks;
  zeta::DiagnosticsReport diagnostics;
  std::size_t spectrum_size = 0;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

inline std::vector<std::size_t> prefix_chain(std::size_t n) {
  std::vector<std::size_t> chain{1, (n + 3) / 4, (n + 1) / 2, n};
  std::sort(chain.begin(), chain.end());
  chain.erase(std::unique(chain.begin(), chain.end()), chain.end());
  chain.erase(std::remove(chain.begin(), chain.end(), std::size_t{0}), chain.end());
  return chain;
}

/// Writes named artifacts into a directory; on destruction without commit()
/// every file it wrote is removed.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  ArtifactWriter(const ArtifactWriter&) = delete;
  ArtifactWriter& operator=(const ArtifactWriter&) = delete;
  ~ArtifactWriter() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [name, hash] : hashes_) fs::remove(dir_ / name, ec);
    fs::remove(dir_ / "manifest.json", ec);
  }

  void write(const std::string& name, const std::string& content) {
    io::write_file(dir_ / name, content);
    hashes_[name] = io::sha256_hex(content);
  }

  const std::map<std::string, std::string>& hashes() const noexcept { return hashes_; }
  const fs::path& directory() const noexcept { return dir_; }
  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::map<std::string, std::string> hashes_;
  bool committed_ = false;
};

inline json manifest_json(const ExperimentConfig& c,
                          const std::map<std::string, std::string>& hashes) {
  json artifacts = json::object();
  for (const auto& [name, hash] : hashes) artifacts[name] = hash;
  return json{{"config", config::to_json(c)},
              {"config_hash", io::sha256_hex(config::serialize_config(c))},
              {"artifact_hashes", artifacts},
              {"version", kVersion}};
}

inline RunArtifacts run_experiment(const ExperimentConfig& c, const fs::path& out_dir) {
  config::validate(c);
  ArtifactWriter writer(out_dir);
  RunArtifacts run;
  run.directory = out_dir;
  auto check = [&run](std::string name, bool ok, std::string detail) {
    run.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  const auto bg = compute_background(c);
  const auto ar = compute_arithmetic(c);
  const auto sp = compute_spectrum(bg, ar.shifts);
  const auto zeros = load_zeros(c);
  run.spectrum_size = sp.spectrum.size();

  // Floquet: independent solve at -kappa for a few fibers.
  double parity = 0.0;
  const auto& grid = bg.bands.grid();
  for (std::size_t j = 0; j < grid.size() / 2; j += std::max<std::size_t>(1, grid.size() / 16)) {
    const auto e = floquet::fiber_eigenvalues(c.potential, grid[j], c.truncation);
    for (std::size_t n = 0; n < bg.bands.band_count(); ++n)
      parity = std::max(parity, std::abs(e[n] - bg.bands.energy(n, j)));
  }
  check("floquet_evenness", parity <= 1e-10, io::num(parity));

  // Symmetric closure of the emitted multiset.
  std::vector<double> plus, minus;
  for (const auto& g : sp.emitted) (g.value > 0 ? plus : minus).push_back(std::abs(g.value));
  std::sort(plus.begin(), plus.end());
  std::sort(minus.begin(), minus.end());
  check("gap_symmetric_closure", plus == minus, std::to_string(sp.emitted.size()));

  const shift::TestFunction phi{c.alpha};
  shift::StationaryScan scan;
  if (!sp.spectrum.empty()) {
    const double reach = sp.spectrum.values.back() + 4.0 * c.alpha;
    scan = shift::stationary_scan(sp.spectrum, phi, {-reach, reach, c.scan_points | 1});
  }

  const auto trace = tracekit::compare_trace_representations(phi, bg.bands, bg.e_star,
                                                             ar.ensemble, ar.family, ar.shifts,
                                                             c.h_t_max);
  check("trace_representations", trace.rel_gap < 1e-6, io::num(trace.rel_gap));
  check("trace_hermitian", std::abs(trace.imaginary_residue) < 1e-10,
        io::num(trace.imaginary_residue));
  if (c.mode == arithmetic::SamplingMode::constant_one)
    check("euler_factorization", trace.euler_gap < 1e-12, io::num(trace.euler_gap));

  const auto model =
      matmodel::assemble(bg.bands, bg.e_star, ar.shifts, {c.max_fibers, c.max_modes});
  const auto chiral = matmodel::verify_chiral(model);
  check("chiral_anticommutator", chiral.anticommutator_norm == 0.0,
        io::num(chiral.anticommutator_norm));
  check("chiral_pairing", chiral.pairing_defect < 1e-10, io::num(chiral.pairing_defect));
  std::vector<double> probes;
  const auto arith_spec = model.spectrum(true);
  const double reach = std::abs(arith_spec.front()) + 1.0;
  for (int i = -100; i <= 100; ++i) probes.push_back(reach * i / 100.0);
  const auto krein = matmodel::krein_from_counting(model, phi, probes);
  check("krein_counting", krein.gap < 1e-9, io::num(krein.gap));
  const auto norms = matmodel::norm_bound_checks(ar.family, ar.ensemble, prefix_chain(c.n_primes));
  check("norm_bounds", norms.ok(), "");

  // Too few gap eigenvalues (e.g. a near-zero mass) leaves nothing to align;
  // that is reported as a flag, not as a failed consistency check.
  if (sp.spectrum.size() >= c.k) {
    run.diagnostics = compute_diagnostics(c, sp, zeros);
    check("diagnostics_finite",
          std::isfinite(run.diagnostics.mae) && std::isfinite(run.diagnostics.max_abs) &&
              std::isfinite(run.diagnostics.e_step),
          io::num(run.diagnostics.mae));
  } else {
    run.diagnostics.k = c.k;
    run.diagnostics.window = c.window;
    run.diagnostics.flags.push_back("insufficient_gap_eigenvalues");
    run.diagnostics.mae = run.diagnostics.max_abs = run.diagnostics.e_step =
        std::numeric_limits<double>::quiet_NaN();
  }

  writer.write("bands.csv", bands_csv(bg.bands));
  writer.write("gaps.csv", gaps_csv(bg.bands));
  writer.write("ensemble.csv", ensemble_csv(ar.ensemble));
  writer.write("massshifts.csv", mass_csv(ar.shifts));
  writer.write("spectrum.csv", spectrum_csv(sp.spectrum));
  writer.write("spectrum_fibers.csv", spectrum_fibers_csv(sp.spectrum));
  writer.write("staircase.csv", staircase_csv(sp.staircase));
  writer.write("stationary.csv", stationary_csv(scan));
  writer.write("trace_report.json", trace_json(trace).dump(2) + "\n");
  json mm{{"anticommutator_norm", chiral.anticommutator_norm},
          {"pairing_defect", chiral.pairing_defect},
          {"j_reflection_commutator_norm", chiral.j_reflection_commutator_norm},
          {"j_reflection_anticommutation_defect", chiral.j_reflection_anticommutation_defect},
          {"krein_gap", krein.gap},
          {"tail_norms", norms.tail_norms},
          {"tail_bounds", norms.tail_bounds},
          {"prefix_sizes", norms.prefix_sizes},
          {"dimension", model.dimension()}};
  writer.write("matmodel_report.json", mm.dump(2) + "\n");
  json diag = diagnostics_json(run.diagnostics);
  diag["stationary_warnings"] = scan.warnings;
  json checks = json::array();
  for (const auto& ch : run.checks)
    checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"value", ch.detail}});
  diag["checks"] = checks;
  writer.write("diagnostics.json", diag.dump(2) + "\n");
  writer.write("staircase.svg", svg::render_svg(sp.staircase, zeta::zero_staircase(zeros),
                                                run.diagnostics.map, c.window));

  for (const auto& [name, hash] : writer.hashes()) run.files.push_back(out_dir / name);
  io::write_file(out_dir / "manifest.json", manifest_json(c, writer.hashes()).dump(2) + "\n");
  run.files.push_back(out_dir / "manifest.json");
  writer.commit();
  return run;
}

/// Band structure only: bands.csv and gaps.csv.
inline std::vector<fs::path> write_bands(const ExperimentConfig& c, const fs::path& out_dir) {
  config::validate(c);
  const floquet::QuasiMomentumGrid grid(c.n_kappa, c.potential.period);
  const auto bands = floquet::compute_band_structure(c.potential, grid, c.truncation, c.n_bands);
  ArtifactWriter writer(out_dir);
  writer.write("bands.csv", bands_csv(bands));
  writer.write("gaps.csv", gaps_csv(bands));
  writer.commit();
  return {out_dir / "bands.csv", out_dir / "gaps.csv"};
}

inline fs::path write_plot(const ExperimentConfig& c, const fs::path& out_dir) {
  config::validate(c);
  const auto bg = compute_background(c);
  const auto ar = compute_arithmetic(c);
  const auto sp = compute_spectrum(bg, ar.shifts);
  const auto zeros = load_zeros(c);
  const auto d = compute_diagnostics(c, sp, zeros);
  ArtifactWriter writer(out_dir);
  writer.write("staircase.svg",
               svg::render_svg(sp.staircase, zeta::zero_staircase(zeros), d.map, c.window));
  writer.commit();
  return out_dir / "staircase.svg";
}

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Checks a run directory: the recorded config re-serializes to its hash,
/// every artifact matches its recorded hash, and every recorded check passed.
inline VerifyResult verify_run(const fs::path& dir) {
  VerifyResult v;
  auto problem = [&v](std::string s) {
    v.ok = false;
    v.problems.push_back(std::move(s));
  };
  const auto manifest = json::parse(io::read_file(dir / "manifest.json"));
  const auto cfg = config::parse_config(manifest.at("config").dump());
  if (io::sha256_hex(config::serialize_config(cfg)) != manifest.at("config_hash").get<std::string>())
    problem("config hash mismatch");
  for (const auto& [name, hash] : manifest.at("artifact_hashes").items()) {
    const auto path = dir / name;
    if (!fs::exists(path)) {
      problem("missing artifact " + name);
      continue;
    }
    if (io::sha256_hex(io::read_file(path)) != hash.get<std::string>())
      problem("hash mismatch for " + name);
  }
  if (fs::exists(dir / "diagnostics.json")) {
    const auto diag = json::parse(io::read_file(dir / "diagnostics.json"));
    for (const auto& ch : diag.at("checks"))
      if (!ch.at("passed").get<bool>()) problem("check failed: " + ch.at("name").get<std::string>());
  }
  return v;
}

// ---------------------------------------------------------------------------
// scaling suite

enum class SuiteAxis { n_primes, n_modes, seed };

inline SuiteAxis suite_axis_from_string(const std::string& s) {
  if (s == "N_P") return SuiteAxis::n_primes;
  if (s == "N_H") return SuiteAxis::n_modes;
  if (s == "seed") return SuiteAxis::seed;
  throw Error("expcli", "unknown suite axis '" + s + "' (expected N_P, N_H or seed)");
}

inline std::string to_string(SuiteAxis a) {
  switch (a) {
    case SuiteAxis::n_primes: return "N_P";
    case SuiteAxis::n_modes: return "N_H";
    case SuiteAxis::seed: return "seed";
  }
  return "";
}

struct SuiteRow {
  std::uint64_t axis_value;
  zeta::DiagnosticsReport diagnostics;
};

inline ExperimentConfig with_axis(ExperimentConfig c, SuiteAxis axis, std::uint64_t value) {
  switch (axis) {
    case SuiteAxis::n_primes: c.n_primes = value; break;
    case SuiteAxis::n_modes: c.n_modes = value; break;
    case SuiteAxis::seed: c.seed = value; break;
  }
  config::validate(c);
  return c;
}

/// Diagnostics for base config with one axis varied; rows are computed
/// concurrently and returned in input order.
inline std::vector<SuiteRow> scaling_suite(SuiteAxis axis, const std::vector<std::uint64_t>& values,
                                           const ExperimentConfig& base) {
  if (values.empty()) throw Error("expcli", "suite needs at least one axis value");
  config::validate(base);
  const auto bg = compute_background(base);
  const auto zeros = load_zeros(base);
  std::vector<std::future<SuiteRow>> jobs;
  for (auto v : values) {
    jobs.push_back(std::async(std::launch::async, [&, v] {
      try {
        const auto c = with_axis(base, axis, v);
        const auto ar = compute_arithmetic(c);
        const auto sp = compute_spectrum(bg, ar.shifts);
        return SuiteRow{v, compute_diagnostics(c, sp, zeros)};
      } catch (const std::exception& e) {
        throw Error("expcli", "suite run " + to_string(axis) + "=" + std::to_string(v) +
                                  " failed: " + e.what());
      }
    }));
  }
  std::vector<SuiteRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

inline std::string suite_csv(const std::vector<SuiteRow>& rows) {
  io::CsvWriter w({"axis_value", "MAE", "max_abs", "E_step"});
  for (const auto& r : rows)
    w.row(r.axis_value, r.diagnostics.mae, r.diagnostics.max_abs, r.diagnostics.e_step);
  return w.str();
}

}  // namespace adelic::experiment
