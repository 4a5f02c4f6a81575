// Command-line front end: bands, run, suite, plot, verify.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adelic/config.hpp"
#include "adelic/experiment.hpp"
#include "adelic/io.hpp"

namespace {

namespace fs = std::filesystem;
using adelic::config::ExperimentConfig;

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return adelic::config::parse_config("");
  return adelic::config::parse_config(adelic::io::read_file(path));
}

std::vector<std::uint64_t> parse_values(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const auto v = std::stoull(item, &used);
    if (used != item.size()) throw adelic::Error("expcli", "bad axis value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated chiral Dirac spectra on a periodic background"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string axis;
  std::string values;

  auto* bands = app.add_subcommand("bands", "Compute the band structure (bands.csv, gaps.csv)");
  auto* run = app.add_subcommand("run", "Full pipeline with consistency checks and artifacts");
  auto* suite = app.add_subcommand("suite", "Scaling suite over N_P, N_H or seed");
  auto* plot = app.add_subcommand("plot", "Render staircase.svg");
  auto* verify = app.add_subcommand("verify", "Verify a run directory against its manifest");
  for (auto* sub : {bands, run, suite, plot}) {
    sub->add_option("--config", config_path, "JSON configuration file (defaults if omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
  }
  verify->add_option("--out", out_dir, "Run directory to verify")->required();
  suite->add_option("--axis", axis, "N_P, N_H or seed")->required();
  suite->add_option("--values", values, "Comma-separated axis values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bands) {
      for (const auto& p : adelic::experiment::write_bands(load_config(config_path), out_dir))
        std::cout << p.string() << "\n";
      return 0;
    }
    if (*run) {
      const auto result = adelic::experiment::run_experiment(load_config(config_path), out_dir);
      for (const auto& c : result.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " " << c.detail << "\n";
      const auto& d = result.diagnostics;
      std::cout << "gap eigenvalues: " << result.spectrum_size << "\n"
                << "a=" << adelic::io::num(d.map.a) << " b=" << adelic::io::num(d.map.b)
                << " MAE=" << adelic::io::num(d.mae) << " max=" << adelic::io::num(d.max_abs)
                << " E_step=" << adelic::io::num(d.e_step) << "\n";
      return result.all_passed() ? 0 : 1;
    }
    if (*suite) {
      const auto a = adelic::experiment::suite_axis_from_string(axis);
      const auto rows =
          adelic::experiment::scaling_suite(a, parse_values(values), load_config(config_path));
      const auto csv = adelic::experiment::suite_csv(rows);
      fs::create_directories(out_dir);
      adelic::io::write_file(fs::path(out_dir) / ("suite_" + axis + ".csv"), csv);
      std::cout << csv;
      return 0;
    }
    if (*plot) {
      std::cout << adelic::experiment::write_plot(load_config(config_path), out_dir).string()
                << "\n";
      return 0;
    }
    if (*verify) {
      const auto v = adelic::experiment::verify_run(out_dir);
      for (const auto& p : v.problems) std::cout << "FAIL " << p << "\n";
      std::cout << (v.ok ? "manifest verified" : "verification failed") << "\n";
      return v.ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
