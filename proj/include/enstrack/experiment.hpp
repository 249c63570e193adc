#pragma once

// End-to-end experiments driven by JSON configs: the damped oscillator and the
// 1-D convection-diffusion-reaction problem. Every field has a default, so an
// empty object `{}` is a complete config.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "enstrack/analysis.hpp"
#include "enstrack/pde1d.hpp"

namespace enstrack {

struct OutputOptions {
  std::filesystem::path dir;
  std::optional<double> trajectory_ell;
  std::size_t trajectory_every = 10;
  bool plots = true;
};

struct OscillatorConfig {
  double horizon = 5.0;
  std::size_t steps = 5000;
  std::uint64_t seed = 2024;
  double target_sigma = 1.0;
  std::vector<double> y0{1.0, 0.0};
  double position_weight = 3.1622776601683795;  // sqrt(10)
  std::vector<double> ells{0.0, 0.1, 0.5, 1.0, 1.5, 2.0};
  std::size_t training_count = 5;
  std::optional<double> training_ell;  // fixed training range; else the swept ell
  std::size_t test_count = 6;
  double test_scale = 2.0;             // test range = test_scale * ell
  std::optional<double> test_ell;      // fixed test range
  std::vector<Convention> conventions{Convention::unit};
  bool single_optimal = false;
  bool gaps = true;
  std::size_t stride = 1;
  OutputOptions output{"out-oscillator", 2.0, 10, true};
};

struct CdrConfig {
  double horizon = 5.0;
  std::size_t steps = 5000;
  std::uint64_t seed = 2024;
  pde::CdrSetup setup;
  std::vector<double> convections{0.0, 0.1};
  double target_diffusivity = 0.1;
  std::vector<double> ells{0.0, 0.1, 0.5, 1.0, 2.0};
  std::size_t training_draws = 5;
  std::uint64_t training_first_draw = 0;
  std::size_t test_draws = 5;
  std::uint64_t test_first_draw = 100;
  double test_scale = 1.0;
  std::vector<Convention> conventions{Convention::unit};
  bool single_optimal = false;
  bool gaps = false;
  std::size_t stride = 50;
  OutputOptions output{"out-cdr", 1.0, 50, true};
};

OscillatorConfig load_oscillator_config(const std::filesystem::path& path);
CdrConfig load_cdr_config(const std::filesystem::path& path);
/// Parse from JSON text; unknown keys are rejected.
OscillatorConfig parse_oscillator_config(const std::string& json_text);
CdrConfig parse_cdr_config(const std::string& json_text);

/// One sweep of an experiment (the CDR run has one per convection value).
struct ExperimentRun {
  std::string name;  // value of the `experiment` column
  SweepTable table;
};

struct ExperimentResult {
  std::vector<ExperimentRun> runs;
  std::vector<std::filesystem::path> files;
  bool any_row_failed = false;
};

/// Runs the sweep and writes costs.csv, gaps.csv (when enabled),
/// trajectories.csv, metadata.json and SVG plots into cfg.output.dir.
ExperimentResult run_oscillator(const OscillatorConfig& cfg);

/// As run_oscillator, plus field-samples.csv. Trajectories are written as
/// nodal values.
ExperimentResult run_cdr(const CdrConfig& cfg);

}  // namespace enstrack
