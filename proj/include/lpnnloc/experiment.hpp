// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lpnnloc/scene.hpp"
#include "lpnnloc/solver.hpp"

namespace lpnnloc {

/// The radar layout used throughout: 4 transmitters, 4 receivers, target at
/// [-2000, 1000] m.
ScenarioGeometry reference_geometry();
/// reference_geometry() plus t5 = [-6000, -5000] and r5 = [8000, 600].
ScenarioGeometry extended_geometry();

/// `count` points evenly spaced in log10 between lo and hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

enum class SweepAxis {
  kGaussianSigma,  // level is the noise standard deviation, m
  kOutlierScale,   // level is the outlier standard deviation, m
};

struct ExperimentPreset {
  std::string id;
  std::vector<double> levels;
  SweepAxis axis = SweepAxis::kGaussianSigma;
  int trials = 100;
  std::vector<SolverKind> solvers;
  ScenarioGeometry geometry;
  /// Noise recipe for one trial; the level and seed are filled in per trial.
  NoiseSpec noise;
};

inline constexpr std::array<std::string_view, 5> kPresetIds = {
    "exp1", "exp2a", "exp2b", "exp2c", "exp3"};

/// Throws kConfigError for an unknown id.
ExperimentPreset make_preset(std::string_view id);

struct ExperimentOptions {
  std::uint64_t master_seed = 0;
  /// Overrides the preset when set.
  std::optional<int> trials;
  std::optional<std::vector<double>> levels;
  /// kind and init_seed are set per run; everything else is used as is.
  SolverConfig solver;
  /// Worker threads; 0 picks the hardware concurrency. Output does not
  /// depend on this.
  unsigned threads = 1;
};

/// One solve inside an experiment.
struct TrialRecord {
  std::size_t level_index = 0;
  int trial = 0;
  SolverKind solver = SolverKind::kL2Baseline;
  bool diverged = false;
  bool converged = false;
  long iterations = 0;
  Vec2 estimate = Vec2::Zero();
  double proposition_one_margin = 0.0;
  double update_norm = 0.0;
};

struct ReportRow {
  double level = 0.0;
  SolverKind solver = SolverKind::kL2Baseline;
  /// Over non-diverged trials; NaN if every trial diverged.
  double rmse = 0.0;
  /// Only on the Gaussian axis.
  std::optional<double> crlb_rmse;
  double converged_fraction = 0.0;
  double mean_iterations = 0.0;
  int trials = 0;
  int diverged = 0;
};

struct ReportMetadata {
  std::string preset_id;
  std::uint64_t seed = 0;
  std::string generator;
  double length_scale = 0.0;
  std::string config_hash;
  std::string timestamp;
  std::vector<double> levels;
  int trials = 0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;  // level-major, solvers in preset order
  ReportMetadata metadata;
  SweepAxis axis = SweepAxis::kGaussianSigma;
  std::vector<TrialRecord> records;  // level, trial, solver order
};

/// Noise recipe of one trial.
NoiseSpec trial_noise(const ExperimentPreset& preset, double level,
                      std::uint64_t master_seed, int trial);
/// Seed for the initial state of one solver in one trial.
std::uint64_t trial_init_seed(std::uint64_t master_seed, int trial,
                              SolverKind solver);

ExperimentReport run_experiment(const ExperimentPreset& preset,
                                const ExperimentOptions& options);

/// FNV-1a over a canonical description of everything that affects results.
std::string config_hash(const ExperimentPreset& preset,
                        const ExperimentOptions& options);

/// UTC ISO-8601. Uses SOURCE_DATE_EPOCH when set.
std::string report_timestamp();

/// Report table: level,solver,rmse,crlbRmse,convergedFraction,
/// meanIterations,trials,diverged.
std::string report_csv(const ExperimentReport& report);
/// Long-format plot table x,series,y: one series per solver, plus "crlb" on
/// the Gaussian axis.
std::string plot_csv(const ExperimentReport& report);
std::string metadata_json(const ExperimentReport& report);

/// Writes <id>_report.csv, <id>_plot.csv and <id>_metadata.json into
/// out_dir (created if missing). Throws kIoError.
void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir);
/// Writes only the plot table. Throws kIoError.
void emit_plot_data(const ExperimentReport& report, const std::filesystem::path& out_dir);

}  // namespace lpnnloc
