// Copyright 2026 The lpnnloc Authors
// SPDX-License-Identifier: Apache-2.0
#include "lpnnloc/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "lpnnloc/analysis.hpp"
#include "lpnnloc/rng.hpp"

namespace lpnnloc {

ScenarioGeometry reference_geometry() {
  ScenarioGeometry g;
  g.transmitters = {{-5000, 6000}, {0, 7500}, {10500, 0}, {6000, 4000}};
  g.receivers = {{-10000, -6000}, {-9000, 5000}, {0, 4200}, {6400, -8000}};
  g.target = Vec2(-2000, 1000);
  return g;
}

ScenarioGeometry extended_geometry() {
  ScenarioGeometry g = reference_geometry();
  g.transmitters.emplace_back(-6000, -5000);
  g.receivers.emplace_back(8000, 600);
  return g;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) {
    throw Error(ErrorCode::kInvalidArgument, "log_spaced needs 0 < lo <= hi, count >= 1");
  }
  if (count == 1) return {lo};
  // Multiples of the log step keep decade points such as 1e3 exact.
  const double step = std::log10(hi / lo) / (count - 1);
  std::vector<double> out;
  for (int k = 0; k + 1 < count; ++k) out.push_back(lo * std::pow(10.0, k * step));
  out.push_back(hi);
  return out;
}

ExperimentPreset make_preset(std::string_view id) {
  ExperimentPreset p;
  p.id = std::string(id);
  p.solvers.assign(kAllSolverKinds.begin(), kAllSolverKinds.end());
  p.geometry = reference_geometry();
  p.noise.gaussian_variance = 100.0;
  if (id == "exp1") {
    p.axis = SweepAxis::kGaussianSigma;
    p.levels = log_spaced(1.0, 100.0, 7);
    p.noise.kind = NoiseKind::kGaussian;
  } else if (id == "exp2a" || id == "exp2b" || id == "exp2c") {
    p.axis = SweepAxis::kOutlierScale;
    p.levels = log_spaced(1e2, 1e5, 7);
    p.noise.kind = NoiseKind::kNlosExponential;
    p.noise.contamination.mode = id == "exp2a" ? ContaminationMode::kOneAntenna
                                               : ContaminationMode::kOneTxOneRx;
    if (id == "exp2c") p.geometry = extended_geometry();
  } else if (id == "exp3") {
    p.axis = SweepAxis::kOutlierScale;
    p.levels = log_spaced(2e2, 2e5, 7);
    p.noise.kind = NoiseKind::kLaplaceSinr;
    p.noise.contamination.mode = ContaminationMode::kExplicitEntries;
    p.noise.contamination.entries = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 3}};
  } else {
    throw Error(ErrorCode::kConfigError,
                "experiment: unknown preset '" + std::string(id) +
                    "' (exp1, exp2a, exp2b, exp2c, exp3)");
  }
  return p;
}

NoiseSpec trial_noise(const ExperimentPreset& preset, double level,
                      std::uint64_t master_seed, int trial) {
  NoiseSpec spec = preset.noise;
  if (preset.axis == SweepAxis::kGaussianSigma) {
    spec.gaussian_variance = level * level;
    spec.outlier_scale = 0.0;
  } else {
    spec.outlier_scale = level;
  }
  spec.seed = rng::derive_seed(master_seed, {static_cast<std::uint64_t>(trial)});
  return spec;
}

std::uint64_t trial_init_seed(std::uint64_t master_seed, int trial, SolverKind solver) {
  return rng::derive_seed(master_seed, {static_cast<std::uint64_t>(trial), 1,
                                        static_cast<std::uint64_t>(solver)});
}

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Exact round-trip form for hashing.
std::string hex(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  return std::string(buf, res.ptr);
}

void run_trial(const ExperimentPreset& preset, const ExperimentOptions& options,
               const std::vector<double>& levels, std::size_t level_index, int trial,
               TrialRecord* out) {
  const NoiseSpec spec =
      trial_noise(preset, levels[level_index], options.master_seed, trial);
  const MeasurementSet observed = apply_noise(true_distances(preset.geometry), spec);
  for (std::size_t s = 0; s < preset.solvers.size(); ++s) {
    TrialRecord& rec = out[s];
    rec.level_index = level_index;
    rec.trial = trial;
    rec.solver = preset.solvers[s];
    SolverConfig cfg = options.solver;
    cfg.kind = rec.solver;
    cfg.init_seed = trial_init_seed(options.master_seed, trial, rec.solver);
    cfg.trajectory_stride = 0;
    try {
      const RunResult r = solve(preset.geometry, observed, cfg);
      rec.converged = r.converged;
      rec.iterations = r.iterations;
      rec.estimate = r.estimate;
      rec.proposition_one_margin = r.proposition_one_margin;
      rec.update_norm = r.final_residuals.update_norm;
    } catch (const DivergedError& e) {
      rec.diverged = true;
      rec.iterations = e.iteration();
    }
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentPreset& preset,
                                const ExperimentOptions& options) {
  const std::vector<double> levels = options.levels.value_or(preset.levels);
  const int trials = options.trials.value_or(preset.trials);
  if (trials < 1) throw Error(ErrorCode::kConfigError, "trials must be >= 1");
  if (levels.empty()) throw Error(ErrorCode::kConfigError, "levels must not be empty");
  for (double l : levels) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw Error(ErrorCode::kConfigError, "levels must be finite and >= 0");
    }
  }
  options.solver.validate();

  const std::size_t n_solvers = preset.solvers.size();
  const std::size_t n_tasks = levels.size() * static_cast<std::size_t>(trials);
  std::vector<TrialRecord> records(n_tasks * n_solvers);

  // Every task writes only its own slice, so the result is independent of
  // scheduling.
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      const std::size_t li = task / static_cast<std::size_t>(trials);
      const int t = static_cast<int>(task % static_cast<std::size_t>(trials));
      try {
        run_trial(preset, options, levels, li, t, &records[task * n_solvers]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n_tasks);
        return;
      }
    }
  };
  unsigned threads = options.threads == 0 ? std::thread::hardware_concurrency()
                                          : options.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_tasks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.axis = preset.axis;
  const Vec2 truth = *preset.geometry.target;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    std::optional<double> bound;
    if (preset.axis == SweepAxis::kGaussianSigma && levels[li] > 0.0) {
      bound = analysis::crlb(preset.geometry, levels[li] * levels[li]).rmse_bound;
    }
    for (std::size_t s = 0; s < n_solvers; ++s) {
      ReportRow row;
      row.level = levels[li];
      row.solver = preset.solvers[s];
      row.crlb_rmse = bound;
      row.trials = trials;
      std::vector<Vec2> estimates;
      double iter_sum = 0.0;
      int converged = 0;
      for (int t = 0; t < trials; ++t) {
        const std::size_t task = li * static_cast<std::size_t>(trials) +
                                 static_cast<std::size_t>(t);
        const TrialRecord& rec = records[task * n_solvers + s];
        if (rec.diverged) {
          ++row.diverged;
          continue;
        }
        estimates.push_back(rec.estimate);
        iter_sum += static_cast<double>(rec.iterations);
        converged += rec.converged ? 1 : 0;
      }
      row.rmse = estimates.empty() ? std::nan("") : analysis::rmse(estimates, truth);
      row.mean_iterations =
          estimates.empty() ? std::nan("") : iter_sum / static_cast<double>(estimates.size());
      row.converged_fraction = static_cast<double>(converged) / trials;
      report.rows.push_back(row);
    }
  }

  ReportMetadata& meta = report.metadata;
  meta.preset_id = preset.id;
  meta.seed = options.master_seed;
  meta.generator = rng::kGeneratorName;
  meta.length_scale = options.solver.length_scale;
  meta.config_hash = config_hash(preset, options);
  meta.timestamp = report_timestamp();
  meta.levels = levels;
  meta.trials = trials;
  report.records = std::move(records);
  return report;
}

std::string config_hash(const ExperimentPreset& preset,
                        const ExperimentOptions& options) {
  std::string s = "preset=" + preset.id + ";levels=";
  for (double l : options.levels.value_or(preset.levels)) s += hex(l) + ",";
  s += ";trials=" + std::to_string(options.trials.value_or(preset.trials));
  s += ";solvers=";
  for (SolverKind k : preset.solvers) s += std::string(to_string(k)) + ",";
  s += ";tx=";
  for (const Vec2& t : preset.geometry.transmitters) s += hex(t.x()) + "/" + hex(t.y()) + ",";
  s += ";rx=";
  for (const Vec2& r : preset.geometry.receivers) s += hex(r.x()) + "/" + hex(r.y()) + ",";
  if (preset.geometry.target) {
    s += ";target=" + hex(preset.geometry.target->x()) + "/" +
         hex(preset.geometry.target->y());
  }
  s += ";noise=" + std::to_string(static_cast<int>(preset.noise.kind)) + "/" +
       hex(preset.noise.gaussian_variance) + "/" +
       std::to_string(static_cast<int>(preset.noise.contamination.mode));
  for (const auto& [i, j] : preset.noise.contamination.entries) {
    s += "/" + std::to_string(i) + ":" + std::to_string(j);
  }
  const SolverConfig& c = options.solver;
  s += ";solver=" + hex(c.aug_c) + "/" + hex(c.a_sharpness) + "/" + hex(c.steps.mu1) +
       "/" + hex(c.steps.mu2) + "/" + hex(c.steps.mu3) + "/" + hex(c.steps.mu4) + "/" +
       hex(c.steps.mu5) + "/" + hex(c.steps.mu6) + "/" + hex(c.steps.mu7) + "/" +
       std::to_string(c.max_iters) + "/" + hex(c.convergence_tol) + "/" +
       hex(c.length_scale);

  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string report_timestamp() {
  std::time_t t = 0;
  const char* sde = std::getenv("SOURCE_DATE_EPOCH");
  long long parsed = 0;
  if (sde != nullptr &&
      std::from_chars(sde, sde + std::char_traits<char>::length(sde), parsed).ec ==
          std::errc{}) {
    t = static_cast<std::time_t>(parsed);
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string report_csv(const ExperimentReport& report) {
  std::string out =
      "level,solver,rmse,crlbRmse,convergedFraction,meanIterations,trials,diverged\n";
  for (const ReportRow& r : report.rows) {
    out += fmt(r.level) + "," + to_string(r.solver) + "," + fmt(r.rmse) + "," +
           (r.crlb_rmse ? fmt(*r.crlb_rmse) : std::string()) + "," +
           fmt(r.converged_fraction) + "," + fmt(r.mean_iterations) + "," +
           std::to_string(r.trials) + "," + std::to_string(r.diverged) + "\n";
  }
  return out;
}

std::string plot_csv(const ExperimentReport& report) {
  std::string out = "x,series,y\n";
  std::optional<double> last_level;
  for (const ReportRow& r : report.rows) {
    out += fmt(r.level) + "," + to_string(r.solver) + "," + fmt(r.rmse) + "\n";
  }
  if (report.axis == SweepAxis::kGaussianSigma) {
    for (const ReportRow& r : report.rows) {
      if (!r.crlb_rmse || (last_level && *last_level == r.level)) continue;
      last_level = r.level;
      out += fmt(r.level) + ",crlb," + fmt(*r.crlb_rmse) + "\n";
    }
  }
  return out;
}

std::string metadata_json(const ExperimentReport& report) {
  const ReportMetadata& m = report.metadata;
  nlohmann::ordered_json doc;
  doc["preset"] = m.preset_id;
  doc["seed"] = m.seed;
  doc["generator"] = m.generator;
  doc["lengthScale"] = m.length_scale;
  doc["configHash"] = m.config_hash;
  doc["timestamp"] = m.timestamp;
  doc["levelAxis"] =
      report.axis == SweepAxis::kGaussianSigma ? "gaussianSigma" : "outlierScale";
  doc["levels"] = m.levels;
  doc["trials"] = m.trials;
  return doc.dump(2) + "\n";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

std::string file_stem(const ExperimentReport& report) {
  return report.metadata.preset_id.empty() ? "experiment" : report.metadata.preset_id;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

void emit_plot_data(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  write_file(out_dir / (file_stem(report) + "_plot.csv"), plot_csv(report));
}

void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  const std::string stem = file_stem(report);
  write_file(out_dir / (stem + "_report.csv"), report_csv(report));
  write_file(out_dir / (stem + "_plot.csv"), plot_csv(report));
  write_file(out_dir / (stem + "_metadata.json"), metadata_json(report));
}

}  // namespace lpnnloc
