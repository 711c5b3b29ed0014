#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thinfilm/functionals.hpp"
#include "thinfilm/lab/config.hpp"
#include "thinfilm/nehari.hpp"
#include "thinfilm/oracle.hpp"
#include "thinfilm/trajectory.hpp"

namespace thinfilm::lab {

/// Variational constants shared by every run on one domain.
struct ClassifyContext {
  double d_hat = 0.0;
  bool depth_converged = false;
  std::optional<double> alpha;
  std::optional<double> lambda_alpha_hat;
};

struct RunReport {
  std::string datum;
  Trajectory trajectory;
  std::optional<ClassifyContext> context;
  std::optional<ClassificationReport> classification;
  ConcavityReport concavity;
  MonotonicityReport monotonicity;
  std::optional<Trajectory> fd;
  std::optional<oracle::ComparisonReport> crosscheck;
  /// Files written, relative to the output directory.
  std::vector<std::string> artifacts;
};

/// Throws AlphaBelowDepth when the requested alpha is not above d_hat.
ClassifyContext prepare_classification(const ExperimentConfig& cfg);

/// Simulation and analysis only; nothing is written.
RunReport compute_experiment(const ExperimentConfig& cfg,
                             const std::optional<ClassifyContext>& context = {});

/// compute_experiment followed by the enabled outputs in cfg.outputs.dir.
RunReport run_experiment(const ExperimentConfig& cfg);

/// Writes the enabled artifacts of an already computed report.
void write_artifacts(RunReport& report, const ExperimentConfig& cfg);

struct SweepEntry {
  double multiplier = 0.0;
  std::filesystem::path dir;
  RunReport report;
};

/// One run per multiplier, datum nehari_scaled(base, m), each in its own
/// subdirectory, spread over cfg.sweep.workers threads. Also writes
/// sweep.csv with one row per run.
std::vector<SweepEntry> run_sweep(const ExperimentConfig& cfg);

}  // namespace thinfilm::lab
