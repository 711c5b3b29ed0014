#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thinfilm/core.hpp"
#include "thinfilm/integrator.hpp"
#include "thinfilm/lab/datum.hpp"

namespace thinfilm::lab {

struct OutputOptions {
  std::filesystem::path dir = "thinfilm-out";
  bool csv = true;
  bool json = true;
  bool plot = true;
};

/// Optional second run of the same datum through the finite-difference
/// oracle, compared against the spectral run.
struct CrosscheckOptions {
  bool enabled = false;
  std::size_t points = 2048;
  double dt = 1e-5;
};

struct ClassifyOptions {
  bool well_depth = true;
  /// Modes used by the well-depth optimizer.
  std::size_t modes = 32;
  /// When set, Lambda_alpha is estimated at this alpha.
  std::optional<double> lambda_alpha;
};

/// A sweep replaces the datum by nehari_scaled(base, m) for each multiplier.
struct SweepOptions {
  std::vector<double> multipliers;
  std::size_t workers = 1;
};

struct ExperimentConfig {
  DomainSpec spec{kPi, 3.0, 64};
  DatumDescriptor datum = CosineCombo{{{1, 0.5}}};
  StepperConfig stepper;
  OutputOptions outputs;
  CrosscheckOptions crosscheck;
  ClassifyOptions classify;
  std::optional<std::string> suite;
  SweepOptions sweep;
};

/// INI-style text: [domain], [datum], [stepper], [outputs], [crosscheck],
/// [classify], [run], [sweep]. Unknown sections or keys, malformed values
/// and invalid combinations throw ConfigInvalid.
ExperimentConfig parse_config(const std::string& text);
/// Relative output directories are resolved against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses reals with optional pi factors: "3", "1e-3", "pi", "2*pi", "pi/2".
double parse_real(const std::string& text);

}  // namespace thinfilm::lab
