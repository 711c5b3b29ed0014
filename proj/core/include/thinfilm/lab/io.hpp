#pragma once

#include <array>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thinfilm/lab/experiment.hpp"

namespace thinfilm::lab {

inline constexpr std::array<std::string_view, 12> kCsvColumns = {
    "t", "dt", "mass", "l2sq", "lp1", "linf", "h2sq", "J", "I", "ut_l2sq", "M", "energy_residual"};

/// One row per stored sample, 17 significant digits. Every row is checked
/// against the sample invariants first; throws InvariantViolation.
void write_csv(std::ostream& out, const Trajectory& traj);

/// Run summary document with "schema": 1.
std::string summary_json(const RunReport& report, const ExperimentConfig& cfg);

/// Monotonicity evidence of several named runs as one JSON document.
std::string monotonicity_json(const std::vector<std::pair<std::string, const MonotonicityReport*>>& runs);

/// Python/matplotlib script plotting the CSV next to it.
std::string plot_script(std::string_view csv_name);

/// Throws IoFailure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace thinfilm::lab
