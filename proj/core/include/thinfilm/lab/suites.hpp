#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thinfilm/lab/experiment.hpp"

namespace thinfilm::lab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
};

struct SuiteOptions {
  /// Monotonicity reports, battery listings and the artifacts of failing
  /// runs are written here.
  std::filesystem::path archive_dir = "thinfilm-verify";
};

/// One named datum of a verification battery.
struct BatteryCase {
  std::string name;
  DomainSpec spec;
  DatumDescriptor datum;
};

/// Data with I(u0) < 0 across p in {2, 3} and a in {pi, 2 pi}.
std::vector<BatteryCase> blowup_battery();
/// Small data expected to stay in the region I >= 0.
std::vector<BatteryCase> global_battery();

/// Stepper used for the batteries: adaptive, horizon 10, and a step floor
/// small enough to resolve the approach to ||u||_inf = 1e8.
StepperConfig battery_stepper();

/// Runs are computed lazily and shared between criteria.
class AcceptanceBattery {
 public:
  explicit AcceptanceBattery(SuiteOptions options = {});
  ~AcceptanceBattery();
  AcceptanceBattery(const AcceptanceBattery&) = delete;
  AcceptanceBattery& operator=(const AcceptanceBattery&) = delete;

  /// Over every run computed so far.
  CriterionResult mass_conservation();
  CriterionResult energy_identity();
  CriterionResult l2_identity();
  CriterionResult closed_forms();
  CriterionResult sufficiency();
  CriterionResult necessity_bound();
  CriterionResult s_minus_consistency();
  CriterionResult cross_solver();
  CriterionResult well_depth();
  CriterionResult weak_form();
  CriterionResult monotonicity();

  /// Criteria 1..11 in order (mass conservation evaluated last).
  std::vector<CriterionResult> all();

 private:
  struct State;
  std::unique_ptr<State> s_;
};

std::vector<std::string_view> suite_names();

/// Throws ConfigInvalid for an unknown suite.
std::vector<CriterionResult> run_suite(std::string_view name, const SuiteOptions& options = {});

std::string format_table(const std::vector<CriterionResult>& results);

}  // namespace thinfilm::lab
