#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thinfilm/core.hpp"
#include "thinfilm/spectral.hpp"

namespace thinfilm {

/// Snapshot of every monitored scalar at one accepted time level.
struct DiagnosticsSample {
  Time t = 0;
  double dt = 0.0;  ///< last accepted step (0 for the initial sample)
  double mass = 0.0;
  double l2sq = 0.0;
  double lp1 = 0.0;  ///< ||u||_{p+1}^{p+1}
  double linf = 0.0;
  double h2sq = 0.0;  ///< ||u_xx||_2^2
  double J = 0.0;
  double I = 0.0;
  double ut_l2sq = 0.0;
  double M = 0.0;    ///< (1/2) int_0^t ||u||_2^2
  double Mp = 0.0;   ///< M' = l2sq / 2
  double Mpp = 0.0;  ///< M'' = -I
  double energy_residual = 0.0;
};

/// Checks J, I, M', M'' against their definitions in terms of the norms.
bool satisfies_invariants(const DiagnosticsSample& s, double p) noexcept;

double energy_J(const FieldNorms& n, double p) noexcept;
double nehari_I(const FieldNorms& n) noexcept;

struct Checkpoint {
  Time t = 0;
  SpectralField field;
};

struct Trajectory {
  explicit Trajectory(DomainSpec spec_) : spec(spec_) {}

  DomainSpec spec;
  std::string solver;
  std::vector<DiagnosticsSample> samples;
  std::vector<Checkpoint> checkpoints;
  RunOutcome outcome;
  /// First sample time with I < 0, if any.
  std::optional<Time> s_minus_entry;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Largest accepted local error relative to its tolerance (adaptive runs).
  double max_error_ratio = 0.0;
};

/// Builds a Trajectory from the sequence of accepted states of a solver.
/// The running integrals (int ||u_t||^2 for the energy identity and M) are
/// accumulated by the trapezoid rule over every accepted step, independent
/// of how sparsely samples are stored.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(Trajectory& traj, std::size_t sample_stride, std::size_t checkpoint_stride);

  /// Records one accepted state. `state` is only invoked when a checkpoint
  /// is due.
  void record(Time t, double dt, double mass, const FieldNorms& norms, double ut_l2sq,
              const std::function<SpectralField()>& state);
  /// Makes sure the last recorded state is stored as a sample (and as a
  /// checkpoint if checkpointing is enabled).
  void finish(const std::function<SpectralField()>& state);

  const DiagnosticsSample& last() const noexcept { return last_; }
  std::size_t count() const noexcept { return count_; }

 private:
  void append(const DiagnosticsSample& s);

  Trajectory& traj_;
  std::size_t sample_stride_;
  std::size_t checkpoint_stride_;
  std::size_t count_ = 0;
  DiagnosticsSample last_;
  bool last_stored_ = false;
  bool last_checkpointed_ = false;
  double J0_ = 0.0;
  double ut_integral_ = 0.0;
};

}  // namespace thinfilm
