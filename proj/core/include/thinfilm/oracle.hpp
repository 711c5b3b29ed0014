#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thinfilm/core.hpp"
#include "thinfilm/trajectory.hpp"

namespace thinfilm::oracle {

/// Symmetric pentadiagonal system factored as L D L^T.
class PentadiagonalSolver {
 public:
  /// diag[i] = B(i,i), off1[i] = B(i,i-1) (off1[0] unused),
  /// off2[i] = B(i,i-2) (off2[0..1] unused). Throws LinearSolveFailure on a
  /// non-positive or non-finite pivot.
  PentadiagonalSolver(std::span<const double> diag, std::span<const double> off1,
                      std::span<const double> off2);

  void solve(std::span<const double> rhs, std::span<double> x) const;
  std::size_t size() const noexcept { return d_.size(); }

 private:
  std::vector<double> d_, l1_, l2_;
};

/// u_xxxx on the cell-centered grid with even reflection through both walls
/// (u_{-1} = u_0, u_{-2} = u_1 and mirrored at x = a), which enforces
/// u_x = u_xxx = 0. Equals the square of the reflected second difference.
void apply_biharmonic(std::span<const double> u, double h, std::span<double> out);
void apply_second_difference(std::span<const double> u, double h, std::span<double> out);

struct FdConfig {
  double dt = 1e-4;
  /// Floor for step halving; below it the run is declared a blow-up.
  double dt_min = 1e-22;
  double t_horizon = 1.0;
  double u_max = 1e8;
  /// A step that changes ||u||_inf by more than this fraction counts as a
  /// solver failure and is retried with half the step.
  double max_rel_change = 0.05;
  std::size_t sample_stride = 1;
  std::size_t checkpoint_stride = 0;
  std::size_t max_steps = 20'000'000;

  void validate() const;
};

/// Method-of-lines solver: second-order differences in space, Crank-Nicolson
/// for the biharmonic term, variable-step Adams-Bashforth 2 for the nonlocal
/// source, discrete mean re-projected to zero every step. spec.n_modes() is
/// the number of grid points (at least 64). Checkpoints are stored as the
/// cosine coefficients of the grid state.
Trajectory fd_advance(const GridField& u0, const DomainSpec& spec, const FdConfig& cfg);

struct WeakFormReport {
  std::size_t n_test = 0;
  std::size_t n_time = 0;
  /// residuals[(k-1) * n_time + (m-1)] for spatial mode k and time hat m.
  std::vector<double> residuals;
  /// Modes beyond the dealiased band (k > 2N/3) are flagged unreliable.
  std::vector<bool> reliable;
  double max_reliable = 0.0;
  std::string quadrature;

  double at(std::size_t k, std::size_t m) const { return residuals[(k - 1) * n_time + (m - 1)]; }
};

/// Time-integrated weak form against phi = cos(k pi x / a) psi_m(s), with
/// psi_m interior hat functions on a uniform partition of the checkpoint
/// range. The u_t term is integrated by parts so only stored states enter.
/// Throws NoCheckpoints.
WeakFormReport weak_form_residual(const Trajectory& traj, std::size_t n_test,
                                  std::size_t n_time = 8);

struct SeriesDifference {
  double max_rel_J = 0.0;
  double max_rel_I = 0.0;
  double max_rel_l2 = 0.0;
};

struct ComparisonReport {
  Time overlap_begin = 0;
  Time overlap_end = 0;
  SeriesDifference series;
  /// (t, relative L2 difference) at checkpoints of the first trajectory.
  std::vector<std::pair<Time, double>> state_differences;
  double max_rel_state = 0.0;
  OutcomeKind kind_a = OutcomeKind::Inconclusive;
  OutcomeKind kind_b = OutcomeKind::Inconclusive;
  bool kinds_agree = false;
  std::optional<double> blowup_time_rel_diff;
};

/// Throws DisjointRanges.
ComparisonReport compare(const Trajectory& a, const Trajectory& b);

}  // namespace thinfilm::oracle
