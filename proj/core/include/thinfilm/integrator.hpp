#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "thinfilm/core.hpp"
#include "thinfilm/spectral.hpp"
#include "thinfilm/trajectory.hpp"

namespace thinfilm {

struct StepperConfig {
  double dt_init = 1e-3;
  double dt_min = 1e-13;
  double dt_max = 0.1;
  /// Local error target, relative to 1 + ||u||_2.
  double rel_tol = 1e-8;
  double t_horizon = 10.0;
  /// Blow-up amplitude threshold on ||u||_inf.
  double u_max = 1e8;
  std::size_t sample_stride = 1;
  /// 0 disables checkpoints; otherwise every n-th accepted state plus the
  /// first and last.
  std::size_t checkpoint_stride = 0;
  /// When false every step has length dt_init (up to the final one, which
  /// lands on t_horizon) and no error control is done.
  bool adaptive = true;
  std::size_t max_steps = 5'000'000;

  /// Throws ConfigInvalid.
  void validate() const;
};

/// Per-mode weights of the fourth-order exponential time-differencing
/// Runge-Kutta scheme for a fixed step length.
struct EtdCoefficients {
  double h = 0.0;
  std::vector<double> E, E2, Q, f1, f2, f3;

  /// The phi-type weights are averaged over 32 points on the unit circle
  /// around -lambda_k h, which avoids cancellation for small arguments.
  static EtdCoefficients compute(const LinearSymbol& symbol, double h);
};

struct StepOptions {
  /// Test hook: drop the source term so the step is the exact linear flow.
  bool include_nonlinear = true;
};

/// Reusable stepper for one domain; caches coefficients for recently used
/// step lengths. Not thread-safe; one per run.
class EtdStepper {
 public:
  explicit EtdStepper(const DomainSpec& spec, StepOptions options = {});

  /// Throws Overflow when the source evaluation overflows.
  void step(std::span<const double> u, double h, std::span<double> out);

  SpectralWorkspace& workspace() noexcept { return ws_; }

 private:
  const EtdCoefficients& coefficients(double h);
  void source(std::span<const double> u, std::span<double> out);

  SpectralWorkspace ws_;
  StepOptions options_;
  std::vector<EtdCoefficients> cache_;
  std::size_t next_slot_ = 0;
  std::vector<double> Nu_, Na_, Nb_, Nc_, a_, b_, c_;
};

/// One ETDRK4 step of length dt.
SpectralField step(const SpectralField& u, double dt, const DomainSpec& spec,
                   const LinearSymbol& symbol, StepOptions options = {});

/// Integrates from u0 until t_horizon or a blow-up signal: ||u||_inf above
/// u_max, the step controller needing dt below dt_min, or an overflow in the
/// source. Throws ConfigInvalid.
Trajectory advance(const SpectralField& u0, const DomainSpec& spec, const StepperConfig& cfg);

struct BlowUpFit {
  Time T = 0;
  /// Fitted rate gamma in ||u||_inf ~ C (T - t)^-gamma.
  double exponent = 0.0;
  std::size_t tail_samples = 0;
};

/// Least-squares fit of ||u||_inf ~ C (T - t)^{-1/(p-1)} over the last
/// decade of growth (at least 8 strictly growing samples). The returned T
/// is always past the last sample. Throws InsufficientTail.
BlowUpFit estimate_blowup_time(std::span<const Time> t, std::span<const double> linf, double p);
/// Requires outcome kind BlowUp.
BlowUpFit estimate_blowup_time(const Trajectory& traj);

}  // namespace thinfilm
