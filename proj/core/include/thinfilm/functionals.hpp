#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "thinfilm/core.hpp"
#include "thinfilm/spectral.hpp"
#include "thinfilm/trajectory.hpp"

namespace thinfilm {

/// Midpoint quadrature of the synthesized field; mode 0 is not stored, so
/// this measures only transform roundoff.
double mass(const SpectralField& u, const DomainSpec& spec);
/// Midpoint quadrature of the samples over (0, a).
double mass(const GridField& u, const DomainSpec& spec);

FieldNorms compute_norms(const SpectralField& u, const DomainSpec& spec);

/// J(u) = ||u_xx||^2 / 2 - ||u||_{p+1}^{p+1} / (p+1)
double energy_J(const SpectralField& u, const DomainSpec& spec);
/// I(u) = ||u_xx||^2 - ||u||_{p+1}^{p+1}
double nehari_I(const SpectralField& u, const DomainSpec& spec);
/// The scaling that puts lambda*u on the Nehari manifold:
/// (||u_xx||^2 / ||u||_{p+1}^{p+1})^{1/(p-1)}. Throws ZeroField.
double lambda_star(const SpectralField& u, const DomainSpec& spec);
double lambda_star(const FieldNorms& n, double p);

/// |int_0^t ||u_s||^2 ds + J(t) - J(0)| at every sample, trapezoid rule
/// over the stored samples. Throws EmptyTrajectory.
std::vector<double> energy_identity_residual(const Trajectory& traj);

struct IdentityResidual {
  Time t = 0;
  double residual = 0.0;  ///< absolute
  double relative = 0.0;  ///< residual / |reference|
};

/// Second-order (non-uniform) centered difference of ||u||^2 against -2I at
/// interior samples. Throws TooFewSamples.
std::vector<IdentityResidual> l2_identity_residual(const Trajectory& traj);
/// Second divided differences of M against M'' = -I at interior samples.
std::vector<IdentityResidual> m_second_difference_residual(const Trajectory& traj);

struct MonotonicityViolation {
  Time t = 0;
  double magnitude = 0.0;
};

/// Evidence about d/dt ||u||_{p+1}^{p+1} and the inequality
/// dI/dt <= -2 ||u_t||^2 over consecutive samples. Records, never asserts.
struct MonotonicityReport {
  std::vector<Time> t_mid;
  std::vector<double> dlp1_dt;
  std::vector<double> dI_dt;
  /// -2 ||u_t||^2 averaged over the interval.
  std::vector<double> bound;
  std::size_t lp1_increasing = 0;
  std::size_t lp1_decreasing = 0;
  std::size_t lp1_flat = 0;
  double tolerance = 0.0;
  std::vector<MonotonicityViolation> violations;
  /// max |dI/dt - (2 dJ/dt - (p-1)/(p+1) dlp1/dt)| over intervals.
  double max_identity_discrepancy = 0.0;
};

MonotonicityReport monotonicity_monitor(const Trajectory& traj, double rel_tolerance = 1e-6);

/// Upper end of the admissible interval (0, 1 - sqrt(2/(p+1))).
double concavity_epsilon_upper(double p) noexcept;
double concavity_eta(double p, double epsilon) noexcept;

struct ConcavityReport {
  double epsilon = 0.0;
  double eta = 0.0;
  /// (t, F(t) = M(t)^-eta) for samples with M > 0.
  std::vector<std::pair<Time, double>> F_series;
  std::size_t F_convex = 0;   ///< second differences > 0
  std::size_t F_concave = 0;  ///< second differences < 0
  /// (t, M''M - ((p+1)/2)(1-eps)^2 (M')^2)
  std::vector<std::pair<Time, double>> margin_series;
  /// M vanishes identically: F is undefined.
  bool degenerate = false;
};

/// Default epsilon is the midpoint of the admissible interval.
/// Throws EpsilonOutOfRange.
ConcavityReport concavity_report(const Trajectory& traj, std::optional<double> epsilon = {});

/// Largest per-step increase of J relative to 1 + |J(0)|.
double max_energy_increase(const Trajectory& traj);

/// Samples violating ||u_xx||^2 <= (2(p+1)/(p-1)) J(u0) (1 + rel_slack).
/// Meaningful only when every sample has I >= 0.
std::vector<Time> necessity_bound_violations(const Trajectory& traj, double rel_slack = 1e-6);

}  // namespace thinfilm
