#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "thinfilm/core.hpp"
#include "thinfilm/spectral.hpp"

namespace thinfilm {

/// lambda_star(u) * u. Throws ZeroField.
SpectralField project_to_nehari(const SpectralField& u, const DomainSpec& spec);

struct OptimizerConfig {
  double grad_tol = 1e-9;
  std::size_t max_iter = 5000;
  std::size_t mode_seeds = 4;
  std::size_t random_seeds = 8;
  /// Random seeds excite modes 1..random_band (capped at N-1).
  std::size_t random_band = 12;
  std::uint64_t rng_seed = 20240611;
};

struct WellDepthEstimate {
  double d_hat = 0.0;
  /// Lies on the Nehari manifold; J(minimizer) == d_hat.
  SpectralField minimizer;
  std::size_t n_modes_used = 0;
  std::size_t multistart_count = 0;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

/// Minimizes the scale-invariant reduced energy u -> J(lambda_star(u) u)
/// over nonzero fields by multistart gradient descent.
WellDepthEstimate estimate_well_depth(const DomainSpec& spec, const OptimizerConfig& cfg = {});

struct LambdaAlphaEstimate {
  double alpha = 0.0;
  /// sqrt(2 alpha (p+1) / (p-1)); N_alpha is the part of N with
  /// ||u_xx||_2 at most this radius.
  double radius = 0.0;
  /// Best feasible (1/2)||u||_2^2: a lower bound on Lambda_alpha.
  double value = 0.0;
  SpectralField field;
  std::size_t iterations = 0;
  bool converged = false;
};

double nehari_alpha_radius(double alpha, double p) noexcept;

/// Projected ascent of (1/2)||u||_2^2 over N_alpha. Throws AlphaBelowDepth
/// when alpha does not exceed the estimated depth.
LambdaAlphaEstimate estimate_lambda_alpha(double alpha, const DomainSpec& spec,
                                          const OptimizerConfig& cfg = {});
LambdaAlphaEstimate estimate_lambda_alpha(double alpha, const DomainSpec& spec,
                                          const OptimizerConfig& cfg,
                                          const WellDepthEstimate& depth);

enum class ClassificationBranch { LowEnergyBlowUp, HighEnergyBlowUp, TheoremOnly, NoPrediction };
enum class PredictedOutcome { BlowUp, Global, None };

std::string_view to_string(ClassificationBranch branch) noexcept;
std::string_view to_string(PredictedOutcome outcome) noexcept;

struct ClassificationReport {
  double J0 = 0.0;
  double I0 = 0.0;
  double l2sq0 = 0.0;
  double d_hat = 0.0;
  std::optional<double> lambda_alpha_hat;
  ClassificationBranch branch = ClassificationBranch::NoPrediction;
  PredictedOutcome predicted = PredictedOutcome::None;
  std::string note;
};

/// Static classification of an initial datum. I0 < 0 always predicts
/// blow-up; the branch records which older sufficient condition also holds.
/// I0 >= 0 yields NoPrediction: whether I stays nonnegative is a property of
/// the trajectory, not of the datum.
ClassificationReport classify_initial_datum(const SpectralField& u0, const DomainSpec& spec,
                                            double d_hat,
                                            std::optional<double> lambda_alpha_hat = {});

/// Pure branch assignment from the four scalars.
ClassificationBranch classify_branch(double J0, double I0, double l2sq0, double d_hat,
                                     std::optional<double> lambda_alpha_hat) noexcept;

}  // namespace thinfilm
