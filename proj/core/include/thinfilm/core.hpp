#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thinfilm/error.hpp"

namespace thinfilm {

/// Simulated time. Extended precision because blow-up runs resolve
/// T - t far below the spacing of doubles near t ~ 0.1.
using Time = long double;

inline constexpr double kPi = 3.14159265358979323846;

/// Interval length `a`, exponent `p` and the number of retained cosine
/// modes. The basis is cos(k*pi*x/a), k = 1..n_modes-1, sampled at the
/// half-sample points x_j = (j + 1/2) a / n_modes.
class DomainSpec {
 public:
  DomainSpec(double a, double p, std::size_t n_modes);

  double a() const noexcept { return a_; }
  double p() const noexcept { return p_; }
  std::size_t n_modes() const noexcept { return n_modes_; }
  /// Length of a SpectralField on this domain (mode 0 is not stored).
  std::size_t n_coeffs() const noexcept { return n_modes_ - 1; }
  /// k * pi / a.
  double wavenumber(std::size_t k) const noexcept;
  double grid_point(std::size_t j) const noexcept;

  DomainSpec with_modes(std::size_t n_modes) const { return {a_, p_, n_modes}; }

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;

 private:
  double a_;
  double p_;
  std::size_t n_modes_;
};

/// Point samples at the collocation points of a DomainSpec.
class GridField {
 public:
  GridField() = default;
  /// Throws NonFinite on any NaN/inf sample.
  explicit GridField(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t j) const noexcept { return values_[j]; }

 private:
  std::vector<double> values_;
};

/// Zero-mean field stored as cosine coefficients c_k, k = 1..N-1.
/// coeffs()[k-1] is the amplitude of cos(k*pi*x/a).
class SpectralField {
 public:
  SpectralField() = default;
  /// Throws NonFinite on any NaN/inf coefficient.
  explicit SpectralField(std::vector<double> coeffs);

  static SpectralField zero(const DomainSpec& spec);
  /// amplitude * cos(k*pi*x/a).
  static SpectralField mode(const DomainSpec& spec, std::size_t k, double amplitude = 1.0);

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  /// Coefficient of mode k (k >= 1); zero beyond the stored band.
  double mode_coeff(std::size_t k) const noexcept;
  double max_abs() const noexcept;
  bool is_zero() const noexcept;

  SpectralField scaled(double factor) const;
  /// Truncates or zero-pads to `n_coeffs` coefficients.
  SpectralField resized(std::size_t n_coeffs) const;

  friend SpectralField operator+(const SpectralField& lhs, const SpectralField& rhs);
  friend SpectralField operator-(const SpectralField& lhs, const SpectralField& rhs);
  friend SpectralField operator*(double factor, const SpectralField& field) { return field.scaled(factor); }

 private:
  std::vector<double> coeffs_;
};

void require_size(const SpectralField& u, const DomainSpec& spec);
void require_size(const GridField& u, const DomainSpec& spec);

/// Inverse cosine transform onto the N collocation points.
GridField to_grid(const SpectralField& u, const DomainSpec& spec);
/// Forward cosine transform; the mean (mode 0) is discarded.
SpectralField to_spectral(const GridField& u, const DomainSpec& spec);

/// Projects the sample mean out and rejects data that vanish afterwards.
SpectralField validate_initial_datum(const GridField& u0, const DomainSpec& spec);

/// Samples f at the collocation points of `spec`.
template <class F>
GridField sample(const DomainSpec& spec, F&& f) {
  std::vector<double> values(spec.n_modes());
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = f(spec.grid_point(j));
  return GridField(std::move(values));
}

enum class OutcomeKind { BlowUp, GlobalHorizonReached, Inconclusive };

enum class BlowUpTrigger { None, Amplitude, StepCollapse, Overflow };

std::string_view to_string(OutcomeKind kind) noexcept;
std::string_view to_string(BlowUpTrigger trigger) noexcept;

struct RunOutcome {
  OutcomeKind kind = OutcomeKind::Inconclusive;
  Time t_end = 0;
  std::optional<Time> blowup_time_estimate;
  std::string evidence;
  BlowUpTrigger trigger = BlowUpTrigger::None;
  /// Value of the quantity that tripped the trigger and its threshold.
  double trigger_value = 0.0;
  double threshold = 0.0;

  static RunOutcome blow_up(Time t_end, Time estimate, BlowUpTrigger trigger, double value,
                            double threshold, std::string evidence);
  static RunOutcome horizon_reached(Time t_end, std::string evidence);
  static RunOutcome inconclusive(Time t_end, std::string evidence);
};

}  // namespace thinfilm
