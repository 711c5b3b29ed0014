#include "thinfilm/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thinfilm/detail/cosine_transform.hpp"

namespace thinfilm {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      std::ostringstream os;
      os << what << " entry " << i << " is not finite";
      throw Error(ErrorCode::NonFinite, os.str());
    }
  }
}

}  // namespace

DomainSpec::DomainSpec(double a, double p, std::size_t n_modes) : a_(a), p_(p), n_modes_(n_modes) {
  if (!(std::isfinite(a) && a > 0.0)) throw Error(ErrorCode::InvalidDomain, "a must be positive");
  if (!(std::isfinite(p) && p > 1.0)) throw Error(ErrorCode::InvalidDomain, "p must exceed 1");
  if (n_modes < 8) throw Error(ErrorCode::InvalidDomain, "n_modes must be at least 8");
}

double DomainSpec::wavenumber(std::size_t k) const noexcept {
  return static_cast<double>(k) * kPi / a_;
}

double DomainSpec::grid_point(std::size_t j) const noexcept {
  return (static_cast<double>(j) + 0.5) * a_ / static_cast<double>(n_modes_);
}

GridField::GridField(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "grid sample");
}

SpectralField::SpectralField(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  require_finite(coeffs_, "cosine coefficient");
}

SpectralField SpectralField::zero(const DomainSpec& spec) {
  return SpectralField(std::vector<double>(spec.n_coeffs(), 0.0));
}

SpectralField SpectralField::mode(const DomainSpec& spec, std::size_t k, double amplitude) {
  if (k == 0 || k > spec.n_coeffs())
    throw Error(ErrorCode::SizeMismatch, "mode index outside 1..N-1");
  std::vector<double> c(spec.n_coeffs(), 0.0);
  c[k - 1] = amplitude;
  return SpectralField(std::move(c));
}

double SpectralField::mode_coeff(std::size_t k) const noexcept {
  return (k >= 1 && k <= coeffs_.size()) ? coeffs_[k - 1] : 0.0;
}

double SpectralField::max_abs() const noexcept {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

bool SpectralField::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

SpectralField SpectralField::scaled(double factor) const {
  std::vector<double> c(coeffs_);
  for (double& v : c) v *= factor;
  return SpectralField(std::move(c));
}

SpectralField SpectralField::resized(std::size_t n_coeffs) const {
  std::vector<double> c(n_coeffs, 0.0);
  std::copy_n(coeffs_.begin(), std::min(n_coeffs, coeffs_.size()), c.begin());
  return SpectralField(std::move(c));
}

SpectralField operator+(const SpectralField& lhs, const SpectralField& rhs) {
  if (lhs.size() != rhs.size()) throw Error(ErrorCode::SizeMismatch, "field sum");
  std::vector<double> c(lhs.coeffs_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += rhs.coeffs_[i];
  return SpectralField(std::move(c));
}

SpectralField operator-(const SpectralField& lhs, const SpectralField& rhs) {
  if (lhs.size() != rhs.size()) throw Error(ErrorCode::SizeMismatch, "field difference");
  std::vector<double> c(lhs.coeffs_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= rhs.coeffs_[i];
  return SpectralField(std::move(c));
}

void require_size(const SpectralField& u, const DomainSpec& spec) {
  if (u.size() != spec.n_coeffs()) {
    std::ostringstream os;
    os << "spectral field has " << u.size() << " coefficients, domain expects "
       << spec.n_coeffs();
    throw Error(ErrorCode::SizeMismatch, os.str());
  }
}

void require_size(const GridField& u, const DomainSpec& spec) {
  if (u.size() != spec.n_modes()) {
    std::ostringstream os;
    os << "grid field has " << u.size() << " samples, domain expects " << spec.n_modes();
    throw Error(ErrorCode::SizeMismatch, os.str());
  }
}

GridField to_grid(const SpectralField& u, const DomainSpec& spec) {
  require_size(u, spec);
  const auto& transform = detail::CosineTransform::get(spec.n_modes());
  std::vector<double> grid(spec.n_modes()), scratch(spec.n_modes());
  transform.synthesize(u.coeffs(), grid, scratch);
  return GridField(std::move(grid));
}

SpectralField to_spectral(const GridField& u, const DomainSpec& spec) {
  require_size(u, spec);
  const auto& transform = detail::CosineTransform::get(spec.n_modes());
  std::vector<double> coeffs(spec.n_coeffs()), scratch(spec.n_modes());
  transform.analyze(u.values(), coeffs, scratch);
  return SpectralField(std::move(coeffs));
}

SpectralField validate_initial_datum(const GridField& u0, const DomainSpec& spec) {
  require_size(u0, spec);
  double peak = 0.0;
  for (double v : u0.values()) peak = std::max(peak, std::abs(v));
  SpectralField field = to_spectral(u0, spec);
  const double largest = field.max_abs();
  if (largest == 0.0 || largest < 1e-14 * peak)
    throw Error(ErrorCode::ZeroDatum, "initial datum is numerically constant");
  return field;
}

std::string_view to_string(OutcomeKind kind) noexcept {
  switch (kind) {
    case OutcomeKind::BlowUp: return "BlowUp";
    case OutcomeKind::GlobalHorizonReached: return "GlobalHorizonReached";
    case OutcomeKind::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

std::string_view to_string(BlowUpTrigger trigger) noexcept {
  switch (trigger) {
    case BlowUpTrigger::None: return "None";
    case BlowUpTrigger::Amplitude: return "Amplitude";
    case BlowUpTrigger::StepCollapse: return "StepCollapse";
    case BlowUpTrigger::Overflow: return "Overflow";
  }
  return "unknown";
}

RunOutcome RunOutcome::blow_up(Time t_end, Time estimate, BlowUpTrigger trigger, double value,
                               double threshold, std::string evidence) {
  RunOutcome out;
  out.kind = OutcomeKind::BlowUp;
  out.t_end = t_end;
  out.blowup_time_estimate = std::max(estimate, t_end);
  out.trigger = trigger;
  out.trigger_value = value;
  out.threshold = threshold;
  out.evidence = std::move(evidence);
  return out;
}

RunOutcome RunOutcome::horizon_reached(Time t_end, std::string evidence) {
  RunOutcome out;
  out.kind = OutcomeKind::GlobalHorizonReached;
  out.t_end = t_end;
  out.evidence = std::move(evidence);
  return out;
}

RunOutcome RunOutcome::inconclusive(Time t_end, std::string evidence) {
  RunOutcome out;
  out.kind = OutcomeKind::Inconclusive;
  out.t_end = t_end;
  out.evidence = std::move(evidence);
  return out;
}

}  // namespace thinfilm
