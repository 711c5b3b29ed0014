#include "thinfilm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thinfilm/detail/cosine_transform.hpp"

namespace thinfilm {

LinearSymbol::LinearSymbol(const DomainSpec& spec) : eigenvalues_(spec.n_coeffs()) {
  for (std::size_t k = 1; k <= spec.n_coeffs(); ++k) {
    const double q = spec.wavenumber(k);
    eigenvalues_[k - 1] = (q * q) * (q * q);
  }
}

SpectralWorkspace::SpectralWorkspace(const DomainSpec& spec)
    : spec_(spec),
      symbol_(spec),
      padded_(2 * spec.n_modes()),
      power_(2 * spec.n_modes()),
      scratch_(2 * spec.n_modes()) {}

double SpectralWorkspace::l2sq(std::span<const double> u) const noexcept {
  double s = 0.0;
  for (double c : u) s += c * c;
  return 0.5 * spec_.a() * s;
}

double SpectralWorkspace::h2sq(std::span<const double> u) const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += symbol_[i] * u[i] * u[i];
  return 0.5 * spec_.a() * s;
}

void SpectralWorkspace::pointwise(std::span<const double> u) {
  if (u.size() != spec_.n_coeffs()) throw Error(ErrorCode::SizeMismatch, "source input size");
  const auto& transform = detail::CosineTransform::get(padded_.size());
  transform.synthesize(u, padded_, scratch_);
  const double p = spec_.p();
  for (std::size_t j = 0; j < padded_.size(); ++j) {
    const double v = padded_[j];
    const double f = signed_power(v, p);
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "|u|^p overflows at padded grid point " << j << " (u = " << v << ")";
      throw Error(ErrorCode::Overflow, os.str());
    }
    power_[j] = f;
  }
}

void SpectralWorkspace::source(std::span<const double> u, std::span<double> out) {
  pointwise(u);
  if (out.size() != spec_.n_coeffs()) throw Error(ErrorCode::SizeMismatch, "source output size");
  // Analysis drops mode 0, which is exactly the nonlocal mean subtraction.
  detail::CosineTransform::get(padded_.size()).analyze(power_, out, scratch_);
}

void SpectralWorkspace::rhs(std::span<const double> u, std::span<double> out) {
  source(u, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= symbol_[i] * u[i];
}

FieldNorms SpectralWorkspace::norms(std::span<const double> u) {
  pointwise(u);
  FieldNorms n;
  n.l2sq = l2sq(u);
  n.h2sq = h2sq(u);
  double sum = 0.0, peak = 0.0, mass = 0.0;
  for (std::size_t j = 0; j < padded_.size(); ++j) {
    sum += padded_[j] * power_[j];
    mass += padded_[j];
    peak = std::max(peak, std::abs(padded_[j]));
  }
  n.lp1 = sum * spec_.a() / static_cast<double>(padded_.size());
  n.linf = peak;
  n.mass = mass * spec_.a() / static_cast<double>(padded_.size());
  if (!std::isfinite(n.lp1) || !std::isfinite(n.h2sq))
    throw Error(ErrorCode::Overflow, "field norms overflow");
  return n;
}

FieldNorms SpectralWorkspace::evaluate(std::span<const double> u, std::span<double> source_out) {
  FieldNorms n = norms(u);
  if (source_out.size() != spec_.n_coeffs())
    throw Error(ErrorCode::SizeMismatch, "source output size");
  detail::CosineTransform::get(padded_.size()).analyze(power_, source_out, scratch_);
  return n;
}

SpectralField second_derivative(const SpectralField& u, const DomainSpec& spec) {
  require_size(u, spec);
  std::vector<double> c(u.coeffs().begin(), u.coeffs().end());
  for (std::size_t k = 1; k <= c.size(); ++k) {
    const double q = spec.wavenumber(k);
    c[k - 1] *= -(q * q);
  }
  return SpectralField(std::move(c));
}

SpectralField fourth_derivative(const SpectralField& u, const DomainSpec& spec) {
  require_size(u, spec);
  const LinearSymbol symbol(spec);
  std::vector<double> c(u.coeffs().begin(), u.coeffs().end());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= symbol[i];
  return SpectralField(std::move(c));
}

SpectralField nonlinear_source(const SpectralField& u, const DomainSpec& spec) {
  require_size(u, spec);
  SpectralWorkspace ws(spec);
  std::vector<double> out(spec.n_coeffs());
  ws.source(u.coeffs(), out);
  return SpectralField(std::move(out));
}

SpectralField rhs(const SpectralField& u, const DomainSpec& spec) {
  require_size(u, spec);
  SpectralWorkspace ws(spec);
  std::vector<double> out(spec.n_coeffs());
  ws.rhs(u.coeffs(), out);
  return SpectralField(std::move(out));
}

}  // namespace thinfilm
