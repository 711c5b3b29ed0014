#include "thinfilm/lab/datum.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "thinfilm/functionals.hpp"

namespace thinfilm::lab {
namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidDescriptor, what); }

SpectralField build(const CosineCombo& d, const DomainSpec& spec) {
  if (d.terms.empty()) invalid("cosine_combo needs at least one term");
  std::vector<double> c(spec.n_coeffs(), 0.0);
  for (const auto& [k, amp] : d.terms) {
    if (k == 0) invalid("cosine_combo mode 0 would violate the zero-mean condition");
    if (k > spec.n_coeffs()) invalid("cosine_combo mode " + std::to_string(k) + " is not resolved");
    if (!std::isfinite(amp)) invalid("cosine_combo amplitude is not finite");
    c[k - 1] += amp;
  }
  return SpectralField(std::move(c));
}

SpectralField build(const RandomBandlimited& d, const DomainSpec& spec) {
  if (d.max_k == 0 || d.max_k > spec.n_coeffs()) invalid("random_bandlimited max_k out of range");
  if (!(std::isfinite(d.amplitude) && d.amplitude > 0.0)) invalid("random_bandlimited amplitude must be positive");
  std::mt19937_64 rng(d.seed);
  std::vector<double> c(spec.n_coeffs(), 0.0);
  for (std::size_t k = 0; k < d.max_k; ++k) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    c[k] = d.amplitude * (2.0 * u - 1.0);
  }
  return SpectralField(std::move(c));
}

SpectralField build(const NehariScaled& d, const DomainSpec& spec) {
  if (!(std::isfinite(d.multiplier) && d.multiplier > 0.0)) invalid("nehari_scaled multiplier must be positive");
  const SpectralField base = std::visit([&](const auto& b) { return build(b, spec); }, d.base);
  if (base.is_zero()) invalid("nehari_scaled base is zero");
  return (d.multiplier * lambda_star(base, spec)) * base;
}

std::string text(const CosineCombo& d) {
  std::ostringstream os;
  os << "cosine_combo(";
  for (std::size_t i = 0; i < d.terms.size(); ++i) os << (i ? ", " : "") << d.terms[i].first << ':' << d.terms[i].second;
  os << ')';
  return os.str();
}

std::string text(const RandomBandlimited& d) {
  std::ostringstream os;
  os << "random_bandlimited(max_k=" << d.max_k << ", amplitude=" << d.amplitude << ", seed=" << d.seed << ')';
  return os.str();
}

std::string text(const NehariScaled& d) {
  std::ostringstream os;
  os << "nehari_scaled(" << std::visit([](const auto& b) { return text(b); }, d.base)
     << ", multiplier=" << d.multiplier << ')';
  return os.str();
}

}  // namespace

SpectralField build_datum(const DatumDescriptor& d, const DomainSpec& spec) {
  SpectralField u = std::visit([&](const auto& x) { return build(x, spec); }, d);
  if (u.is_zero()) invalid("datum is identically zero");
  return u;
}

std::string describe(const DatumDescriptor& d) {
  return std::visit([](const auto& x) { return text(x); }, d);
}

}  // namespace thinfilm::lab
