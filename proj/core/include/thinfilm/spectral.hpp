#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "thinfilm/core.hpp"

namespace thinfilm {

/// Eigenvalues (k pi / a)^4, k = 1..N-1, of the biharmonic operator with
/// u_x = u_xxx = 0 at both ends.
class LinearSymbol {
 public:
  explicit LinearSymbol(const DomainSpec& spec);

  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  double operator[](std::size_t i) const noexcept { return eigenvalues_[i]; }
  std::size_t size() const noexcept { return eigenvalues_.size(); }

 private:
  std::vector<double> eigenvalues_;
};

/// Quadratic and power norms of one field. l2sq and h2sq are exact in
/// coefficient space; lp1 = ||u||_{p+1}^{p+1} and linf come from the
/// 2N-point padded grid.
struct FieldNorms {
  double l2sq = 0.0;
  double h2sq = 0.0;
  double lp1 = 0.0;
  double linf = 0.0;
  /// Midpoint rule for int_0^a u on the padded grid; zero up to roundoff.
  double mass = 0.0;
};

/// Scratch buffers and transform handles for repeated evaluation of the
/// nonlinear source on one domain. Not shareable across threads; create
/// one per run.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(const DomainSpec& spec);

  const DomainSpec& spec() const noexcept { return spec_; }
  const LinearSymbol& symbol() const noexcept { return symbol_; }
  std::size_t padded_size() const noexcept { return padded_.size(); }

  /// sign(u)|u|^p minus its mean, projected on modes 1..N-1.
  /// Throws Overflow when the pointwise power leaves the double range.
  void source(std::span<const double> u, std::span<double> out);
  /// -u_xxxx + source(u).
  void rhs(std::span<const double> u, std::span<double> out);
  FieldNorms norms(std::span<const double> u);
  /// Norms of u and source(u) from a single synthesis.
  FieldNorms evaluate(std::span<const double> u, std::span<double> source_out);

 private:
  double l2sq(std::span<const double> u) const noexcept;
  double h2sq(std::span<const double> u) const noexcept;
  /// Fills padded_ with u and power_ with sign(u)|u|^p.
  void pointwise(std::span<const double> u);

  DomainSpec spec_;
  LinearSymbol symbol_;
  std::vector<double> padded_;
  std::vector<double> power_;
  std::vector<double> scratch_;
};

SpectralField second_derivative(const SpectralField& u, const DomainSpec& spec);
SpectralField fourth_derivative(const SpectralField& u, const DomainSpec& spec);
SpectralField nonlinear_source(const SpectralField& u, const DomainSpec& spec);
/// Semi-discrete time derivative u_t.
SpectralField rhs(const SpectralField& u, const DomainSpec& spec);

/// sign(u)|u|^p with the common integer exponents special-cased.
inline double signed_power(double u, double p) noexcept {
  if (p == 3.0) return u * u * u;
  if (p == 2.0) return u * (u < 0 ? -u : u);
  const double r = std::pow(std::abs(u), p);
  return u < 0 ? -r : r;
}

}  // namespace thinfilm
