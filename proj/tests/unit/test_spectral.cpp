#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "thinfilm/detail/cosine_transform.hpp"
#include "thinfilm/spectral.hpp"

using namespace thinfilm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("linear symbol is (k pi / a)^4") {
  const DomainSpec s(2 * kPi, 3.0, 16);
  const LinearSymbol L(s);
  REQUIRE(L.size() == 15);
  for (std::size_t k = 1; k <= 15; ++k) CHECK_THAT(L[k - 1], WithinRel(std::pow(k / 2.0, 4), 1e-14));
}

TEST_CASE("derivatives of single modes") {
  const DomainSpec s(kPi, 3.0, 32);
  const auto u = SpectralField::mode(s, 3, 2.0);
  CHECK_THAT(second_derivative(u, s).mode_coeff(3), WithinRel(-18.0, 1e-14));
  CHECK_THAT(fourth_derivative(u, s).mode_coeff(3), WithinRel(162.0, 1e-14));
}

TEST_CASE("transform pair against direct sums", "[transform]") {
  for (std::size_t n : {8u, 12u, 64u, 100u}) {
    const auto& t = detail::CosineTransform::get(n);
    std::vector<double> c(n - 1), g(n), back(n - 1), scratch(n);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::cos(0.3 * k * k) / (1.0 + k);
    t.synthesize(c, g, scratch);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = (j + 0.5) * kPi / static_cast<double>(n);
      CHECK_THAT(g[j], WithinAbs(oracles::cosine_sum(c, kPi, x), 1e-12));
    }
    t.analyze(g, back, scratch);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK_THAT(back[k], WithinAbs(c[k], 1e-13));
  }
}

TEST_CASE("source of cos x for p = 3 is the exact projection of cos^3") {
  // cos^3 x = (3/4) cos x + (1/4) cos 3x, already mean free.
  const DomainSpec s(kPi, 3.0, 16);
  const auto f = nonlinear_source(SpectralField::mode(s, 1, 1.0), s);
  CHECK_THAT(f.mode_coeff(1), WithinRel(0.75, 1e-14));
  CHECK_THAT(f.mode_coeff(3), WithinRel(0.25, 1e-14));
  for (std::size_t k : {2u, 4u, 5u, 10u}) CHECK_THAT(f.mode_coeff(k), WithinAbs(0.0, 1e-15));
}

TEST_CASE("source for non-integer p matches quadrature coefficients") {
  const double a = 2 * kPi, p = 2.5;
  const DomainSpec s(a, p, 128);
  std::vector<double> c(s.n_coeffs(), 0.0);
  c[0] = 0.8;
  c[2] = -0.3;
  c[4] = 0.1;
  const auto f = nonlinear_source(SpectralField(c), s);
  auto g = [&](double x) { return oracles::signed_pow(oracles::cosine_sum(c, a, x), p); };
  for (std::size_t k = 1; k <= 12; ++k)
    CHECK_THAT(f.mode_coeff(k), WithinAbs(oracles::cosine_coefficient(g, a, k), 2e-6));
}

TEST_CASE("source is mean free: the nonlocal term removes the average") {
  const DomainSpec s(kPi, 2.0, 64);
  const auto u = SpectralField::mode(s, 1, 1.0) + SpectralField::mode(s, 2, 0.5);
  const auto f = nonlinear_source(u, s);
  // sign(u)|u| has a nonzero mean here, but mode 0 is not representable.
  const double mean = oracles::midpoint(
      [&](double x) { return oracles::signed_pow(std::cos(x) + 0.5 * std::cos(2 * x), 2.0); }, kPi);
  CHECK(std::abs(mean) > 1e-3);
  const GridField g = to_grid(f, s);
  double sum = 0.0;
  for (double v : g.values()) sum += v;
  CHECK_THAT(sum, WithinAbs(0.0, 1e-12));
}

TEST_CASE("norms against 4096-point quadrature") {
  const double a = 2 * kPi;
  for (double p : {2.0, 3.0, 4.5}) {
    const DomainSpec s(a, p, 64);
    std::vector<double> c(s.n_coeffs(), 0.0);
    c[0] = 0.6;
    c[1] = 0.25;
    c[6] = -0.1;
    SpectralWorkspace ws(s);
    const auto n = ws.norms(c);
    const auto o = oracles::functionals(c, a, p);
    CHECK_THAT(n.l2sq, WithinRel(o.l2sq, 1e-12));
    CHECK_THAT(n.h2sq, WithinRel(o.h2sq, 1e-12));
    // Exact for p = 3 (polynomial), spectrally small otherwise.
    CHECK_THAT(n.lp1, WithinRel(o.lp1, p == 3.0 ? 1e-12 : 1e-5));
    CHECK_THAT(n.mass, WithinAbs(0.0, 1e-14));
  }
}

TEST_CASE("rhs equals source minus fourth derivative") {
  const DomainSpec s(kPi, 3.0, 32);
  const auto u = SpectralField::mode(s, 1, 1.0) + SpectralField::mode(s, 4, 0.2);
  const auto r = rhs(u, s);
  const auto expect = nonlinear_source(u, s) - fourth_derivative(u, s);
  for (std::size_t k = 0; k < u.size(); ++k) CHECK_THAT(r[k], WithinAbs(expect[k], 1e-12));
}

TEST_CASE("overflow in the source is reported") {
  const DomainSpec s(kPi, 3.0, 16);
  const auto u = SpectralField::mode(s, 1, 1e120);
  try {
    nonlinear_source(u, s);
    FAIL("expected Overflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Overflow);
  }
}

TEST_CASE("workspace rejects mismatched sizes") {
  const DomainSpec s(kPi, 3.0, 16);
  SpectralWorkspace ws(s);
  std::vector<double> wrong(5, 0.0), out(15);
  CHECK_THROWS_AS(ws.source(wrong, out), Error);
}

TEST_CASE("signed_power fast paths agree with pow") {
  for (double u : {-2.5, -0.3, 0.0, 0.7, 3.0}) {
    CHECK_THAT(signed_power(u, 3.0), WithinAbs(oracles::signed_pow(u, 3.0), 1e-14));
    CHECK_THAT(signed_power(u, 2.0), WithinAbs(oracles::signed_pow(u, 2.0), 1e-14));
    CHECK_THAT(signed_power(u, 2.7), WithinAbs(oracles::signed_pow(u, 2.7), 1e-14));
  }
}
