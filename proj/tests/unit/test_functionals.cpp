#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "thinfilm/functionals.hpp"
#include "thinfilm/integrator.hpp"

using namespace thinfilm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Frozen from 4096-point midpoint quadrature of cos x on (0, pi), p = 3.
constexpr double kH2 = 1.5707963267948966;       // pi/2
constexpr double kLp1 = 1.1780972450961724;      // 3 pi / 8
constexpr double kJ = 0.49087385212340517;       // 5 pi / 32
constexpr double kI = 0.39269908169872414;       // pi / 8
constexpr double kLambdaStar = 1.1547005383792515;  // sqrt(4/3)

Trajectory decaying(double dt, double horizon) {
  const DomainSpec s(kPi, 3.0, 64);
  StepperConfig c;
  c.adaptive = false;
  c.dt_init = dt;
  c.t_horizon = horizon;
  return advance(SpectralField::mode(s, 1, 0.5), s, c);
}

}  // namespace

TEST_CASE("frozen closed forms agree with the quadrature oracle") {
  const auto o = oracles::functionals({1.0}, kPi, 3.0);
  CHECK_THAT(o.h2sq, WithinRel(kH2, 1e-13));
  CHECK_THAT(o.lp1, WithinRel(kLp1, 1e-13));
  CHECK_THAT(o.J, WithinRel(kJ, 1e-13));
  CHECK_THAT(o.I, WithinRel(kI, 1e-13));
}

TEST_CASE("functionals of cos x on (0, pi), p = 3") {
  const DomainSpec s(kPi, 3.0, 64);
  const auto u = SpectralField::mode(s, 1, 1.0);
  const auto n = compute_norms(u, s);
  CHECK_THAT(n.h2sq, WithinRel(kH2, 1e-12));
  CHECK_THAT(n.lp1, WithinRel(kLp1, 1e-12));
  CHECK_THAT(energy_J(n, 3.0), WithinRel(kJ, 1e-12));
  CHECK_THAT(nehari_I(n), WithinRel(kI, 1e-12));
  CHECK_THAT(lambda_star(u, s), WithinRel(kLambdaStar, 1e-12));
}

TEST_CASE("functionals of amplitude data") {
  const DomainSpec s(kPi, 3.0, 64);
  // 2 cos x: I = 4(pi/2) - 16(3pi/8) = -4 pi, J = pi - 3pi/2 = -pi/2.
  const auto n2 = compute_norms(SpectralField::mode(s, 1, 2.0), s);
  CHECK_THAT(nehari_I(n2), WithinRel(-4 * kPi, 1e-12));
  CHECK_THAT(energy_J(n2, 3.0), WithinRel(-kPi / 2, 1e-12));
  // 0.5 cos x: I = pi/8 - 3pi/128.
  const auto nh = compute_norms(SpectralField::mode(s, 1, 0.5), s);
  CHECK_THAT(nehari_I(nh), WithinRel(0.25 * kH2 - 0.0625 * kLp1, 1e-12));
  CHECK_THAT(nehari_I(nh), WithinRel(0.31906800388021336, 1e-12));
}

TEST_CASE("mixed data on a longer interval match quadrature") {
  const double a = 2 * kPi;
  for (double p : {2.0, 3.0}) {
    const DomainSpec s(a, p, 128);
    const std::vector<double> c = {0.4, 0.0, -0.7, 0.2};
    SpectralField u(std::vector<double>(s.n_coeffs(), 0.0));
    for (std::size_t k = 0; k < c.size(); ++k) u = u + SpectralField::mode(s, k + 1, c[k]);
    const auto o = oracles::functionals(c, a, p);
    const auto n = compute_norms(u, s);
    CHECK_THAT(energy_J(n, p), WithinRel(o.J, 1e-6));
    CHECK_THAT(nehari_I(n), WithinRel(o.I, 1e-6));
  }
}

TEST_CASE("lambda_star scaling puts the field on the Nehari manifold") {
  const DomainSpec s(2 * kPi, 2.5, 64);
  const auto u = SpectralField::mode(s, 1, 0.3) + SpectralField::mode(s, 5, -0.2);
  const double ls = lambda_star(u, s);
  const auto n = compute_norms(ls * u, s);
  CHECK_THAT(nehari_I(n), WithinAbs(0.0, 1e-10 * n.h2sq));
  // Invariance under rescaling of the input.
  CHECK_THAT(lambda_star(3.0 * u, s), WithinRel(ls / 3.0, 1e-12));
  CHECK_THROWS_AS(lambda_star(SpectralField::zero(s), s), Error);
}

TEST_CASE("mass of grid and spectral fields") {
  const DomainSpec s(kPi, 3.0, 64);
  CHECK_THAT(mass(SpectralField::mode(s, 3, 5.0), s), WithinAbs(0.0, 1e-14));
  CHECK_THAT(mass(sample(s, [](double) { return 1.0; }), s), WithinRel(kPi, 1e-14));
}

TEST_CASE("energy identity residual shrinks with the step") {
  const auto coarse = decaying(2e-3, 0.5);
  const auto fine = decaying(1e-3, 0.5);
  auto worst = [](const std::vector<double>& r) {
    double m = 0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
  };
  const double rc = worst(energy_identity_residual(coarse));
  const double rf = worst(energy_identity_residual(fine));
  CHECK(rf < 1e-6);
  CHECK(rc / rf > 3.5);
}

TEST_CASE("L2 and M identities") {
  const auto tr = decaying(1e-3, 0.5);
  for (const auto& r : l2_identity_residual(tr)) CHECK(r.relative < 1e-5);
  for (const auto& r : m_second_difference_residual(tr)) CHECK(r.relative < 1e-5);
  for (const auto& s : tr.samples) CHECK(satisfies_invariants(s, 3.0));
}

TEST_CASE("identity residuals need enough samples") {
  Trajectory empty(DomainSpec(kPi, 3.0, 16));
  CHECK_THROWS_AS(energy_identity_residual(empty), Error);
  CHECK_THROWS_AS(l2_identity_residual(empty), Error);
  CHECK_THROWS_AS(m_second_difference_residual(empty), Error);
}

TEST_CASE("concavity constants") {
  CHECK_THAT(concavity_epsilon_upper(3.0), WithinRel(1.0 - std::sqrt(0.5), 1e-15));
  const double eps = 0.5 * concavity_epsilon_upper(3.0);
  // eta = ((p+1)(1-eps)^2 - 2)/2 is positive exactly when eps is admissible.
  CHECK_THAT(concavity_eta(3.0, eps), WithinRel(0.45710678118654746, 1e-12));
  CHECK_THAT(concavity_eta(3.0, concavity_epsilon_upper(3.0)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("concavity report") {
  const auto tr = decaying(1e-2, 1.0);
  const auto rep = concavity_report(tr);
  CHECK_THAT(rep.epsilon, WithinRel(0.14644660940672624, 1e-12));
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.F_series.size() + 1 == tr.samples.size());  // M(0) = 0 is skipped
  CHECK_THROWS_AS(concavity_report(tr, 0.5), Error);
  CHECK_THROWS_AS(concavity_report(tr, 0.0), Error);
}

TEST_CASE("monotonicity monitor on a decaying run") {
  const auto tr = decaying(1e-2, 1.0);
  const auto rep = monotonicity_monitor(tr);
  CHECK(rep.t_mid.size() == tr.samples.size() - 1);
  CHECK(rep.lp1_decreasing == rep.t_mid.size());
  CHECK(rep.max_identity_discrepancy < 1e-10);
}

TEST_CASE("energy decreases and the necessity bound holds on a decaying run") {
  const auto tr = decaying(1e-2, 2.0);
  CHECK(max_energy_increase(tr) <= 1e-12);
  CHECK(necessity_bound_violations(tr).empty());
}
