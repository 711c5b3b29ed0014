#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "thinfilm/core.hpp"

using namespace thinfilm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no thinfilm::Error thrown");
  return ErrorCode::InvalidDomain;
}

}  // namespace

TEST_CASE("DomainSpec rejects invalid parameters") {
  CHECK(code_of([] { DomainSpec(0.0, 3.0, 64); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { DomainSpec(-1.0, 3.0, 64); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { DomainSpec(kPi, 1.0, 64); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { DomainSpec(kPi, 3.0, 7); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { DomainSpec(std::nan(""), 3.0, 64); }) == ErrorCode::InvalidDomain);
}

TEST_CASE("DomainSpec geometry") {
  const DomainSpec s(2 * kPi, 3.0, 16);
  CHECK(s.n_coeffs() == 15);
  CHECK_THAT(s.grid_point(0), WithinRel(2 * kPi / 32, 1e-15));
  CHECK_THAT(s.grid_point(15), WithinRel(2 * kPi * 31 / 32, 1e-15));
  CHECK_THAT(s.wavenumber(3), WithinRel(1.5, 1e-15));
  CHECK(s.with_modes(32).n_modes() == 32);
  CHECK(s.with_modes(32).a() == s.a());
  CHECK(s == DomainSpec(2 * kPi, 3.0, 16));
}

TEST_CASE("fields reject non-finite entries") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { GridField({1.0, inf}); }) == ErrorCode::NonFinite);
  CHECK(code_of([&] { SpectralField({std::nan(""), 0.0}); }) == ErrorCode::NonFinite);
}

TEST_CASE("SpectralField algebra") {
  const DomainSpec s(kPi, 3.0, 8);
  const auto u = SpectralField::mode(s, 2, 1.5);
  CHECK(u.size() == 7);
  CHECK(u.mode_coeff(2) == 1.5);
  CHECK(u[1] == 1.5);
  CHECK(u.max_abs() == 1.5);
  CHECK_FALSE(u.is_zero());
  CHECK(SpectralField::zero(s).is_zero());
  const auto v = u + 2.0 * SpectralField::mode(s, 3, 1.0) - u;
  CHECK(v.mode_coeff(2) == 0.0);
  CHECK(v.mode_coeff(3) == 2.0);
  CHECK(u.resized(3).size() == 3);
  CHECK(u.resized(20).mode_coeff(2) == 1.5);
  CHECK(u.resized(20).mode_coeff(20) == 0.0);
  CHECK(code_of([&] { SpectralField::mode(s, 0, 1.0); }) == ErrorCode::SizeMismatch);
  CHECK(code_of([&] { SpectralField::mode(s, 8, 1.0); }) == ErrorCode::SizeMismatch);
}

TEST_CASE("to_grid matches direct cosine sums") {
  const DomainSpec s(2 * kPi, 3.0, 32);
  std::vector<double> c(s.n_coeffs());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::sin(1.0 + 0.7 * static_cast<double>(k)) / (1.0 + k);
  const GridField g = to_grid(SpectralField(c), s);
  for (std::size_t j = 0; j < s.n_modes(); ++j)
    CHECK_THAT(g[j], WithinAbs(oracles::cosine_sum(c, s.a(), s.grid_point(j)), 1e-13));
}

TEST_CASE("to_spectral inverts to_grid and drops the mean") {
  const DomainSpec s(kPi, 3.0, 64);
  std::vector<double> c(s.n_coeffs(), 0.0);
  c[0] = 0.3;
  c[4] = -1.2;
  c[62] = 0.01;
  const GridField g = to_grid(SpectralField(c), s);
  std::vector<double> shifted(g.values().begin(), g.values().end());
  for (double& v : shifted) v += 5.0;
  const SpectralField back = to_spectral(GridField(shifted), s);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK_THAT(back[k], WithinAbs(c[k], 1e-13));
}

TEST_CASE("validate_initial_datum projects out the mean") {
  const DomainSpec s(kPi, 3.0, 64);
  const auto g = sample(s, [](double x) { return 1.0 + 2.0 * std::cos(x); });
  const auto u = validate_initial_datum(g, s);
  CHECK_THAT(u.mode_coeff(1), WithinRel(2.0, 1e-13));
  for (std::size_t k = 2; k <= s.n_coeffs(); ++k) CHECK_THAT(u.mode_coeff(k), WithinAbs(0.0, 1e-13));
}

TEST_CASE("validate_initial_datum rejects constants") {
  const DomainSpec s(kPi, 3.0, 64);
  CHECK(code_of([&] { validate_initial_datum(sample(s, [](double) { return 0.0; }), s); }) == ErrorCode::ZeroDatum);
  CHECK(code_of([&] { validate_initial_datum(sample(s, [](double) { return 3.7; }), s); }) == ErrorCode::ZeroDatum);
  CHECK(code_of([&] { validate_initial_datum(GridField(std::vector<double>(10, 1.0)), s); }) ==
        ErrorCode::SizeMismatch);
}

TEST_CASE("RunOutcome factories") {
  const auto b = RunOutcome::blow_up(0.5L, 0.4L, BlowUpTrigger::Amplitude, 2e8, 1e8, "peak");
  CHECK(b.kind == OutcomeKind::BlowUp);
  REQUIRE(b.blowup_time_estimate);
  CHECK(*b.blowup_time_estimate == 0.5L);  // clamped to t_end
  CHECK(b.trigger == BlowUpTrigger::Amplitude);
  const auto h = RunOutcome::horizon_reached(10.0L, "done");
  CHECK(h.kind == OutcomeKind::GlobalHorizonReached);
  CHECK_FALSE(h.blowup_time_estimate);
  CHECK(RunOutcome::inconclusive(1.0L, "x").kind == OutcomeKind::Inconclusive);
  CHECK(to_string(OutcomeKind::BlowUp) == "BlowUp");
  CHECK(to_string(BlowUpTrigger::StepCollapse) == "StepCollapse");
}

TEST_CASE("Error messages carry the code name") {
  const Error e(ErrorCode::ConfigInvalid, "bad");
  CHECK(std::string(e.what()).find("ConfigInvalid") != std::string::npos);
  CHECK(to_string(ErrorCode::LinearSolveFailure) == "LinearSolveFailure");
}
