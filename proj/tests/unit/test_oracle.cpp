#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "thinfilm/integrator.hpp"
#include "thinfilm/oracle.hpp"

using namespace thinfilm;
using namespace thinfilm::oracle;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

Trajectory spectral(double amplitude, double dt, double horizon, std::size_t ckpt) {
  const DomainSpec s(kPi, 3.0, 64);
  StepperConfig c;
  c.adaptive = false;
  c.dt_init = dt;
  c.t_horizon = horizon;
  c.checkpoint_stride = ckpt;
  return advance(SpectralField::mode(s, 1, amplitude), s, c);
}

Trajectory fd(double amplitude, std::size_t n, double dt, double horizon, std::size_t ckpt) {
  const DomainSpec s(kPi, 3.0, n);
  FdConfig c;
  c.dt = dt;
  c.t_horizon = horizon;
  c.checkpoint_stride = ckpt;
  return fd_advance(sample(s, [&](double x) { return amplitude * std::cos(x); }), s, c);
}

}  // namespace

TEST_CASE("pentadiagonal LDL^T against dense elimination") {
  const std::size_t n = 12;
  std::vector<double> d(n), o1(n), o2(n), rhs(n);
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = 7.0 + 0.1 * i;
    o1[i] = -2.0 + 0.05 * i;
    o2[i] = 0.5;
    rhs[i] = std::sin(1.0 + i);
    A[i][i] = d[i];
    if (i >= 1) A[i][i - 1] = A[i - 1][i] = o1[i];
    if (i >= 2) A[i][i - 2] = A[i - 2][i] = o2[i];
  }
  const PentadiagonalSolver solver(d, o1, o2);
  std::vector<double> x(n);
  solver.solve(rhs, x);
  const auto ref = dense_solve(A, rhs);
  for (std::size_t i = 0; i < n; ++i) CHECK_THAT(x[i], WithinAbs(ref[i], 1e-13));
}

TEST_CASE("pentadiagonal solver rejects indefinite matrices") {
  std::vector<double> d = {1.0, 1.0, 1.0}, o1 = {0.0, 2.0, 0.0}, o2 = {0.0, 0.0, 0.0};
  try {
    PentadiagonalSolver s(d, o1, o2);
    FAIL("expected LinearSolveFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LinearSolveFailure);
  }
}

TEST_CASE("reflected stencils have the discrete cosine eigenvalues") {
  const std::size_t n = 40;
  const double a = kPi, h = a / n;
  for (std::size_t k : {1u, 3u, 17u}) {
    std::vector<double> u(n), d2(n), d4(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = std::cos(k * kPi * (j + 0.5) * h / a);
    apply_second_difference(u, h, d2);
    apply_biharmonic(u, h, d4);
    const double mu = std::pow(2.0 / h * std::sin(k * kPi * h / (2 * a)), 2);
    for (std::size_t j = 0; j < n; ++j) {
      CHECK_THAT(d2[j], WithinAbs(-mu * u[j], 1e-9 * mu));
      CHECK_THAT(d4[j], WithinAbs(mu * mu * u[j], 1e-9 * mu * mu));
    }
  }
}

TEST_CASE("FD config validation") {
  FdConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt_min = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.max_rel_change = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  const DomainSpec small(kPi, 3.0, 32);
  CHECK_THROWS_AS(fd_advance(sample(small, [](double x) { return std::cos(x); }), small, FdConfig{}), Error);
}

TEST_CASE("zero datum stays zero") {
  const DomainSpec s(kPi, 3.0, 64);
  FdConfig c;
  c.dt = 1e-3;
  c.t_horizon = 0.05;
  const auto tr = fd_advance(sample(s, [](double) { return 0.0; }), s, c);
  CHECK(tr.outcome.kind == OutcomeKind::GlobalHorizonReached);
  for (const auto& smp : tr.samples) CHECK(smp.linf == 0.0);
}

TEST_CASE("FD mass stays at roundoff and energy decreases") {
  const auto tr = fd(0.5, 256, 1e-3, 0.5, 0);
  for (const auto& s : tr.samples) CHECK(std::abs(s.mass) <= 1e-13);
  for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].J <= tr.samples[i - 1].J + 1e-14);
}

TEST_CASE("FD agrees with the spectral solver for cos x at t = 0.1", "[slow]") {
  const auto a = spectral(1.0, 1e-3, 0.1, 100);
  const auto b = fd(1.0, 2048, 1e-5, 0.1, 10000);
  const auto rep = compare(a, b);
  REQUIRE_FALSE(rep.state_differences.empty());
  CHECK(rep.max_rel_state <= 1e-4);
  CHECK(rep.kinds_agree);
}

TEST_CASE("FD to spectral difference decreases under refinement") {
  const auto ref = spectral(0.5, 1e-3, 0.2, 200);
  const double coarse = compare(ref, fd(0.5, 128, 1e-3, 0.2, 200)).max_rel_state;
  const double fine = compare(ref, fd(0.5, 256, 5e-4, 0.2, 400)).max_rel_state;
  CHECK(fine < coarse / 3);
}

TEST_CASE("FD blow-up of 2 cos x") {
  const auto tr = fd(2.0, 256, 1e-4, 1.0, 0);
  REQUIRE(tr.outcome.kind == OutcomeKind::BlowUp);
  REQUIRE(tr.outcome.blowup_time_estimate);
  CHECK_THAT(static_cast<double>(*tr.outcome.blowup_time_estimate), WithinRel(0.1927, 0.01));
}

TEST_CASE("weak form residual of a zero trajectory vanishes") {
  const DomainSpec s(kPi, 3.0, 32);
  Trajectory tr(s);
  for (int i = 0; i <= 10; ++i) tr.checkpoints.push_back({0.1L * i, SpectralField::zero(s)});
  const auto rep = weak_form_residual(tr, 4, 3);
  for (double r : rep.residuals) CHECK(r == 0.0);
  CHECK(rep.max_reliable == 0.0);
}

TEST_CASE("weak form residual converges and flags the aliased band") {
  const auto c = weak_form_residual(spectral(0.5, 1e-2, 0.5, 1), 8, 4);
  const auto f = weak_form_residual(spectral(0.5, 5e-3, 0.5, 1), 8, 4);
  CHECK(c.quadrature == "simpson");
  CHECK(std::log2(c.max_reliable / f.max_reliable) >= 2.0);
  const auto wide = weak_form_residual(spectral(0.5, 1e-2, 0.1, 1), 50, 2);
  CHECK(wide.reliable[41]);    // k = 42 <= 2N/3
  CHECK_FALSE(wide.reliable[42]);  // k = 43
  CHECK_FALSE(wide.reliable[49]);
  CHECK(wide.residuals.size() == 100);
}

TEST_CASE("weak form needs checkpoints") {
  CHECK_THROWS_AS(weak_form_residual(spectral(0.5, 1e-2, 0.1, 0), 4, 2), Error);
}

TEST_CASE("compare identical and disjoint trajectories") {
  const auto a = spectral(0.5, 1e-2, 0.2, 5);
  const auto rep = compare(a, a);
  CHECK(rep.max_rel_state == 0.0);
  CHECK(rep.series.max_rel_J == 0.0);
  CHECK(rep.series.max_rel_I == 0.0);
  CHECK(rep.kinds_agree);

  Trajectory late = a;
  for (auto& s : late.samples) s.t += 5.0L;
  CHECK_THROWS_AS(compare(a, late), Error);
}
