#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "thinfilm/detail/cosine_transform.hpp"
#include "thinfilm/integrator.hpp"
#include "thinfilm/oracle.hpp"
#include "thinfilm/spectral.hpp"

using namespace thinfilm;

namespace {

std::vector<double> smooth_coeffs(std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = std::exp(-0.2 * static_cast<double>(k));
  return c;
}

void BM_Synthesize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto& t = detail::CosineTransform::get(n);
  const auto c = smooth_coeffs(n - 1);
  std::vector<double> g(n), scratch(n);
  for (auto _ : state) {
    t.synthesize(c, g, scratch);
    benchmark::DoNotOptimize(g.data());
  }
}
BENCHMARK(BM_Synthesize)->RangeMultiplier(4)->Range(64, 4096);

void BM_Source(benchmark::State& state) {
  const DomainSpec spec(kPi, 3.0, static_cast<std::size_t>(state.range(0)));
  SpectralWorkspace ws(spec);
  const auto c = smooth_coeffs(spec.n_coeffs());
  std::vector<double> out(spec.n_coeffs());
  for (auto _ : state) {
    ws.source(c, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_Source)->RangeMultiplier(4)->Range(64, 1024);

void BM_EtdStep(benchmark::State& state) {
  const DomainSpec spec(kPi, 3.0, static_cast<std::size_t>(state.range(0)));
  EtdStepper stepper(spec);
  std::vector<double> u(spec.n_coeffs(), 0.0), out(spec.n_coeffs());
  u[0] = 0.5;
  for (auto _ : state) {
    stepper.step(u, 1e-3, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_EtdStep)->RangeMultiplier(4)->Range(64, 1024);

void BM_AdvanceBlowup(benchmark::State& state) {
  const DomainSpec spec(kPi, 3.0, 64);
  StepperConfig cfg;
  cfg.dt_min = 1e-24;
  const auto u0 = SpectralField::mode(spec, 1, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(advance(u0, spec, cfg).accepted_steps);
}
BENCHMARK(BM_AdvanceBlowup)->Unit(benchmark::kMillisecond);

void BM_PentadiagonalSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> d(n, 7.0), o1(n, -4.0), o2(n, 1.0), rhs(n, 1.0), x(n);
  const oracle::PentadiagonalSolver solver(d, o1, o2);
  for (auto _ : state) {
    solver.solve(rhs, x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_PentadiagonalSolve)->RangeMultiplier(4)->Range(256, 4096);

}  // namespace
BENCHMARK_MAIN();
