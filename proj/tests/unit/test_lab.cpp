#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thinfilm/functionals.hpp"
#include "thinfilm/lab/config.hpp"
#include "thinfilm/lab/datum.hpp"
#include "thinfilm/lab/experiment.hpp"
#include "thinfilm/lab/io.hpp"
#include "thinfilm/lab/suites.hpp"

using namespace thinfilm;
using namespace thinfilm::lab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thinfilm-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ErrorCode config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidDomain;
}

}  // namespace

TEST_CASE("cosine_combo builds the stated field") {
  const DomainSpec s(kPi, 3.0, 32);
  const auto u = build_datum(CosineCombo{{{1, 2.0}}}, s);
  CHECK(u.mode_coeff(1) == 2.0);
  CHECK(u.max_abs() == 2.0);
  const auto v = build_datum(CosineCombo{{{2, 1.0}, {2, 0.5}, {5, -1.0}}}, s);
  CHECK(v.mode_coeff(2) == 1.5);
  CHECK(v.mode_coeff(5) == -1.0);
}

TEST_CASE("invalid descriptors") {
  const DomainSpec s(kPi, 3.0, 32);
  auto code = [&](const DatumDescriptor& d) {
    try {
      build_datum(d, s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidDomain;
  };
  CHECK(code(CosineCombo{}) == ErrorCode::InvalidDescriptor);
  CHECK(code(CosineCombo{{{0, 1.0}}}) == ErrorCode::InvalidDescriptor);
  CHECK(code(CosineCombo{{{32, 1.0}}}) == ErrorCode::InvalidDescriptor);
  CHECK(code(CosineCombo{{{1, 0.0}}}) == ErrorCode::InvalidDescriptor);
  CHECK(code(RandomBandlimited{0, 1.0, 1}) == ErrorCode::InvalidDescriptor);
  CHECK(code(RandomBandlimited{4, -1.0, 1}) == ErrorCode::InvalidDescriptor);
  CHECK(code(NehariScaled{CosineCombo{{{1, 1.0}}}, 0.0}) == ErrorCode::InvalidDescriptor);
}

TEST_CASE("random_bandlimited is deterministic and band limited") {
  const DomainSpec s(kPi, 3.0, 32);
  const auto a = build_datum(RandomBandlimited{6, 0.2, 42}, s);
  const auto b = build_datum(RandomBandlimited{6, 0.2, 42}, s);
  const auto c = build_datum(RandomBandlimited{6, 0.2, 43}, s);
  CHECK(a.coeffs().size() == b.coeffs().size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  CHECK(a[0] != c[0]);
  for (std::size_t k = 6; k < a.size(); ++k) CHECK(a[k] == 0.0);
  CHECK(a.max_abs() <= 0.2);
}

TEST_CASE("nehari_scaled places data relative to the manifold") {
  const DomainSpec s(kPi, 3.0, 64);
  const auto on = build_datum(NehariScaled{CosineCombo{{{1, 1.0}}}, 1.0}, s);
  CHECK_THAT(on.mode_coeff(1), WithinRel(std::sqrt(4.0 / 3.0), 1e-12));
  const auto n = compute_norms(on, s);
  CHECK_THAT(nehari_I(n), WithinAbs(0.0, 1e-10));
  const auto past = build_datum(NehariScaled{CosineCombo{{{1, 1.0}}}, 1.2}, s);
  CHECK(nehari_I(compute_norms(past, s)) < 0.0);
  const auto before = build_datum(NehariScaled{RandomBandlimited{5, 1.0, 3}, 0.8}, s);
  CHECK(nehari_I(compute_norms(before, s)) > 0.0);
}

TEST_CASE("describe is readable") {
  CHECK(describe(CosineCombo{{{1, 2.0}}}) == "cosine_combo(1:2)");
  CHECK(describe(NehariScaled{RandomBandlimited{3, 0.5, 9}, 1.2}) ==
        "nehari_scaled(random_bandlimited(max_k=3, amplitude=0.5, seed=9), multiplier=1.2)");
}

TEST_CASE("real parsing with pi") {
  CHECK_THAT(parse_real("pi"), WithinRel(kPi, 1e-15));
  CHECK_THAT(parse_real("2*pi"), WithinRel(2 * kPi, 1e-15));
  CHECK_THAT(parse_real("2pi"), WithinRel(2 * kPi, 1e-15));
  CHECK_THAT(parse_real("pi/2"), WithinRel(kPi / 2, 1e-15));
  CHECK_THAT(parse_real(" 1e-3 "), WithinRel(1e-3, 1e-15));
  CHECK_THAT(parse_real("-pi"), WithinRel(-kPi, 1e-15));
  CHECK_THROWS_AS(parse_real("pie"), Error);
  CHECK_THROWS_AS(parse_real("3x"), Error);
  CHECK_THROWS_AS(parse_real(""), Error);
}

TEST_CASE("full config round trip") {
  const auto cfg = parse_config(R"(
[domain]
a = 2*pi
p = 2.5
n_modes = 128

[datum]
family = nehari_scaled
base = random_bandlimited
max_k = 5
amplitude = 0.3
seed = 17
multiplier = 1.1

[stepper]
dt_init = 1e-4
dt_min = 1e-20
t_horizon = 3
adaptive = false
checkpoint_stride = 10

[outputs]
dir = results
plot = false

[crosscheck]
enabled = true
points = 512
dt = 1e-4

[classify]
well_depth = true
modes = 16
lambda_alpha = 0.9

[run]
suite = identities

[sweep]
multipliers = 0.5, 1.5, 2
workers = 2
)");
  CHECK(cfg.spec == DomainSpec(2 * kPi, 2.5, 128));
  const auto& n = std::get<NehariScaled>(cfg.datum);
  CHECK(n.multiplier == 1.1);
  CHECK(std::get<RandomBandlimited>(n.base).seed == 17);
  CHECK(cfg.stepper.dt_init == 1e-4);
  CHECK_FALSE(cfg.stepper.adaptive);
  CHECK(cfg.stepper.checkpoint_stride == 10);
  CHECK(cfg.outputs.dir == "results");
  CHECK_FALSE(cfg.outputs.plot);
  CHECK(cfg.outputs.csv);
  CHECK(cfg.crosscheck.enabled);
  CHECK(cfg.crosscheck.points == 512);
  CHECK(cfg.classify.modes == 16);
  CHECK(cfg.classify.lambda_alpha == 0.9);
  CHECK(cfg.suite == "identities");
  CHECK(cfg.sweep.multipliers == std::vector<double>{0.5, 1.5, 2.0});
  CHECK(cfg.sweep.workers == 2);
}

TEST_CASE("config defaults") {
  const auto cfg = parse_config("");
  CHECK(cfg.spec == DomainSpec(kPi, 3.0, 64));
  CHECK(std::get<CosineCombo>(cfg.datum).terms.size() == 1);
}

TEST_CASE("config errors") {
  CHECK(config_error("[domain]\nfoo = 1\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[nonsense]\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[domain]\np = 1\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[domain]\nn_modes = -3\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[datum]\nfamily = sine\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[datum]\nfamily = cosine_combo\nterms = 1-2\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[datum]\nfamily = cosine_combo\nterms = 1:1\nseed = 3\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[stepper]\ndt_init = 0\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[stepper]\nadaptive = maybe\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[sweep]\nworkers = 0\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[classify]\nwell_depth = false\nlambda_alpha = 1\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("stray = 1\n") == ErrorCode::ConfigInvalid);
  CHECK(config_error("[domain\n") == ErrorCode::ConfigInvalid);
  CHECK_THROWS_AS(load_config("/nonexistent/thinfilm.ini"), Error);
}

TEST_CASE("CSV layout") {
  const DomainSpec s(kPi, 3.0, 32);
  StepperConfig c;
  c.t_horizon = 0.1;
  const auto tr = advance(SpectralField::mode(s, 1, 0.5), s, c);
  std::ostringstream os;
  write_csv(os, tr);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,dt,mass,l2sq,lp1,linf,h2sq,J,I,ut_l2sq,M,energy_residual");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 11);
  }
  CHECK(rows == tr.samples.size());
  // First row: t = 0 and J(0.5 cos x) printed with 17 digits.
  CHECK(os.str().find("\n0,0,") != std::string::npos);

  Trajectory bad = tr;
  bad.samples[1].J += 1.0;
  std::ostringstream sink;
  try {
    write_csv(sink, bad);
    FAIL("expected InvariantViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvariantViolation);
  }
}

TEST_CASE("blow-up experiment writes a complete, reproducible record") {
  const auto dir = scratch_dir("blowup");
  ExperimentConfig cfg;
  cfg.datum = CosineCombo{{{1, 2.0}}};
  cfg.stepper.dt_min = 1e-24;
  cfg.classify.modes = 16;
  cfg.outputs.dir = dir / "a";
  const auto r = run_experiment(cfg);
  CHECK(r.trajectory.outcome.kind == OutcomeKind::BlowUp);
  REQUIRE(r.trajectory.s_minus_entry);
  CHECK(*r.trajectory.s_minus_entry == 0.0L);
  REQUIRE(r.classification);
  CHECK(r.classification->branch == ClassificationBranch::LowEnergyBlowUp);

  const std::string json = slurp(dir / "a" / "summary.json");
  CHECK(json.find("\"schema\": 1") != std::string::npos);
  CHECK(json.find("\"kind\": \"BlowUp\"") != std::string::npos);
  CHECK(json.find("\"s_minus_entry\": 0.0") != std::string::npos);
  CHECK(json.find("\"monotonicity\"") != std::string::npos);
  CHECK(json.find("\"concavity\"") != std::string::npos);
  CHECK(fs::exists(dir / "a" / "timeseries.csv"));
  CHECK(slurp(dir / "a" / "plot.py").find("timeseries.csv") != std::string::npos);

  cfg.outputs.dir = dir / "b";
  run_experiment(cfg);
  CHECK(slurp(dir / "a" / "timeseries.csv") == slurp(dir / "b" / "timeseries.csv"));
  CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("decaying experiment stays in I >= 0 through t = 10") {
  ExperimentConfig cfg;
  cfg.classify.well_depth = false;
  const auto r = compute_experiment(cfg);
  CHECK(r.trajectory.outcome.kind == OutcomeKind::GlobalHorizonReached);
  for (const auto& s : r.trajectory.samples) CHECK(s.I >= 0.0);
  CHECK_FALSE(r.classification);
}

TEST_CASE("experiment with crosscheck") {
  ExperimentConfig cfg;
  cfg.classify.well_depth = false;
  cfg.stepper.t_horizon = 0.2;
  cfg.crosscheck = {true, 256, 1e-3};
  const auto r = compute_experiment(cfg);
  REQUIRE(r.crosscheck);
  CHECK(r.crosscheck->kinds_agree);
  CHECK(r.crosscheck->max_rel_state < 1e-2);
}

TEST_CASE("sweep writes one directory per multiplier") {
  const auto dir = scratch_dir("sweep");
  ExperimentConfig cfg;
  cfg.classify.well_depth = false;
  cfg.stepper.t_horizon = 2.0;
  cfg.stepper.dt_min = 1e-24;
  cfg.datum = CosineCombo{{{1, 1.0}}};
  cfg.outputs.dir = dir;
  cfg.sweep = {{0.8, 1.3}, 2};
  const auto runs = run_sweep(cfg);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].report.trajectory.outcome.kind == OutcomeKind::GlobalHorizonReached);
  CHECK(runs[1].report.trajectory.outcome.kind == OutcomeKind::BlowUp);
  CHECK(fs::exists(dir / "run_000" / "summary.json"));
  CHECK(fs::exists(dir / "run_001" / "summary.json"));
  CHECK(fs::exists(dir / "sweep.csv"));
  fs::remove_all(dir);
}

TEST_CASE("suite names") {
  CHECK(suite_names().size() == 4);
  try {
    run_suite("bogus");
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
  }
}

TEST_CASE("welldepth suite") {
  const auto r = run_suite("welldepth", {scratch_dir("suite")});
  REQUIRE(r.size() == 1);
  CHECK(r[0].id == 9);
  CHECK(r[0].passed);
  CHECK(format_table(r).rfind("PASS", 0) == 0);
}

TEST_CASE("battery composition") {
  const auto b = blowup_battery();
  const auto g = global_battery();
  CHECK(b.size() >= 6);
  CHECK(g.size() >= 6);
  bool p2 = false, p3 = false, a1 = false, a2 = false;
  for (const auto& c : b) {
    p2 = p2 || c.spec.p() == 2.0;
    p3 = p3 || c.spec.p() == 3.0;
    a1 = a1 || c.spec.a() == kPi;
    a2 = a2 || c.spec.a() == 2 * kPi;
    CHECK(nehari_I(compute_norms(build_datum(c.datum, c.spec), c.spec)) < 0.0);
  }
  CHECK((p2 && p3 && a1 && a2));
  for (const auto& c : g) CHECK(nehari_I(compute_norms(build_datum(c.datum, c.spec), c.spec)) > 0.0);
}
