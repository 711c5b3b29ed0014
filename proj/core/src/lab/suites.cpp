#include "thinfilm/lab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "thinfilm/lab/io.hpp"

namespace thinfilm::lab {
namespace {

constexpr double kHorizon = 10.0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double value, double exact) { return std::abs(value - exact) / std::abs(exact); }

struct BatteryRun {
  BatteryCase c;
  ExperimentConfig cfg;
  RunReport report;
  double seconds = 0.0;
};

ExperimentConfig battery_config(const BatteryCase& c, const StepperConfig& stepper) {
  ExperimentConfig cfg;
  cfg.spec = c.spec;
  cfg.datum = c.datum;
  cfg.stepper = stepper;
  cfg.classify.well_depth = false;
  return cfg;
}

/// 0.5 cos x on (0, pi), p = 3, fixed step, a checkpoint at every step.
Trajectory smooth_run(double dt, double horizon, std::size_t checkpoint_stride) {
  const DomainSpec spec(kPi, 3.0, 64);
  StepperConfig st;
  st.adaptive = false;
  st.dt_init = dt;
  st.dt_max = dt;
  st.t_horizon = horizon;
  st.checkpoint_stride = checkpoint_stride;
  return advance(SpectralField::mode(spec, 1, 0.5), spec, st);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_rel(const std::vector<IdentityResidual>& v) {
  double m = 0.0;
  for (const auto& r : v) m = std::max(m, std::abs(r.relative));
  return m;
}

}  // namespace

std::vector<BatteryCase> blowup_battery() {
  const double pi = kPi;
  return {
      {"pi_p3_2cos1", DomainSpec(pi, 3.0, 64), CosineCombo{{{1, 2.0}}}},
      {"pi_p3_mix12", DomainSpec(pi, 3.0, 64), CosineCombo{{{1, 1.5}, {2, 0.4}}}},
      {"pi_p2_2cos1", DomainSpec(pi, 2.0, 64), CosineCombo{{{1, 2.0}}}},
      {"2pi_p3_mix21", DomainSpec(2 * pi, 3.0, 64), CosineCombo{{{2, 2.0}, {1, 0.3}}}},
      {"2pi_p3_cos1", DomainSpec(2 * pi, 3.0, 64), CosineCombo{{{1, 0.6}}}},
      {"2pi_p2_nehari1.3", DomainSpec(2 * pi, 2.0, 64), NehariScaled{CosineCombo{{{1, 1.0}, {2, 0.5}}}, 1.3}},
      {"pi_p3_random_nehari1.25", DomainSpec(pi, 3.0, 64), NehariScaled{RandomBandlimited{6, 1.0, 7}, 1.25}},
  };
}

std::vector<BatteryCase> global_battery() {
  const double pi = kPi;
  return {
      {"pi_p3_0.5cos1", DomainSpec(pi, 3.0, 64), CosineCombo{{{1, 0.5}}}},
      {"pi_p3_mix12_small", DomainSpec(pi, 3.0, 64), CosineCombo{{{1, 0.3}, {2, 0.2}}}},
      {"pi_p2_0.4cos1", DomainSpec(pi, 2.0, 64), CosineCombo{{{1, 0.4}}}},
      {"2pi_p3_nehari0.7", DomainSpec(2 * pi, 3.0, 64), NehariScaled{CosineCombo{{{1, 1.0}}}, 0.7}},
      {"pi_p3_random_small", DomainSpec(pi, 3.0, 64), RandomBandlimited{8, 0.1, 11}},
      {"2pi_p2_nehari0.3", DomainSpec(2 * pi, 2.0, 64), NehariScaled{CosineCombo{{{1, 1.0}}}, 0.3}},
  };
}

StepperConfig battery_stepper() {
  StepperConfig st;
  st.t_horizon = kHorizon;
  st.dt_min = 1e-24;
  st.u_max = 1e8;
  return st;
}

struct AcceptanceBattery::State {
  SuiteOptions options;
  std::optional<Trajectory> smooth_coarse, smooth_fine;
  std::optional<Trajectory> cross_spectral, cross_fd, cross_spectral_blowup, cross_fd_blowup;
  std::optional<std::vector<BatteryRun>> blowups, globals;
  double blowup_seconds = 0.0;

  void ensure_smooth() {
    // Step counts divisible by 2 (n_time + 1) so time hats align with
    // checkpoints and the weak form uses Simpson's rule.
    if (!smooth_coarse) smooth_coarse = smooth_run(1.0 / 900.0, 1.0, 1);
    if (!smooth_fine) smooth_fine = smooth_run(1.0 / 1800.0, 1.0, 1);
  }

  std::vector<BatteryRun> run_battery(const std::vector<BatteryCase>& cases, double& total) {
    std::vector<BatteryRun> out;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& c : cases) {
      const auto s0 = std::chrono::steady_clock::now();
      ExperimentConfig cfg = battery_config(c, battery_stepper());
      RunReport r = compute_experiment(cfg);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
      out.push_back(BatteryRun{c, std::move(cfg), std::move(r), secs});
    }
    total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  void ensure_batteries() {
    double unused = 0.0;
    if (!blowups) blowups = run_battery(blowup_battery(), blowup_seconds);
    if (!globals) globals = run_battery(global_battery(), unused);
  }

  void ensure_cross() {
    if (!cross_spectral) cross_spectral = smooth_run(1e-3, 1.0, 50);
    const DomainSpec fd_spec(kPi, 3.0, 2048);
    if (!cross_fd) {
      oracle::FdConfig fc;
      fc.dt = 1e-4;
      fc.t_horizon = 1.0;
      fc.checkpoint_stride = 500;
      cross_fd = oracle::fd_advance(sample(fd_spec, [](double x) { return 0.5 * std::cos(x); }), fd_spec, fc);
    }
    if (!cross_spectral_blowup && !blowups) {
      const BatteryCase c = blowup_battery().front();
      cross_spectral_blowup = advance(build_datum(c.datum, c.spec), c.spec, battery_stepper());
    }
    if (!cross_fd_blowup) {
      oracle::FdConfig fc;
      fc.dt = 1e-5;
      fc.t_horizon = kHorizon;
      fc.u_max = 1e8;
      cross_fd_blowup = oracle::fd_advance(sample(fd_spec, [](double x) { return 2.0 * std::cos(x); }), fd_spec, fc);
    }
  }

  void archive_failure(const BatteryRun& run, const std::string& why) {
    ExperimentConfig cfg = run.cfg;
    cfg.outputs.dir = options.archive_dir / "failures" / run.c.name;
    RunReport r = run.report;
    write_artifacts(r, cfg);
    write_text_file(cfg.outputs.dir / "reason.txt", why + "\n");
  }

  std::vector<std::pair<std::string, const Trajectory*>> computed() const {
    std::vector<std::pair<std::string, const Trajectory*>> v;
    auto add = [&](const std::string& name, const std::optional<Trajectory>& t) {
      if (t) v.emplace_back(name, &*t);
    };
    add("smooth_dt1/900", smooth_coarse);
    add("smooth_dt1/1800", smooth_fine);
    add("cross_spectral", cross_spectral);
    add("cross_fd", cross_fd);
    add("cross_spectral_blowup", cross_spectral_blowup);
    add("cross_fd_blowup", cross_fd_blowup);
    for (const auto* b : {&blowups, &globals})
      if (*b)
        for (const auto& r : **b) v.emplace_back(r.c.name, &r.report.trajectory);
    return v;
  }
};

AcceptanceBattery::AcceptanceBattery(SuiteOptions options) : s_(std::make_unique<State>()) {
  s_->options = std::move(options);
}

AcceptanceBattery::~AcceptanceBattery() = default;

CriterionResult AcceptanceBattery::mass_conservation() {
  CriterionResult r{1, "mass conservation", true, {}};
  const auto runs = s_->computed();
  if (runs.empty()) {
    r.passed = false;
    r.detail = "no runs computed";
    return r;
  }
  double worst = 0.0;
  std::string worst_run;
  std::size_t samples = 0;
  for (const auto& [name, tr] : runs)
    for (const auto& s : tr->samples) {
      ++samples;
      const double ratio = std::abs(s.mass) / std::max(1.0, s.linf);
      if (ratio > worst) {
        worst = ratio;
        worst_run = name;
      }
    }
  r.passed = worst <= 1e-12;
  r.detail = fmt("%zu runs, %zu samples; max |mass|/max(1,|u|_inf) = %.3g (%s), limit 1e-12", runs.size(), samples,
                 worst, worst_run.empty() ? "-" : worst_run.c_str());
  return r;
}

CriterionResult AcceptanceBattery::energy_identity() {
  s_->ensure_smooth();
  const double J0 = s_->smooth_coarse->samples.front().J;
  const double coarse = max_abs(energy_identity_residual(*s_->smooth_coarse));
  const double fine = max_abs(energy_identity_residual(*s_->smooth_fine));
  const double limit = 1e-6 * (1.0 + std::abs(J0));
  const double factor = coarse / fine;
  CriterionResult r{2, "energy identity", coarse <= limit && fine <= limit && factor >= 3.0, {}};
  r.detail = fmt("residual %.3g (dt=1/900), %.3g (dt=1/1800), limit %.3g, reduction x%.2f (need >= 3)", coarse,
                 fine, limit, factor);
  return r;
}

CriterionResult AcceptanceBattery::l2_identity() {
  s_->ensure_smooth();
  const double coarse = max_rel(l2_identity_residual(*s_->smooth_coarse));
  const double fine = max_rel(l2_identity_residual(*s_->smooth_fine));
  const double m_coarse = max_rel(m_second_difference_residual(*s_->smooth_coarse));
  const double m_fine = max_rel(m_second_difference_residual(*s_->smooth_fine));
  bool exact = true;
  for (const auto* tr : {&*s_->smooth_coarse, &*s_->smooth_fine})
    for (const auto& s : tr->samples) exact = exact && s.Mpp == -s.I;
  const double factor = coarse / fine;
  CriterionResult r{3, "L2 identity", coarse <= 1e-4 && fine <= 1e-4 && factor >= 3.0 && m_coarse <= 1e-4 &&
                                          m_fine <= 1e-4 && exact,
                    {}};
  r.detail = fmt("d|u|^2/dt vs -2I: %.3g, %.3g (reduction x%.2f); M'' differences vs -I: %.3g, %.3g; "
                 "stored M'' == -I: %s",
                 coarse, fine, factor, m_coarse, m_fine, exact ? "yes" : "no");
  return r;
}

CriterionResult AcceptanceBattery::closed_forms() {
  const DomainSpec spec(kPi, 3.0, 64);
  const SpectralField u = SpectralField::mode(spec, 1, 1.0);
  const FieldNorms n = compute_norms(u, spec);
  const double pi = kPi;
  const double J = energy_J(n, 3.0);
  const double I = nehari_I(n);
  const double ls = lambda_star(u, spec);
  const double Jn = energy_J(compute_norms(project_to_nehari(u, spec), spec), 3.0);
  const double errs[] = {rel(n.h2sq, pi / 2), rel(n.lp1, 3 * pi / 8), rel(J, 5 * pi / 32), rel(I, pi / 8),
                         rel(ls, std::sqrt(4.0 / 3.0)), rel(Jn, pi / 6)};
  const double worst = *std::max_element(std::begin(errs), std::end(errs));
  CriterionResult r{4, "closed-form functionals of cos x", worst <= 1e-10, {}};
  r.detail = fmt("rel errors |u_xx|^2 %.1e, |u|_4^4 %.1e, J %.1e, I %.1e, lambda* %.1e, J(lambda* u) %.1e", errs[0],
                 errs[1], errs[2], errs[3], errs[4], errs[5]);
  return r;
}

CriterionResult AcceptanceBattery::sufficiency() {
  s_->ensure_batteries();
  CriterionResult r{5, "blow-up of data with I(u0) < 0", true, {}};
  std::ostringstream os;
  std::size_t ok = 0;
  for (const auto& run : *s_->blowups) {
    const auto& tr = run.report.trajectory;
    const bool negative = tr.samples.front().I < 0.0;
    const bool blew = tr.outcome.kind == OutcomeKind::BlowUp && tr.outcome.t_end < kHorizon &&
                      tr.outcome.trigger == BlowUpTrigger::Amplitude && tr.samples.back().linf >= 1e8;
    if (negative && blew) {
      ++ok;
    } else {
      r.passed = false;
      os << " FAIL " << run.c.name << " (I0=" << tr.samples.front().I << ", " << to_string(tr.outcome.kind) << ", "
         << to_string(tr.outcome.trigger) << ");";
    }
  }
  const bool fast = s_->blowup_seconds < 60.0;
  r.passed = r.passed && fast && s_->blowups->size() >= 6;
  r.detail = fmt("%zu/%zu reached |u|_inf >= 1e8 before t=10 in %.2f s total", ok, s_->blowups->size(),
                 s_->blowup_seconds) +
             os.str();
  return r;
}

CriterionResult AcceptanceBattery::necessity_bound() {
  s_->ensure_batteries();
  CriterionResult r{6, "H2 bound along I >= 0 trajectories", true, {}};
  std::ostringstream os;
  double worst = 0.0;
  for (const auto& run : *s_->globals) {
    const auto& tr = run.report.trajectory;
    const double p = tr.spec.p();
    const double bound = 2.0 * (p + 1.0) / (p - 1.0) * tr.samples.front().J;
    bool nonneg = tr.outcome.kind == OutcomeKind::GlobalHorizonReached;
    for (const auto& s : tr.samples) {
      nonneg = nonneg && s.I >= 0.0;
      worst = std::max(worst, s.h2sq / bound);
    }
    const auto violations = necessity_bound_violations(tr);
    if (!nonneg || !violations.empty()) {
      r.passed = false;
      os << " FAIL " << run.c.name << " (" << violations.size() << " bound violations"
         << (nonneg ? "" : ", I < 0 or horizon not reached") << ");";
    }
  }
  r.passed = r.passed && s_->globals->size() >= 6;
  r.detail = fmt("%zu runs to t=10, max |u_xx|^2 / (2(p+1)/(p-1) J0) = %.4f", s_->globals->size(), worst) + os.str();
  return r;
}

CriterionResult AcceptanceBattery::s_minus_consistency() {
  s_->ensure_batteries();
  CriterionResult r{7, "S- first crossing consistency", true, {}};
  std::ostringstream os;
  std::size_t blow = 0, global = 0;
  for (const auto* battery : {&*s_->blowups, &*s_->globals})
    for (const auto& run : *battery) {
      const auto& tr = run.report.trajectory;
      std::string why;
      if (tr.outcome.kind == OutcomeKind::BlowUp) {
        ++blow;
        if (!tr.s_minus_entry) why = "blow-up without any sample with I < 0";
        else if (*tr.s_minus_entry > tr.outcome.t_end) why = "S- entry after termination";
      } else if (tr.outcome.kind == OutcomeKind::GlobalHorizonReached) {
        ++global;
        for (const auto& s : tr.samples)
          if (s.I < 0.0) {
            why = fmt("horizon reached but I = %.3g < 0 at t = %.6g", s.I, static_cast<double>(s.t));
            break;
          }
      } else {
        why = "inconclusive run: " + tr.outcome.evidence;
      }
      if (!why.empty()) {
        r.passed = false;
        s_->archive_failure(run, why);
        os << " COUNTEREXAMPLE " << run.c.name << ": " << why << " (artifacts in "
           << (s_->options.archive_dir / "failures" / run.c.name).string() << ");";
      }
    }
  r.detail = fmt("%zu blow-up runs entered S- before termination, %zu global runs kept I >= 0", blow, global) +
             os.str();
  return r;
}

CriterionResult AcceptanceBattery::cross_solver() {
  s_->ensure_cross();
  const auto smooth = oracle::compare(*s_->cross_spectral, *s_->cross_fd);
  const auto& spectral_blowup =
      s_->cross_spectral_blowup ? *s_->cross_spectral_blowup : s_->blowups->front().report.trajectory;
  const auto blow = oracle::compare(spectral_blowup, *s_->cross_fd_blowup);
  const bool smooth_ok = smooth.max_rel_state <= 1e-3 && !smooth.state_differences.empty();
  const bool blow_ok = blow.kinds_agree && blow.kind_a == OutcomeKind::BlowUp && blow.blowup_time_rel_diff &&
                       *blow.blowup_time_rel_diff <= 0.1;
  CriterionResult r{8, "spectral vs finite-difference agreement", smooth_ok && blow_ok, {}};
  r.detail = fmt("0.5cos x to t=1: max rel L2 state diff %.3g over %zu checkpoints (limit 1e-3), max rel J diff "
                 "%.3g; 2cos x: kinds %s/%s, T %.10g vs %.10g, rel diff %.3g (limit 0.1)",
                 smooth.max_rel_state, smooth.state_differences.size(), smooth.series.max_rel_J,
                 std::string(to_string(blow.kind_a)).c_str(), std::string(to_string(blow.kind_b)).c_str(),
                 static_cast<double>(spectral_blowup.outcome.blowup_time_estimate.value_or(-1)),
                 static_cast<double>(s_->cross_fd_blowup->outcome.blowup_time_estimate.value_or(-1)),
                 blow.blowup_time_rel_diff.value_or(INFINITY));
  return r;
}

CriterionResult AcceptanceBattery::well_depth() {
  const auto d32 = estimate_well_depth(DomainSpec(kPi, 3.0, 32));
  const DomainSpec spec64(kPi, 3.0, 64);
  const auto d64 = estimate_well_depth(spec64);
  const FieldNorms n = compute_norms(d64.minimizer, spec64);
  const double i_rel = std::abs(nehari_I(n)) / n.h2sq;
  const double stability = std::abs(d32.d_hat - d64.d_hat) / d64.d_hat;
  const bool ok = d64.d_hat > 0.0 && d32.d_hat > 0.0 && d64.d_hat <= kPi / 6 + 1e-6 && d32.d_hat <= kPi / 6 + 1e-6 &&
                  stability <= 0.01 && i_rel <= 1e-8;
  CriterionResult r{9, "potential-well depth estimate", ok, {}};
  r.detail = fmt("d_hat = %.12g (N=64, %s), %.12g (N=32); pi/6 = %.12g; N-stability %.2e; minimizer |I|/|u_xx|^2 = "
                 "%.2e",
                 d64.d_hat, d64.converged ? "converged" : "not converged", d32.d_hat, kPi / 6, stability, i_rel);
  return r;
}

CriterionResult AcceptanceBattery::weak_form() {
  s_->ensure_smooth();
  const auto coarse = oracle::weak_form_residual(*s_->smooth_coarse, 8, 8);
  const auto fine = oracle::weak_form_residual(*s_->smooth_fine, 8, 8);
  const bool reliable = std::all_of(coarse.reliable.begin(), coarse.reliable.end(), [](bool b) { return b; });
  const double order = std::log2(coarse.max_reliable / fine.max_reliable);
  CriterionResult r{10, "weak-form residual convergence", reliable && order >= 2.0, {}};
  r.detail = fmt("8x8 test functions, max residual %.3g (dt=1/900) -> %.3g (dt=1/1800), observed order %.2f "
                 "(need >= 2), quadrature %s",
                 coarse.max_reliable, fine.max_reliable, order, fine.quadrature.c_str());
  return r;
}

CriterionResult AcceptanceBattery::monotonicity() {
  s_->ensure_batteries();
  std::vector<std::pair<std::string, const MonotonicityReport*>> runs;
  std::size_t inc = 0, dec = 0, flat = 0, viol = 0;
  std::size_t inc_b = 0, dec_b = 0, inc_g = 0, dec_g = 0;
  for (const auto* battery : {&*s_->blowups, &*s_->globals})
    for (const auto& run : *battery) {
      const auto& m = run.report.monotonicity;
      runs.emplace_back(run.c.name, &m);
      inc += m.lp1_increasing;
      dec += m.lp1_decreasing;
      flat += m.lp1_flat;
      viol += m.violations.size();
      (battery == &*s_->blowups ? inc_b : inc_g) += m.lp1_increasing;
      (battery == &*s_->blowups ? dec_b : dec_g) += m.lp1_decreasing;
    }
  CriterionResult r{11, "monotonicity evidence archived", false, {}};
  const auto path = s_->options.archive_dir / "monotonicity.json";
  try {
    std::filesystem::create_directories(s_->options.archive_dir);
    write_text_file(path, monotonicity_json(runs));
    r.passed = !runs.empty();
  } catch (const Error& e) {
    r.detail = std::string("archive failed: ") + e.what() + "; ";
  }
  r.detail += fmt("%zu runs -> %s; d|u|_{p+1}^{p+1}/dt intervals: %zu increasing, %zu decreasing, %zu flat "
                  "(blow-up runs %zu/%zu, global runs %zu/%zu inc/dec); dissipation-bound violations %zu",
                  runs.size(), path.string().c_str(), inc, dec, flat, inc_b, dec_b, inc_g, dec_g, viol);
  return r;
}

std::vector<CriterionResult> AcceptanceBattery::all() {
  std::vector<CriterionResult> out;
  out.push_back(energy_identity());
  out.push_back(l2_identity());
  out.push_back(closed_forms());
  out.push_back(sufficiency());
  out.push_back(necessity_bound());
  out.push_back(s_minus_consistency());
  out.push_back(cross_solver());
  out.push_back(well_depth());
  out.push_back(weak_form());
  out.push_back(monotonicity());
  out.push_back(mass_conservation());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<std::string_view> suite_names() { return {"identities", "criterion", "crosscheck", "welldepth"}; }

std::vector<CriterionResult> run_suite(std::string_view name, const SuiteOptions& options) {
  AcceptanceBattery b(options);
  std::vector<CriterionResult> out;
  if (name == "identities") {
    out = {b.energy_identity(), b.l2_identity(), b.closed_forms()};
  } else if (name == "criterion") {
    out = {b.sufficiency(), b.necessity_bound(), b.s_minus_consistency(), b.monotonicity()};
  } else if (name == "crosscheck") {
    out = {b.cross_solver(), b.weak_form()};
  } else if (name == "welldepth") {
    return {b.well_depth()};
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown suite '" + std::string(name) +
                                              "' (expected identities, criterion, crosscheck or welldepth)");
  }
  out.push_back(b.mass_conservation());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::string format_table(const std::vector<CriterionResult>& results) {
  std::ostringstream os;
  for (const auto& r : results)
    os << (r.passed ? "PASS" : "FAIL") << "  criterion " << (r.id < 10 ? " " : "") << r.id << "  " << r.title
       << ": " << r.detail << '\n';
  return os.str();
}

}  // namespace thinfilm::lab
