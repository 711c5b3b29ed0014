#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thinfilm/lab/config.hpp"
#include "thinfilm/lab/datum.hpp"
#include "thinfilm/lab/experiment.hpp"
#include "thinfilm/lab/suites.hpp"
#include "thinfilm/nehari.hpp"

namespace {

using namespace thinfilm;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kRuntime = 3 };

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidDescriptor:
    case ErrorCode::InvalidDomain:
    case ErrorCode::AlphaBelowDepth:
    case ErrorCode::EpsilonOutOfRange:
    case ErrorCode::ZeroDatum:
      return kUsage;
    default:
      return kRuntime;
  }
}

void print_outcome(const lab::RunReport& r) {
  const auto& o = r.trajectory.outcome;
  std::printf("datum      %s\n", r.datum.c_str());
  std::printf("outcome    %s at t = %.17Lg\n", std::string(to_string(o.kind)).c_str(), o.t_end);
  if (o.blowup_time_estimate) std::printf("T estimate %.17Lg\n", *o.blowup_time_estimate);
  if (r.trajectory.s_minus_entry) std::printf("S- entry   %.17Lg\n", *r.trajectory.s_minus_entry);
  std::printf("steps      %zu accepted, %zu rejected\n", r.trajectory.accepted_steps, r.trajectory.rejected_steps);
  std::printf("evidence   %s\n", o.evidence.c_str());
  if (r.classification)
    std::printf("class      %s (predicted %s, I0 = %.6g, J0 = %.6g, d_hat = %.6g)\n",
                std::string(to_string(r.classification->branch)).c_str(),
                std::string(to_string(r.classification->predicted)).c_str(), r.classification->I0,
                r.classification->J0, r.classification->d_hat);
  if (r.crosscheck)
    std::printf("crosscheck kinds agree: %s, max rel state diff %.3g\n", r.crosscheck->kinds_agree ? "yes" : "no",
                r.crosscheck->max_rel_state);
}

double real_option(const std::string& s) { return lab::parse_real(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification lab for a nonlocal fourth-order parabolic equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run one experiment from a config file");
  simulate->add_option("config", config_path, "Config file")->required();
  simulate->add_option("--out", out_dir, "Override the output directory");

  auto* classify = app.add_subcommand("classify", "Classify the initial datum of a config");
  classify->add_option("config", config_path, "Config file")->required();

  std::string a_text = "pi", p_text = "3";
  std::size_t modes = 32;
  auto* welldepth = app.add_subcommand("welldepth", "Estimate the potential-well depth d");
  welldepth->add_option("--a", a_text, "Interval length (accepts pi multiples)")->required();
  welldepth->add_option("--p", p_text, "Exponent p > 1")->required();
  welldepth->add_option("--modes", modes, "Number of cosine modes")->capture_default_str();

  std::string alpha_text;
  auto* lambda = app.add_subcommand("lambda-alpha", "Lower bound for Lambda_alpha");
  lambda->add_option("--alpha", alpha_text, "Energy level alpha > d")->required();
  lambda->add_option("--a", a_text, "Interval length")->capture_default_str();
  lambda->add_option("--p", p_text, "Exponent p > 1")->capture_default_str();
  lambda->add_option("--modes", modes, "Number of cosine modes")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Run a Nehari-multiplier sweep from a config file");
  sweep->add_option("config", config_path, "Config file")->required();

  std::string suite;
  std::string archive = "thinfilm-verify";
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "identities | criterion | crosscheck | welldepth | all")->required();
  verify->add_option("--archive", archive, "Directory for archived reports")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) {
      auto cfg = lab::load_config(config_path);
      if (!out_dir.empty()) cfg.outputs.dir = out_dir;
      const auto r = lab::run_experiment(cfg);
      print_outcome(r);
      std::printf("artifacts  %s\n", cfg.outputs.dir.string().c_str());
    } else if (*classify) {
      const auto cfg = lab::load_config(config_path);
      const SpectralField u0 = lab::build_datum(cfg.datum, cfg.spec);
      const auto ctx = lab::prepare_classification(cfg);
      const auto c = classify_initial_datum(u0, cfg.spec, ctx.d_hat, ctx.lambda_alpha_hat);
      std::printf("datum     %s\nJ0        %.17g\nI0        %.17g\n|u0|^2    %.17g\nd_hat     %.17g%s\n",
                  lab::describe(cfg.datum).c_str(), c.J0, c.I0, c.l2sq0, c.d_hat,
                  ctx.depth_converged ? "" : " (optimizer did not converge)");
      if (c.lambda_alpha_hat) std::printf("Lambda_a  %.17g (lower bound)\n", *c.lambda_alpha_hat);
      std::printf("branch    %s\npredicted %s\nnote      %s\n", std::string(to_string(c.branch)).c_str(),
                  std::string(to_string(c.predicted)).c_str(), c.note.c_str());
    } else if (*welldepth) {
      const DomainSpec spec(real_option(a_text), real_option(p_text), modes);
      const auto d = estimate_well_depth(spec);
      std::printf("d_hat      %.17g\nconverged  %s\niterations %zu\ngrad_norm  %.3g\nstarts     %zu\n", d.d_hat,
                  d.converged ? "yes" : "no", d.iterations, d.grad_norm, d.multistart_count);
    } else if (*lambda) {
      const DomainSpec spec(real_option(a_text), real_option(p_text), modes);
      const auto l = estimate_lambda_alpha(real_option(alpha_text), spec);
      std::printf("alpha      %.17g\nradius     %.17g\nlambda_hat %.17g (lower bound)\nconverged  %s\n", l.alpha,
                  l.radius, l.value, l.converged ? "yes" : "no");
    } else if (*sweep) {
      const auto cfg = lab::load_config(config_path);
      const auto runs = lab::run_sweep(cfg);
      for (const auto& e : runs)
        std::printf("%-10.6g %-22s %s\n", e.multiplier, std::string(to_string(e.report.trajectory.outcome.kind)).c_str(),
                    e.dir.string().c_str());
    } else if (*verify) {
      lab::SuiteOptions opts;
      opts.archive_dir = archive;
      std::vector<lab::CriterionResult> results;
      if (suite == "all") {
        lab::AcceptanceBattery battery(opts);
        results = battery.all();
      } else {
        results = lab::run_suite(suite, opts);
      }
      std::cout << lab::format_table(results);
      for (const auto& r : results)
        if (!r.passed) return kVerifyFailed;
    }
  } catch (const Error& e) {
    std::cerr << "thinfilm: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "thinfilm: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
