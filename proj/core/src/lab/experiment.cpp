#include "thinfilm/lab/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "thinfilm/lab/io.hpp"

namespace thinfilm::lab {
namespace {

BaseDatum base_of(const DatumDescriptor& d) {
  if (const auto* n = std::get_if<NehariScaled>(&d)) return n->base;
  if (const auto* c = std::get_if<CosineCombo>(&d)) return *c;
  return std::get<RandomBandlimited>(d);
}

std::string fmt17(std::optional<Time> v) {
  if (!v) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(*v));
  return buf;
}

std::size_t ceil_div(double x, double y) { return static_cast<std::size_t>(std::ceil(x / y)); }

}  // namespace

ClassifyContext prepare_classification(const ExperimentConfig& cfg) {
  ClassifyContext ctx;
  const DomainSpec depth_spec = cfg.spec.with_modes(cfg.classify.modes);
  const WellDepthEstimate depth = estimate_well_depth(depth_spec);
  ctx.d_hat = depth.d_hat;
  ctx.depth_converged = depth.converged;
  if (cfg.classify.lambda_alpha) {
    ctx.alpha = *cfg.classify.lambda_alpha;
    ctx.lambda_alpha_hat = estimate_lambda_alpha(*ctx.alpha, depth_spec, OptimizerConfig{}, depth).value;
  }
  return ctx;
}

RunReport compute_experiment(const ExperimentConfig& cfg, const std::optional<ClassifyContext>& context) {
  const SpectralField u0 = build_datum(cfg.datum, cfg.spec);
  StepperConfig stepper = cfg.stepper;
  if (cfg.crosscheck.enabled && stepper.checkpoint_stride == 0)
    stepper.checkpoint_stride = stepper.adaptive ? 1 : std::max<std::size_t>(1, ceil_div(stepper.t_horizon, stepper.dt_init * 1000));

  RunReport r{describe(cfg.datum), advance(u0, cfg.spec, stepper), {}, {}, {}, {}, {}, {}, {}};
  if (context) {
    r.context = context;
  } else if (cfg.classify.well_depth) {
    r.context = prepare_classification(cfg);
  }
  if (r.context) r.classification = classify_initial_datum(u0, cfg.spec, r.context->d_hat, r.context->lambda_alpha_hat);
  r.concavity = concavity_report(r.trajectory);
  if (r.trajectory.samples.size() >= 2) r.monotonicity = monotonicity_monitor(r.trajectory);

  if (cfg.crosscheck.enabled) {
    const DomainSpec fd_spec = cfg.spec.with_modes(cfg.crosscheck.points);
    oracle::FdConfig fc;
    fc.dt = cfg.crosscheck.dt;
    fc.dt_min = std::min(fc.dt_min, fc.dt);
    fc.t_horizon = stepper.t_horizon;
    fc.u_max = stepper.u_max;
    fc.checkpoint_stride = std::max<std::size_t>(1, ceil_div(fc.t_horizon, fc.dt * 200));
    r.fd = oracle::fd_advance(to_grid(u0.resized(fd_spec.n_coeffs()), fd_spec), fd_spec, fc);
    r.crosscheck = oracle::compare(r.trajectory, *r.fd);
  }
  return r;
}

void write_artifacts(RunReport& r, const ExperimentConfig& cfg) {
  const auto& dir = cfg.outputs.dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  r.artifacts.clear();
  if (cfg.outputs.csv) {
    std::ostringstream os;
    write_csv(os, r.trajectory);
    write_text_file(dir / "timeseries.csv", os.str());
    r.artifacts.push_back("timeseries.csv");
    if (r.fd) {
      std::ostringstream fs;
      write_csv(fs, *r.fd);
      write_text_file(dir / "timeseries_fd.csv", fs.str());
      r.artifacts.push_back("timeseries_fd.csv");
    }
  }
  if (cfg.outputs.plot && cfg.outputs.csv) {
    write_text_file(dir / "plot.py", plot_script("timeseries.csv"));
    r.artifacts.push_back("plot.py");
  }
  if (cfg.outputs.json) {
    r.artifacts.push_back("summary.json");
    write_text_file(dir / "summary.json", summary_json(r, cfg));
  }
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport r = compute_experiment(cfg);
  write_artifacts(r, cfg);
  return r;
}

std::vector<SweepEntry> run_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep.multipliers.empty()) throw Error(ErrorCode::ConfigInvalid, "[sweep] multipliers are empty");
  std::optional<ClassifyContext> ctx;
  if (cfg.classify.well_depth) ctx = prepare_classification(cfg);

  const std::size_t n = cfg.sweep.multipliers.size();
  std::vector<std::optional<SweepEntry>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        ExperimentConfig run = cfg;
        run.datum = NehariScaled{base_of(cfg.datum), cfg.sweep.multipliers[i]};
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        run.outputs.dir = cfg.outputs.dir / name;
        RunReport r = compute_experiment(run, ctx);
        write_artifacts(r, run);
        slots[i] = SweepEntry{cfg.sweep.multipliers[i], run.outputs.dir, std::move(r)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::min(cfg.sweep.workers, n);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SweepEntry> out;
  std::ostringstream csv;
  csv << "multiplier,dir,kind,t_end,blowup_time_estimate,J0,I0,s_minus_entry\n";
  for (auto& s : slots) {
    const auto& tr = s->report.trajectory;
    char line[512];
    std::snprintf(line, sizeof line, "%.17g,%s,%s,%.17g,%s,%.17g,%.17g,%s\n", s->multiplier,
                  s->dir.filename().string().c_str(), std::string(to_string(tr.outcome.kind)).c_str(),
                  static_cast<double>(tr.outcome.t_end),
                  fmt17(tr.outcome.blowup_time_estimate).c_str(), tr.samples.front().J, tr.samples.front().I,
                  fmt17(tr.s_minus_entry).c_str());
    csv << line;
    out.push_back(std::move(*s));
  }
  std::filesystem::create_directories(cfg.outputs.dir);
  write_text_file(cfg.outputs.dir / "sweep.csv", csv.str());
  return out;
}

}  // namespace thinfilm::lab
