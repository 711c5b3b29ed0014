#include "thinfilm/lab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace thinfilm::lab {
namespace {

using json = nlohmann::ordered_json;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
json real(Time v) { return real(static_cast<double>(v)); }

template <class T>
json optional_real(const std::optional<T>& v) {
  return v ? real(*v) : json(nullptr);
}

json outcome_json(const RunOutcome& o) {
  return {{"kind", to_string(o.kind)},
          {"t_end", real(o.t_end)},
          {"blowup_time_estimate", optional_real(o.blowup_time_estimate)},
          {"trigger", to_string(o.trigger)},
          {"trigger_value", real(o.trigger_value)},
          {"threshold", real(o.threshold)},
          {"evidence", o.evidence}};
}

json monotonicity_doc(const MonotonicityReport& m) {
  json violations = json::array();
  for (const auto& v : m.violations) violations.push_back({{"t", real(v.t)}, {"magnitude", real(v.magnitude)}});
  return {{"intervals", m.t_mid.size()},
          {"lp1_increasing", m.lp1_increasing},
          {"lp1_decreasing", m.lp1_decreasing},
          {"lp1_flat", m.lp1_flat},
          {"tolerance", real(m.tolerance)},
          {"dissipation_bound_violations", violations},
          {"max_identity_discrepancy", real(m.max_identity_discrepancy)}};
}

json concavity_doc(const ConcavityReport& c) {
  double min_margin = INFINITY;
  for (const auto& [t, m] : c.margin_series) min_margin = std::min(min_margin, m);
  return {{"epsilon", real(c.epsilon)},
          {"eta", real(c.eta)},
          {"F_samples", c.F_series.size()},
          {"F_convex", c.F_convex},
          {"F_concave", c.F_concave},
          {"min_margin", c.margin_series.empty() ? json(nullptr) : real(min_margin)},
          {"degenerate", c.degenerate}};
}

json stepper_doc(const StepperConfig& s) {
  return {{"dt_init", s.dt_init},       {"dt_min", s.dt_min},
          {"dt_max", s.dt_max},         {"rel_tol", s.rel_tol},
          {"t_horizon", s.t_horizon},   {"u_max", s.u_max},
          {"sample_stride", s.sample_stride}, {"checkpoint_stride", s.checkpoint_stride},
          {"adaptive", s.adaptive},     {"max_steps", s.max_steps}};
}

}  // namespace

void write_csv(std::ostream& out, const Trajectory& traj) {
  const double p = traj.spec.p();
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  for (const auto& s : traj.samples) {
    if (!satisfies_invariants(s, p))
      throw Error(ErrorCode::InvariantViolation,
                  "sample at t = " + num(static_cast<double>(s.t)) + " violates the diagnostic identities");
    out << num(static_cast<double>(s.t)) << ',' << num(s.dt) << ',' << num(s.mass) << ',' << num(s.l2sq) << ','
        << num(s.lp1) << ',' << num(s.linf) << ',' << num(s.h2sq) << ',' << num(s.J) << ',' << num(s.I) << ','
        << num(s.ut_l2sq) << ',' << num(s.M) << ',' << num(s.energy_residual) << '\n';
  }
}

std::string summary_json(const RunReport& r, const ExperimentConfig& cfg) {
  const Trajectory& tr = r.trajectory;
  json doc;
  doc["schema"] = 1;
  doc["metadata"] = {{"library_version", THINFILM_VERSION},
                     {"solver", tr.solver},
                     {"a", tr.spec.a()},
                     {"p", tr.spec.p()},
                     {"n_modes", tr.spec.n_modes()},
                     {"datum", r.datum},
                     {"stepper", stepper_doc(cfg.stepper)},
                     {"accepted_steps", tr.accepted_steps},
                     {"rejected_steps", tr.rejected_steps},
                     {"max_error_ratio", real(tr.max_error_ratio)},
                     {"samples", tr.samples.size()}};
  doc["outcome"] = outcome_json(tr.outcome);
  doc["s_minus_entry"] = optional_real(tr.s_minus_entry);
  if (!tr.samples.empty()) {
    const auto& s0 = tr.samples.front();
    doc["initial"] = {{"J", real(s0.J)}, {"I", real(s0.I)}, {"l2sq", real(s0.l2sq)},
                      {"h2sq", real(s0.h2sq)}, {"lp1", real(s0.lp1)}, {"linf", real(s0.linf)}};
  }
  if (r.classification) {
    const auto& c = *r.classification;
    doc["classification"] = {{"J0", real(c.J0)},
                             {"I0", real(c.I0)},
                             {"l2sq0", real(c.l2sq0)},
                             {"d_hat", real(c.d_hat)},
                             {"depth_converged", r.context ? r.context->depth_converged : false},
                             {"alpha", r.context ? optional_real(r.context->alpha) : json(nullptr)},
                             {"lambda_alpha_hat", optional_real(c.lambda_alpha_hat)},
                             {"branch", to_string(c.branch)},
                             {"predicted", to_string(c.predicted)},
                             {"note", c.note}};
  } else {
    doc["classification"] = nullptr;
  }
  doc["concavity"] = concavity_doc(r.concavity);
  doc["monotonicity"] = monotonicity_doc(r.monotonicity);
  if (r.crosscheck) {
    const auto& c = *r.crosscheck;
    doc["crosscheck"] = {{"fd_points", r.fd ? r.fd->spec.n_modes() : 0},
                         {"fd_outcome", r.fd ? outcome_json(r.fd->outcome) : json(nullptr)},
                         {"overlap", {real(c.overlap_begin), real(c.overlap_end)}},
                         {"max_rel_J", real(c.series.max_rel_J)},
                         {"max_rel_I", real(c.series.max_rel_I)},
                         {"max_rel_l2", real(c.series.max_rel_l2)},
                         {"max_rel_state", real(c.max_rel_state)},
                         {"kinds_agree", c.kinds_agree},
                         {"blowup_time_rel_diff", optional_real(c.blowup_time_rel_diff)}};
  } else {
    doc["crosscheck"] = nullptr;
  }
  doc["artifacts"] = r.artifacts;
  return doc.dump(2) + "\n";
}

std::string monotonicity_json(const std::vector<std::pair<std::string, const MonotonicityReport*>>& runs) {
  json doc;
  doc["schema"] = 1;
  json list = json::array();
  for (const auto& [name, rep] : runs) {
    json entry = monotonicity_doc(*rep);
    entry["run"] = name;
    list.push_back(std::move(entry));
  }
  doc["runs"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::string plot_script(std::string_view csv_name) {
  std::string s = R"(#!/usr/bin/env python3
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = os.path.join(here, "@CSV@")
with open(path, newline="") as fh:
    rows = list(csv.DictReader(fh))
if not rows:
    sys.exit("no samples in " + path)
col = lambda name: [float(r[name]) for r in rows]
t = col("t")

fig, ax = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
ax[0, 0].semilogy(t, col("linf"))
ax[0, 0].set_ylabel("max |u|")
ax[0, 1].plot(t, col("J"), label="J")
ax[0, 1].plot(t, col("I"), label="I")
ax[0, 1].axhline(0.0, color="k", lw=0.5)
ax[0, 1].legend()
ax[1, 0].semilogy(t, col("h2sq"))
ax[1, 0].set_ylabel("|u_xx|^2")
ax[1, 1].semilogy(t, [abs(v) + 1e-300 for v in col("energy_residual")])
ax[1, 1].set_ylabel("energy residual")
for a in ax[1]:
    a.set_xlabel("t")
fig.tight_layout()
out = os.path.join(here, "diagnostics.png")
fig.savefig(out, dpi=120)
print(out)
)";
  const std::string key = "@CSV@";
  s.replace(s.find(key), key.size(), csv_name);
  return s;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "write to " + path.string() + " failed");
}

}  // namespace thinfilm::lab
