#include "thinfilm/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace thinfilm {

namespace {

double span_of(Time later, Time earlier) { return static_cast<double>(later - earlier); }

/// Derivative at the middle of three non-uniformly spaced points.
double centered_first(double f0, double f1, double f2, double h1, double h2) {
  return -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 + h1 / (h2 * (h1 + h2)) * f2;
}

double centered_second(double f0, double f1, double f2, double h1, double h2) {
  return 2.0 * (f0 / (h1 * (h1 + h2)) - f1 / (h1 * h2) + f2 / (h2 * (h1 + h2)));
}

}  // namespace

double mass(const SpectralField& u, const DomainSpec& spec) {
  require_size(u, spec);
  return mass(to_grid(u, spec), spec);
}

double mass(const GridField& u, const DomainSpec& spec) {
  require_size(u, spec);
  double s = 0.0;
  for (double v : u.values()) s += v;
  return s * spec.a() / static_cast<double>(spec.n_modes());
}

FieldNorms compute_norms(const SpectralField& u, const DomainSpec& spec) {
  require_size(u, spec);
  SpectralWorkspace ws(spec);
  return ws.norms(u.coeffs());
}

double energy_J(const SpectralField& u, const DomainSpec& spec) {
  return energy_J(compute_norms(u, spec), spec.p());
}

double nehari_I(const SpectralField& u, const DomainSpec& spec) {
  return nehari_I(compute_norms(u, spec));
}

double lambda_star(const FieldNorms& n, double p) {
  if (!(n.lp1 > 0.0) || !(n.h2sq > 0.0)) throw Error(ErrorCode::ZeroField, "lambda_star of zero field");
  return std::pow(n.h2sq / n.lp1, 1.0 / (p - 1.0));
}

double lambda_star(const SpectralField& u, const DomainSpec& spec) {
  require_size(u, spec);
  if (u.is_zero()) throw Error(ErrorCode::ZeroField, "lambda_star of zero field");
  return lambda_star(compute_norms(u, spec), spec.p());
}

std::vector<double> energy_identity_residual(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.empty()) throw Error(ErrorCode::EmptyTrajectory, "no samples");
  std::vector<double> out;
  out.reserve(s.size());
  double integral = 0.0;
  out.push_back(0.0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    integral += 0.5 * span_of(s[i].t, s[i - 1].t) * (s[i].ut_l2sq + s[i - 1].ut_l2sq);
    out.push_back(std::abs(integral + s[i].J - s[0].J));
  }
  return out;
}

std::vector<IdentityResidual> l2_identity_residual(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.size() < 3) throw Error(ErrorCode::TooFewSamples, "l2 identity needs 3 samples");
  std::vector<IdentityResidual> out;
  out.reserve(s.size() - 2);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h1 = span_of(s[i].t, s[i - 1].t);
    const double h2 = span_of(s[i + 1].t, s[i].t);
    const double d = centered_first(s[i - 1].l2sq, s[i].l2sq, s[i + 1].l2sq, h1, h2);
    const double ref = -2.0 * s[i].I;
    const double r = std::abs(d - ref);
    out.push_back({s[i].t, r, ref != 0.0 ? r / std::abs(ref) : (r == 0.0 ? 0.0 : INFINITY)});
  }
  return out;
}

std::vector<IdentityResidual> m_second_difference_residual(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.size() < 3) throw Error(ErrorCode::TooFewSamples, "M'' check needs 3 samples");
  std::vector<IdentityResidual> out;
  out.reserve(s.size() - 2);
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h1 = span_of(s[i].t, s[i - 1].t);
    const double h2 = span_of(s[i + 1].t, s[i].t);
    const double d2 = centered_second(s[i - 1].M, s[i].M, s[i + 1].M, h1, h2);
    const double ref = s[i].Mpp;
    const double r = std::abs(d2 - ref);
    out.push_back({s[i].t, r, ref != 0.0 ? r / std::abs(ref) : (r == 0.0 ? 0.0 : INFINITY)});
  }
  return out;
}

MonotonicityReport monotonicity_monitor(const Trajectory& traj, double rel_tolerance) {
  const auto& s = traj.samples;
  if (s.size() < 2) throw Error(ErrorCode::TooFewSamples, "monotonicity monitor needs 2 samples");
  const double p = traj.spec.p();
  MonotonicityReport rep;
  rep.tolerance = rel_tolerance;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double h = span_of(s[i].t, s[i - 1].t);
    if (!(h > 0.0)) continue;
    const double dlp1 = (s[i].lp1 - s[i - 1].lp1) / h;
    const double dI = (s[i].I - s[i - 1].I) / h;
    const double dJ = (s[i].J - s[i - 1].J) / h;
    const double bound = -(s[i].ut_l2sq + s[i - 1].ut_l2sq);
    rep.t_mid.push_back(s[i - 1].t + (s[i].t - s[i - 1].t) / 2);
    rep.dlp1_dt.push_back(dlp1);
    rep.dI_dt.push_back(dI);
    rep.bound.push_back(bound);
    if (dlp1 > 0.0) ++rep.lp1_increasing;
    else if (dlp1 < 0.0) ++rep.lp1_decreasing;
    else ++rep.lp1_flat;

    const double scale = std::max({std::abs(dI), std::abs(bound), 1.0});
    const double excess = dI - bound;
    if (excess > rel_tolerance * scale) rep.violations.push_back({rep.t_mid.back(), excess});

    const double other = 2.0 * dJ - (p - 1.0) / (p + 1.0) * dlp1;
    rep.max_identity_discrepancy = std::max(rep.max_identity_discrepancy, std::abs(dI - other));
  }
  return rep;
}

double concavity_epsilon_upper(double p) noexcept { return 1.0 - std::sqrt(2.0 / (p + 1.0)); }

double concavity_eta(double p, double epsilon) noexcept {
  const double q = 1.0 - epsilon;
  return ((p + 1.0) * q * q - 2.0) / 2.0;
}

ConcavityReport concavity_report(const Trajectory& traj, std::optional<double> epsilon) {
  const double p = traj.spec.p();
  const double upper = concavity_epsilon_upper(p);
  ConcavityReport rep;
  rep.epsilon = epsilon.value_or(0.5 * upper);
  if (!(rep.epsilon > 0.0 && rep.epsilon < upper))
    throw Error(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0, 1 - sqrt(2/(p+1)))");
  rep.eta = concavity_eta(p, rep.epsilon);

  const double q = 1.0 - rep.epsilon;
  const double c = 0.5 * (p + 1.0) * q * q;
  bool any_mass = false;
  for (const auto& s : traj.samples) {
    rep.margin_series.emplace_back(s.t, s.Mpp * s.M - c * s.Mp * s.Mp);
    if (s.M > 0.0) {
      any_mass = true;
      rep.F_series.emplace_back(s.t, std::pow(s.M, -rep.eta));
    }
  }
  rep.degenerate = !any_mass;
  const auto& F = rep.F_series;
  for (std::size_t i = 1; i + 1 < F.size(); ++i) {
    const double h1 = span_of(F[i].first, F[i - 1].first);
    const double h2 = span_of(F[i + 1].first, F[i].first);
    if (!(h1 > 0.0 && h2 > 0.0)) continue;
    const double d2 = centered_second(F[i - 1].second, F[i].second, F[i + 1].second, h1, h2);
    if (d2 > 0.0) ++rep.F_convex;
    else if (d2 < 0.0) ++rep.F_concave;
  }
  return rep;
}

double max_energy_increase(const Trajectory& traj) {
  const auto& s = traj.samples;
  if (s.empty()) return 0.0;
  const double scale = 1.0 + std::abs(s.front().J);
  double worst = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) worst = std::max(worst, (s[i].J - s[i - 1].J) / scale);
  return worst;
}

std::vector<Time> necessity_bound_violations(const Trajectory& traj, double rel_slack) {
  std::vector<Time> out;
  if (traj.samples.empty()) return out;
  const double p = traj.spec.p();
  const double bound = 2.0 * (p + 1.0) / (p - 1.0) * traj.samples.front().J * (1.0 + rel_slack);
  for (const auto& s : traj.samples)
    if (s.h2sq > bound) out.push_back(s.t);
  return out;
}

}  // namespace thinfilm
