#include "thinfilm/nehari.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "thinfilm/functionals.hpp"

namespace thinfilm {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

/// The optimizers work in H^2-normalized coordinates v_k = sqrt(lambda_k) c_k,
/// in which ||u_xx||_2^2 = (a/2) |v|^2 and the problems are well conditioned.
class Landscape {
 public:
  explicit Landscape(const DomainSpec& spec)
      : spec_(spec), ws_(spec), root_(spec.n_coeffs()), c_(spec.n_coeffs()), g_(spec.n_coeffs()) {
    for (std::size_t i = 0; i < root_.size(); ++i) root_[i] = std::sqrt(ws_.symbol()[i]);
  }

  struct Eval {
    double l2sq = 0.0, h2sq = 0.0, lp1 = 0.0;
    std::vector<double> d_log_l2, d_log_lp1, d_log_h2;
  };

  std::size_t size() const noexcept { return root_.size(); }
  double p() const noexcept { return spec_.p(); }

  void evaluate(std::span<const double> v, Eval& e) {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) c_[i] = v[i] / root_[i];
    const FieldNorms fn = ws_.evaluate(c_, g_);
    e.l2sq = fn.l2sq;
    e.h2sq = fn.h2sq;
    e.lp1 = fn.lp1;
    e.d_log_l2.resize(n);
    e.d_log_lp1.resize(n);
    e.d_log_h2.resize(n);
    const double a = spec_.a();
    for (std::size_t i = 0; i < n; ++i) {
      e.d_log_l2[i] = a * c_[i] / (root_[i] * fn.l2sq);
      // d lp1 / d c_k = (p+1) (a/2) ghat_k, consistent with the padded quadrature.
      e.d_log_lp1[i] = (p() + 1.0) * 0.5 * a * g_[i] / (root_[i] * fn.lp1);
      e.d_log_h2[i] = a * v[i] / fn.h2sq;
    }
  }

  void normalize(std::vector<double>& v) const {
    const double s = std::sqrt(0.5 * spec_.a() * dot(v, v));
    for (double& x : v) x /= s;
  }

  SpectralField field(std::span<const double> v) const {
    std::vector<double> c(size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = v[i] / root_[i];
    return SpectralField(std::move(c));
  }

  std::vector<double> coordinates(const SpectralField& u) const {
    std::vector<double> v(size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = u[i] * root_[i];
    return v;
  }

 private:
  DomainSpec spec_;
  SpectralWorkspace ws_;
  std::vector<double> root_, c_, g_;
};

std::vector<std::vector<double>> seeds(const DomainSpec& spec, const OptimizerConfig& cfg) {
  const std::size_t n = spec.n_coeffs();
  std::vector<std::vector<double>> out;
  for (std::size_t k = 1; k <= std::min(cfg.mode_seeds, n); ++k) {
    std::vector<double> v(n, 0.0);
    v[k - 1] = 1.0;
    out.push_back(std::move(v));
  }
  std::mt19937_64 rng(cfg.rng_seed);
  const std::size_t band = std::max<std::size_t>(1, std::min(cfg.random_band, n));
  for (std::size_t s = 0; s < cfg.random_seeds; ++s) {
    std::vector<double> v(n, 0.0);
    for (std::size_t k = 1; k <= band; ++k) {
      const double xi = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
      v[k - 1] = xi / static_cast<double>(k);
    }
    out.push_back(std::move(v));
  }
  return out;
}

struct DescentResult {
  std::vector<double> v;
  double objective = std::numeric_limits<double>::infinity();
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// phi(v) = ((p+1)/2) log ||u_xx||^2 - log ||u||_{p+1}^{p+1}; the reduced
/// energy is ((p-1)/(2(p+1))) exp(2 phi / (p-1)).
DescentResult minimize_reduced_energy(Landscape& land, std::vector<double> v,
                                      const OptimizerConfig& cfg) {
  const double p = land.p();
  const std::size_t n = land.size();
  Landscape::Eval e;
  auto objective = [&](const Landscape::Eval& ev) { return 0.5 * (p + 1.0) * std::log(ev.h2sq) - std::log(ev.lp1); };
  auto gradient = [&](const Landscape::Eval& ev, std::vector<double>& g) {
    g.resize(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = 0.5 * (p + 1.0) * ev.d_log_h2[i] - ev.d_log_lp1[i];
  };

  land.normalize(v);
  land.evaluate(v, e);
  double phi = objective(e);
  std::vector<double> g, g_try, v_try(n);
  gradient(e, g);

  DescentResult res;
  double step = 0.1;
  for (res.iterations = 0; res.iterations < cfg.max_iter; ++res.iterations) {
    res.grad_norm = norm(g);
    if (res.grad_norm <= cfg.grad_tol) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    double phi_try = phi;
    while (step > 1e-20) {
      for (std::size_t i = 0; i < n; ++i) v_try[i] = v[i] - step * g[i];
      land.normalize(v_try);
      land.evaluate(v_try, e);
      phi_try = objective(e);
      // Roundoff slack lets the iteration keep reducing the gradient once
      // objective decreases fall below double resolution.
      if (phi_try <= phi - 1e-4 * step * res.grad_norm * res.grad_norm + 1e-14 * std::abs(phi)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    gradient(e, g_try);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = v_try[i] - v[i];
      const double y = g_try[i] - g[i];
      ss += s * s;
      sy += s * y;
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-8, 1e3) : std::min(2.0 * step, 1e3);
    v.swap(v_try);
    g.swap(g_try);
    phi = phi_try;
  }
  res.grad_norm = norm(g);
  res.converged = res.converged || res.grad_norm <= cfg.grad_tol;
  res.v = std::move(v);
  res.objective = phi;
  return res;
}

}  // namespace

SpectralField project_to_nehari(const SpectralField& u, const DomainSpec& spec) {
  return u.scaled(lambda_star(u, spec));
}

WellDepthEstimate estimate_well_depth(const DomainSpec& spec, const OptimizerConfig& cfg) {
  Landscape land(spec);
  const auto starts = seeds(spec, cfg);
  if (starts.empty()) throw Error(ErrorCode::ConfigInvalid, "optimizer needs at least one seed");
  DescentResult best;
  std::size_t total_iterations = 0;
  for (const auto& s : starts) {
    DescentResult r = minimize_reduced_energy(land, s, cfg);
    total_iterations += r.iterations;
    if (r.objective < best.objective) best = std::move(r);
  }
  WellDepthEstimate out;
  out.minimizer = project_to_nehari(land.field(best.v), spec);
  out.d_hat = energy_J(out.minimizer, spec);
  out.n_modes_used = spec.n_modes();
  out.multistart_count = starts.size();
  out.iterations = total_iterations;
  out.grad_norm = best.grad_norm;
  out.converged = best.converged;
  return out;
}

double nehari_alpha_radius(double alpha, double p) noexcept {
  return std::sqrt(2.0 * alpha * (p + 1.0) / (p - 1.0));
}

namespace {

/// Maximizes psi(v) = log ||u||^2 + (2/(p-1)) (log ||u_xx||^2 - log lp1),
/// i.e. log ||lambda_star(v) v||_2^2 up to normalization, subject to
/// c(v) = log(lambda_star^2 ||v_xx||^2) - 2 log R <= 0.
class LambdaAlphaSolver {
 public:
  LambdaAlphaSolver(Landscape& land, double radius, const OptimizerConfig& cfg)
      : land_(land), log_r2_(2.0 * std::log(radius)), cfg_(cfg), n_(land.size()) {}

  struct State {
    std::vector<double> v;
    double psi = 0.0, con = 0.0;
    std::vector<double> dpsi, dcon;
  };

  void evaluate(State& s) {
    land_.evaluate(s.v, e_);
    const double q = 2.0 / (land_.p() - 1.0);
    s.psi = std::log(e_.l2sq) + q * (std::log(e_.h2sq) - std::log(e_.lp1));
    s.con = q * (std::log(e_.h2sq) - std::log(e_.lp1)) + std::log(e_.h2sq) - log_r2_;
    s.dpsi.resize(n_);
    s.dcon.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      s.dpsi[i] = e_.d_log_l2[i] + q * (e_.d_log_h2[i] - e_.d_log_lp1[i]);
      s.dcon[i] = (q + 1.0) * e_.d_log_h2[i] - q * e_.d_log_lp1[i];
    }
  }

  /// Newton steps on the constraint along its gradient until feasible.
  bool restore(State& s) {
    for (int it = 0; it < 50; ++it) {
      if (s.con <= 0.0) return true;
      const double gg = dot(s.dcon, s.dcon);
      if (!(gg > 0.0)) return false;
      const double shift = (s.con + 1e-13) / gg;
      for (std::size_t i = 0; i < n_; ++i) s.v[i] -= shift * s.dcon[i];
      land_.normalize(s.v);
      evaluate(s);
    }
    return s.con <= 0.0;
  }

  struct Result {
    State best;
    std::size_t iterations = 0;
    bool converged = false;
    bool feasible = false;
  };

  Result run(std::vector<double> v0) {
    Result res;
    State s;
    s.v = std::move(v0);
    land_.normalize(s.v);
    evaluate(s);
    if (!restore(s)) return res;
    res.feasible = true;
    res.best = s;

    std::vector<double> d(n_);
    State trial;
    double step = 0.1;
    for (res.iterations = 0; res.iterations < cfg_.max_iter; ++res.iterations) {
      d = s.dpsi;
      const double gd = dot(s.dpsi, s.dcon);
      if (s.con > -1e-8 && gd > 0.0) {
        const double gg = dot(s.dcon, s.dcon);
        for (std::size_t i = 0; i < n_; ++i) d[i] -= gd / gg * s.dcon[i];
      }
      const double dn = norm(d);
      if (dn <= cfg_.grad_tol) {
        res.converged = true;
        break;
      }
      bool accepted = false;
      while (step > 1e-16) {
        trial.v.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) trial.v[i] = s.v[i] + step * d[i];
        land_.normalize(trial.v);
        evaluate(trial);
        if (restore(trial) && trial.psi > s.psi) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // No ascent possible at double resolution: a stationary point up to roundoff.
        res.converged = dn <= 1e3 * cfg_.grad_tol;
        break;
      }
      s = trial;
      step = std::min(2.0 * step, 10.0);
      if (s.psi > res.best.psi) res.best = s;
    }
    return res;
  }

 private:
  Landscape& land_;
  double log_r2_;
  OptimizerConfig cfg_;
  std::size_t n_;
  Landscape::Eval e_;
};

}  // namespace

LambdaAlphaEstimate estimate_lambda_alpha(double alpha, const DomainSpec& spec,
                                          const OptimizerConfig& cfg) {
  return estimate_lambda_alpha(alpha, spec, cfg, estimate_well_depth(spec, cfg));
}

LambdaAlphaEstimate estimate_lambda_alpha(double alpha, const DomainSpec& spec,
                                          const OptimizerConfig& cfg,
                                          const WellDepthEstimate& depth) {
  if (!(alpha > depth.d_hat)) {
    std::ostringstream os;
    os << "alpha = " << alpha << " does not exceed the estimated depth " << depth.d_hat;
    throw Error(ErrorCode::AlphaBelowDepth, os.str());
  }
  Landscape land(spec);
  const double radius = nehari_alpha_radius(alpha, spec.p());
  LambdaAlphaSolver solver(land, radius, cfg);

  // The depth minimizer sits strictly inside the feasible set; the other
  // seeds are pulled in by the restoration step when they start outside.
  std::vector<std::vector<double>> starts{land.coordinates(depth.minimizer)};
  for (auto& s : seeds(spec, cfg)) starts.push_back(std::move(s));

  LambdaAlphaEstimate out;
  out.alpha = alpha;
  out.radius = radius;
  bool have = false;
  LambdaAlphaSolver::State best;
  for (auto& s : starts) {
    auto r = solver.run(std::move(s));
    out.iterations += r.iterations;
    if (!r.feasible) continue;
    if (!have || r.best.psi > best.psi) {
      best = std::move(r.best);
      out.converged = r.converged;
      have = true;
    }
  }
  if (!have) throw Error(ErrorCode::AlphaBelowDepth, "no feasible point found in N_alpha");
  out.field = project_to_nehari(land.field(best.v), spec);
  out.value = 0.5 * compute_norms(out.field, spec).l2sq;
  return out;
}

std::string_view to_string(ClassificationBranch branch) noexcept {
  switch (branch) {
    case ClassificationBranch::LowEnergyBlowUp: return "LowEnergyBlowUp";
    case ClassificationBranch::HighEnergyBlowUp: return "HighEnergyBlowUp";
    case ClassificationBranch::TheoremOnly: return "TheoremOnly";
    case ClassificationBranch::NoPrediction: return "NoPrediction";
  }
  return "Unknown";
}

std::string_view to_string(PredictedOutcome outcome) noexcept {
  switch (outcome) {
    case PredictedOutcome::BlowUp: return "BlowUp";
    case PredictedOutcome::Global: return "Global";
    case PredictedOutcome::None: return "None";
  }
  return "Unknown";
}

ClassificationBranch classify_branch(double J0, double I0, double l2sq0, double d_hat,
                                     std::optional<double> lambda_alpha_hat) noexcept {
  if (!(I0 < 0.0)) return ClassificationBranch::NoPrediction;
  if (J0 <= d_hat) return ClassificationBranch::LowEnergyBlowUp;
  if (lambda_alpha_hat && l2sq0 > 2.0 * *lambda_alpha_hat) return ClassificationBranch::HighEnergyBlowUp;
  return ClassificationBranch::TheoremOnly;
}

ClassificationReport classify_initial_datum(const SpectralField& u0, const DomainSpec& spec,
                                            double d_hat,
                                            std::optional<double> lambda_alpha_hat) {
  const FieldNorms n = compute_norms(u0, spec);
  ClassificationReport rep;
  rep.J0 = energy_J(n, spec.p());
  rep.I0 = nehari_I(n);
  rep.l2sq0 = n.l2sq;
  rep.d_hat = d_hat;
  rep.lambda_alpha_hat = lambda_alpha_hat;
  rep.branch = classify_branch(rep.J0, rep.I0, rep.l2sq0, d_hat, lambda_alpha_hat);
  switch (rep.branch) {
    case ClassificationBranch::LowEnergyBlowUp:
      rep.predicted = PredictedOutcome::BlowUp;
      rep.note = "I(u0) < 0 and J(u0) <= d_hat";
      break;
    case ClassificationBranch::HighEnergyBlowUp:
      rep.predicted = PredictedOutcome::BlowUp;
      rep.note = "I(u0) < 0, J(u0) > d_hat and ||u0||^2 > 2 Lambda_hat; Lambda_hat is a sampled "
                 "lower bound, so the high-energy condition is verified only against it";
      break;
    case ClassificationBranch::TheoremOnly:
      rep.predicted = PredictedOutcome::BlowUp;
      rep.note = lambda_alpha_hat ? "I(u0) < 0 only; the high-energy condition fails against Lambda_hat"
                                  : "I(u0) < 0 only; Lambda_alpha not estimated";
      break;
    case ClassificationBranch::NoPrediction:
      rep.predicted = PredictedOutcome::None;
      rep.note = "I(u0) >= 0: the outcome depends on whether I(u(t)) ever turns negative";
      break;
  }
  return rep;
}

}  // namespace thinfilm
