#include "thinfilm/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

namespace thinfilm {

namespace {

constexpr std::size_t kContourPoints = 32;
constexpr std::size_t kCacheSlots = 4;

struct ContourNodes {
  std::array<std::complex<double>, kContourPoints> r, exp_r, exp_half_r;
  ContourNodes() {
    for (std::size_t j = 0; j < kContourPoints; ++j) {
      const double theta = 2.0 * kPi * (static_cast<double>(j) + 0.5) / kContourPoints;
      r[j] = std::polar(1.0, theta);
      exp_r[j] = std::exp(r[j]);
      exp_half_r[j] = std::exp(0.5 * r[j]);
    }
  }
};

const ContourNodes& contour() {
  static const ContourNodes nodes;
  return nodes;
}

double l2_norm(std::span<const double> c, double a) {
  double s = 0.0;
  for (double v : c) s += v * v;
  return std::sqrt(0.5 * a * s);
}

double l2_distance(std::span<const double> x, std::span<const double> y, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(0.5 * a * s);
}

bool all_finite(std::span<const double> c) {
  return std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); });
}

std::string format_time(Time t) {
  std::ostringstream os;
  os.precision(19);
  os << t;
  return os.str();
}

}  // namespace

void StepperConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (!(dt_min > 0.0)) fail("dt_min must be positive");
  if (!(dt_min <= dt_init)) fail("dt_min must not exceed dt_init");
  if (!(dt_init <= dt_max)) fail("dt_init must not exceed dt_max");
  if (!(rel_tol > 0.0)) fail("rel_tol must be positive");
  if (!(u_max > 0.0)) fail("u_max must be positive");
  if (!(t_horizon > 0.0)) fail("t_horizon must be positive");
  if (sample_stride == 0) fail("sample_stride must be at least 1");
  if (max_steps == 0) fail("max_steps must be at least 1");
}

EtdCoefficients EtdCoefficients::compute(const LinearSymbol& symbol, double h) {
  const auto& nodes = contour();
  const std::size_t n = symbol.size();
  EtdCoefficients c;
  c.h = h;
  c.E.resize(n);
  c.E2.resize(n);
  c.Q.resize(n);
  c.f1.resize(n);
  c.f2.resize(n);
  c.f3.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double z = -symbol[k] * h;
    const double ez = std::exp(z);
    const double ez2 = std::exp(0.5 * z);
    std::complex<double> q{}, g1{}, g2{}, g3{};
    for (std::size_t j = 0; j < kContourPoints; ++j) {
      const std::complex<double> L = z + nodes.r[j];
      const std::complex<double> eL = ez * nodes.exp_r[j];
      const std::complex<double> eL2 = ez2 * nodes.exp_half_r[j];
      const std::complex<double> L3 = L * L * L;
      q += (eL2 - 1.0) / L;
      g1 += (-4.0 - L + eL * (4.0 - 3.0 * L + L * L)) / L3;
      g2 += (2.0 + L + eL * (-2.0 + L)) / L3;
      g3 += (-4.0 - 3.0 * L - L * L + eL * (4.0 - L)) / L3;
    }
    const double scale = h / static_cast<double>(kContourPoints);
    c.E[k] = ez;
    c.E2[k] = ez2;
    c.Q[k] = scale * q.real();
    c.f1[k] = scale * g1.real();
    c.f2[k] = scale * g2.real();
    c.f3[k] = scale * g3.real();
  }
  return c;
}

EtdStepper::EtdStepper(const DomainSpec& spec, StepOptions options)
    : ws_(spec), options_(options) {
  const std::size_t n = spec.n_coeffs();
  for (auto* v : {&Nu_, &Na_, &Nb_, &Nc_, &a_, &b_, &c_}) v->assign(n, 0.0);
  cache_.reserve(kCacheSlots);
}

const EtdCoefficients& EtdStepper::coefficients(double h) {
  for (const auto& c : cache_)
    if (c.h == h) return c;
  if (cache_.size() < kCacheSlots) {
    cache_.push_back(EtdCoefficients::compute(ws_.symbol(), h));
    return cache_.back();
  }
  auto& slot = cache_[next_slot_];
  next_slot_ = (next_slot_ + 1) % kCacheSlots;
  slot = EtdCoefficients::compute(ws_.symbol(), h);
  return slot;
}

void EtdStepper::source(std::span<const double> u, std::span<double> out) {
  if (options_.include_nonlinear) ws_.source(u, out);
  else std::fill(out.begin(), out.end(), 0.0);
}

void EtdStepper::step(std::span<const double> u, double h, std::span<double> out) {
  const auto& co = coefficients(h);
  const std::size_t n = u.size();
  source(u, Nu_);
  for (std::size_t k = 0; k < n; ++k) a_[k] = co.E2[k] * u[k] + co.Q[k] * Nu_[k];
  source(a_, Na_);
  for (std::size_t k = 0; k < n; ++k) b_[k] = co.E2[k] * u[k] + co.Q[k] * Na_[k];
  source(b_, Nb_);
  for (std::size_t k = 0; k < n; ++k) c_[k] = co.E2[k] * a_[k] + co.Q[k] * (2.0 * Nb_[k] - Nu_[k]);
  source(c_, Nc_);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = co.E[k] * u[k] + co.f1[k] * Nu_[k] + 2.0 * co.f2[k] * (Na_[k] + Nb_[k]) +
             co.f3[k] * Nc_[k];
}

SpectralField step(const SpectralField& u, double dt, const DomainSpec& spec,
                   const LinearSymbol& symbol, StepOptions options) {
  require_size(u, spec);
  if (symbol.size() != spec.n_coeffs()) throw Error(ErrorCode::SizeMismatch, "linear symbol size");
  if (!(dt > 0.0)) throw Error(ErrorCode::ConfigInvalid, "dt must be positive");
  EtdStepper stepper(spec, options);
  std::vector<double> out(spec.n_coeffs());
  stepper.step(u.coeffs(), dt, out);
  return SpectralField(std::move(out));
}

namespace {

class SpectralRun {
 public:
  SpectralRun(const SpectralField& u0, const DomainSpec& spec, const StepperConfig& cfg)
      : spec_(spec), cfg_(cfg), traj_(spec), stepper_(spec),
        recorder_(traj_, cfg.sample_stride, cfg.checkpoint_stride),
        u_(u0.coeffs().begin(), u0.coeffs().end()), full_(u_.size()), half_(u_.size()),
        two_(u_.size()), ut_(u_.size()) {
    traj_.solver = "spectral-etdrk4";
  }

  Trajectory run() {
    double linf = 0.0;
    try {
      linf = record(0, 0.0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Overflow) throw;
      return finish_blowup(BlowUpTrigger::Overflow, INFINITY, 0.0, e.what());
    }
    if (linf > cfg_.u_max)
      return finish_blowup(BlowUpTrigger::Amplitude, linf, cfg_.u_max, "initial datum above u_max");

    Time t = 0;
    const Time horizon = cfg_.t_horizon;
    double h = cfg_.dt_init;
    while (t < horizon) {
      if (traj_.accepted_steps + traj_.rejected_steps >= cfg_.max_steps) {
        traj_.outcome = RunOutcome::inconclusive(t, "step budget exhausted");
        return finish();
      }
      const Time remaining = horizon - t;
      const bool last = static_cast<Time>(h) * (1.0L + 1e-9L) >= remaining;
      const double h_try = last ? static_cast<double>(remaining) : h;

      double err = 0.0, tol = 0.0;
      try {
        if (cfg_.adaptive) {
          stepper_.step(u_, h_try, full_);
          stepper_.step(u_, 0.5 * h_try, half_);
          stepper_.step(half_, 0.5 * h_try, two_);
          err = l2_distance(two_, full_, spec_.a());
          tol = cfg_.rel_tol * (1.0 + l2_norm(two_, spec_.a()));
        } else {
          stepper_.step(u_, h_try, two_);
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Overflow) throw;
        std::ostringstream os;
        os << "source overflow during step from t = " << format_time(t) << ": " << e.what();
        return finish_blowup(BlowUpTrigger::Overflow, INFINITY, 0.0, os.str());
      }

      const bool finite = all_finite(two_) && std::isfinite(err);
      if (!cfg_.adaptive && !finite) {
        return finish_blowup(BlowUpTrigger::Overflow, INFINITY, 0.0,
                             "non-finite state at t = " + format_time(t));
      }
      if (cfg_.adaptive && !(finite && err <= tol)) {
        ++traj_.rejected_steps;
        const double factor = finite && err > 0.0 ? std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 1.0) : 0.2;
        h = h_try * factor;
        if (h < cfg_.dt_min) {
          std::ostringstream os;
          os << "step size " << h << " fell below dt_min = " << cfg_.dt_min
             << " with the error controller still failing at t = " << format_time(t);
          return finish_blowup(BlowUpTrigger::StepCollapse, h, cfg_.dt_min, os.str());
        }
        continue;
      }

      // Accept.
      if (cfg_.adaptive && tol > 0.0) traj_.max_error_ratio = std::max(traj_.max_error_ratio, err / tol);
      u_.swap(two_);
      t = last ? horizon : t + static_cast<Time>(h_try);
      ++traj_.accepted_steps;
      try {
        linf = record(t, h_try);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Overflow) throw;
        return finish_blowup(BlowUpTrigger::Overflow, INFINITY, 0.0, e.what());
      }
      if (linf > cfg_.u_max) {
        std::ostringstream os;
        os << "||u||_inf = " << linf << " exceeded u_max = " << cfg_.u_max << " at t = "
           << format_time(t);
        return finish_blowup(BlowUpTrigger::Amplitude, linf, cfg_.u_max, os.str());
      }
      if (cfg_.adaptive && !last) {
        const double factor = err > 0.0 ? std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 2.0) : 2.0;
        h = std::min(cfg_.dt_max, h_try * factor);
        if (h < cfg_.dt_min) {
          std::ostringstream os;
          os << "error controller requested step " << h << " below dt_min = " << cfg_.dt_min
             << " at t = " << format_time(t) << " with ||u||_inf = " << linf;
          return finish_blowup(BlowUpTrigger::StepCollapse, h, cfg_.dt_min, os.str());
        }
      }
    }
    std::ostringstream os;
    os << "reached t_horizon = " << cfg_.t_horizon << " with ||u||_inf = " << linf;
    traj_.outcome = RunOutcome::horizon_reached(t, os.str());
    return finish();
  }

 private:
  double record(Time t, double dt) {
    auto& ws = stepper_.workspace();
    const FieldNorms n = ws.evaluate(u_, ut_);
    for (std::size_t i = 0; i < ut_.size(); ++i) ut_[i] -= ws.symbol()[i] * u_[i];
    double ut2 = 0.0;
    for (double v : ut_) ut2 += v * v;
    ut2 *= 0.5 * spec_.a();
    recorder_.record(t, dt, n.mass, n, ut2, [this] { return SpectralField(u_); });
    return n.linf;
  }

  Trajectory finish() {
    recorder_.finish([this] { return SpectralField(u_); });
    return std::move(traj_);
  }

  Trajectory finish_blowup(BlowUpTrigger trigger, double value, double threshold, std::string evidence) {
    recorder_.finish([this] {
      // The state may hold non-finite values after an overflow.
      return all_finite(u_) ? SpectralField(u_) : SpectralField::zero(spec_);
    });
    const Time t_end = traj_.samples.empty() ? Time{0} : traj_.samples.back().t;
    Time estimate = t_end;
    try {
      const BlowUpFit fit = estimate_blowup_time_samples();
      estimate = fit.T;
      std::ostringstream os;
      os << "; fitted T = " << format_time(fit.T) << " with rate exponent " << fit.exponent
         << " over " << fit.tail_samples << " samples";
      evidence += os.str();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientTail) throw;
      evidence += "; blow-up time estimate falls back to t_end (insufficient growing tail)";
    }
    traj_.outcome = RunOutcome::blow_up(t_end, estimate, trigger, value, threshold, std::move(evidence));
    return std::move(traj_);
  }

  BlowUpFit estimate_blowup_time_samples() const {
    std::vector<Time> t;
    std::vector<double> linf;
    t.reserve(traj_.samples.size());
    linf.reserve(traj_.samples.size());
    for (const auto& s : traj_.samples) {
      t.push_back(s.t);
      linf.push_back(s.linf);
    }
    return estimate_blowup_time(t, linf, spec_.p());
  }

  DomainSpec spec_;
  StepperConfig cfg_;
  Trajectory traj_;
  EtdStepper stepper_;
  TrajectoryRecorder recorder_;
  std::vector<double> u_, full_, half_, two_, ut_;
};

}  // namespace

Trajectory advance(const SpectralField& u0, const DomainSpec& spec, const StepperConfig& cfg) {
  cfg.validate();
  require_size(u0, spec);
  return SpectralRun(u0, spec, cfg).run();
}

BlowUpFit estimate_blowup_time(std::span<const Time> t, std::span<const double> linf, double p) {
  if (t.size() != linf.size()) throw Error(ErrorCode::SizeMismatch, "time and amplitude series");
  const std::size_t n = t.size();
  if (n < 8) throw Error(ErrorCode::InsufficientTail, "fewer than 8 samples");

  // Last decade of strictly increasing amplitude, extended to 8 samples if
  // the decade is covered by fewer.
  const double last = linf[n - 1];
  std::size_t first = n - 1;
  while (first > 0 && linf[first - 1] < linf[first] && linf[first - 1] >= 0.1 * last) --first;
  while (n - first < 8 && first > 0 && linf[first - 1] < linf[first]) --first;
  const std::size_t m = n - first;
  if (m < 8 || !(linf[n - 1] > linf[first]))
    throw Error(ErrorCode::InsufficientTail, "fewer than 8 strictly growing tail samples");

  // y = linf^{-(p-1)} is linear in t under the self-similar ansatz; fit in
  // coordinates relative to the last sample to keep precision near T.
  const Time t_last = t[n - 1];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < n; ++i) {
    const double x = static_cast<double>(t[i] - t_last);
    const double y = std::pow(linf[i], -(p - 1.0));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double md = static_cast<double>(m);
  const double denom = md * sxx - sx * sx;
  if (!(denom > 0.0)) throw Error(ErrorCode::InsufficientTail, "degenerate tail times");
  const double slope = (md * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / md;
  if (!(slope < 0.0)) throw Error(ErrorCode::InsufficientTail, "tail does not approach a singularity");
  double remaining = -intercept / slope;
  if (!(remaining > 0.0)) remaining = std::pow(last, -(p - 1.0)) / -slope;

  BlowUpFit fit;
  fit.T = t_last + static_cast<Time>(remaining);
  fit.tail_samples = m;
  // log linf = c - gamma log(T - t)
  double lx = 0, ly = 0, lxx = 0, lxy = 0;
  for (std::size_t i = first; i < n; ++i) {
    const double x = std::log(remaining - static_cast<double>(t[i] - t_last));
    const double y = std::log(linf[i]);
    lx += x;
    ly += y;
    lxx += x * x;
    lxy += x * y;
  }
  const double ldenom = md * lxx - lx * lx;
  fit.exponent = ldenom > 0.0 ? -(md * lxy - lx * ly) / ldenom : 0.0;
  return fit;
}

BlowUpFit estimate_blowup_time(const Trajectory& traj) {
  if (traj.outcome.kind != OutcomeKind::BlowUp)
    throw Error(ErrorCode::InsufficientTail, "trajectory did not blow up");
  std::vector<Time> t;
  std::vector<double> linf;
  for (const auto& s : traj.samples) {
    t.push_back(s.t);
    linf.push_back(s.linf);
  }
  return estimate_blowup_time(t, linf, traj.spec.p());
}

}  // namespace thinfilm
