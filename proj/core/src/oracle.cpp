#include "thinfilm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thinfilm/integrator.hpp"
#include "thinfilm/spectral.hpp"

namespace thinfilm::oracle {

PentadiagonalSolver::PentadiagonalSolver(std::span<const double> diag, std::span<const double> off1,
                                         std::span<const double> off2)
    : d_(diag.size()), l1_(diag.size(), 0.0), l2_(diag.size(), 0.0) {
  const std::size_t n = diag.size();
  if (off1.size() != n || off2.size() != n) throw Error(ErrorCode::SizeMismatch, "band sizes");
  for (std::size_t i = 0; i < n; ++i) {
    double di = diag[i];
    if (i >= 2) {
      l2_[i] = off2[i] / d_[i - 2];
      di -= l2_[i] * l2_[i] * d_[i - 2];
    }
    if (i >= 1) {
      double b = off1[i];
      if (i >= 2) b -= l2_[i] * l1_[i - 1] * d_[i - 2];
      l1_[i] = b / d_[i - 1];
      di -= l1_[i] * l1_[i] * d_[i - 1];
    }
    if (!(std::isfinite(di) && di > 0.0)) {
      std::ostringstream os;
      os << "non-positive pivot " << di << " at row " << i;
      throw Error(ErrorCode::LinearSolveFailure, os.str());
    }
    d_[i] = di;
  }
}

void PentadiagonalSolver::solve(std::span<const double> rhs, std::span<double> x) const {
  const std::size_t n = d_.size();
  if (rhs.size() != n || x.size() != n) throw Error(ErrorCode::SizeMismatch, "solve sizes");
  for (std::size_t i = 0; i < n; ++i) {
    double y = rhs[i];
    if (i >= 1) y -= l1_[i] * x[i - 1];
    if (i >= 2) y -= l2_[i] * x[i - 2];
    x[i] = y;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] /= d_[i];
  for (std::size_t i = n; i-- > 0;) {
    if (i + 1 < n) x[i] -= l1_[i + 1] * x[i + 1];
    if (i + 2 < n) x[i] -= l2_[i + 2] * x[i + 2];
  }
}

namespace {

/// Grid value with even reflection through x = 0 and x = a.
inline double reflected(std::span<const double> u, std::ptrdiff_t j) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  if (j < 0) j = -j - 1;
  if (j >= n) j = 2 * n - j - 1;
  return u[static_cast<std::size_t>(j)];
}

}  // namespace

void apply_biharmonic(std::span<const double> u, double h, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const double s = 1.0 / (h * h * h * h);
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] =
        s * (reflected(u, j - 2) - 4.0 * reflected(u, j - 1) + 6.0 * u[static_cast<std::size_t>(j)] -
             4.0 * reflected(u, j + 1) + reflected(u, j + 2));
  }
}

void apply_second_difference(std::span<const double> u, double h, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  const double s = 1.0 / (h * h);
  for (std::ptrdiff_t j = 0; j < n; ++j)
    out[static_cast<std::size_t>(j)] =
        s * (reflected(u, j - 1) - 2.0 * u[static_cast<std::size_t>(j)] + reflected(u, j + 1));
}

void FdConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (!(dt > 0.0)) fail("fd dt must be positive");
  if (!(dt_min > 0.0 && dt_min <= dt)) fail("fd dt_min must lie in (0, dt]");
  if (!(t_horizon > 0.0)) fail("fd t_horizon must be positive");
  if (!(u_max > 0.0)) fail("fd u_max must be positive");
  if (!(max_rel_change > 0.0)) fail("fd max_rel_change must be positive");
  if (sample_stride == 0) fail("fd sample_stride must be at least 1");
}

namespace {

class FdRun {
 public:
  FdRun(const GridField& u0, const DomainSpec& spec, const FdConfig& cfg)
      : spec_(spec), cfg_(cfg), n_(spec.n_modes()), h_(spec.a() / static_cast<double>(n_)),
        traj_(spec), recorder_(traj_, cfg.sample_stride, cfg.checkpoint_stride),
        u_(u0.values().begin(), u0.values().end()), next_(n_), rhs_(n_), Au_(n_), N_(n_),
        N_prev_(n_), work_(n_) {
    traj_.solver = "fd-crank-nicolson-ab2";
    project_mean(u_);
  }

  Trajectory run() {
    Time t = 0;
    double linf = 0.0;
    try {
      source(u_, N_);
      linf = record(t, 0.0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Overflow) throw;
      return blowup(BlowUpTrigger::Overflow, INFINITY, 0.0, e.what());
    }
    double dt = cfg_.dt;
    double dt_prev = 0.0;  // 0: no history yet, use forward Euler for the source
    const Time horizon = cfg_.t_horizon;
    std::size_t attempts = 0;
    while (t < horizon) {
      if (++attempts > cfg_.max_steps) {
        traj_.outcome = RunOutcome::inconclusive(t, "fd step budget exhausted");
        return finish();
      }
      const Time remaining = horizon - t;
      const bool last = static_cast<Time>(dt) * (1.0L + 1e-9L) >= remaining;
      const double h_try = last ? static_cast<double>(remaining) : dt;

      bool ok = true;
      std::string why;
      try {
        take_step(h_try, dt_prev);
        double peak = 0.0;
        for (double v : next_) {
          if (!std::isfinite(v)) throw Error(ErrorCode::Overflow, "non-finite fd state");
          peak = std::max(peak, std::abs(v));
        }
        if (std::abs(peak - linf) > cfg_.max_rel_change * std::max(linf, 1e-300)) {
          ok = false;
          why = "relative amplitude change above limit";
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Overflow && e.code() != ErrorCode::LinearSolveFailure) throw;
        ok = false;
        why = e.what();
      }
      if (!ok) {
        ++traj_.rejected_steps;
        dt = 0.5 * h_try;
        if (dt < cfg_.dt_min) {
          std::ostringstream os;
          os << "fd step halved below dt_min = " << cfg_.dt_min << " (" << why << ")";
          return blowup(BlowUpTrigger::StepCollapse, dt, cfg_.dt_min, os.str());
        }
        continue;
      }
      u_.swap(next_);
      N_prev_.swap(N_);
      t = last ? horizon : t + static_cast<Time>(h_try);
      dt_prev = h_try;
      ++traj_.accepted_steps;
      try {
        source(u_, N_);
        linf = record(t, h_try);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Overflow) throw;
        return blowup(BlowUpTrigger::Overflow, INFINITY, 0.0, e.what());
      }
      if (linf > cfg_.u_max) {
        std::ostringstream os;
        os << "||u||_inf = " << linf << " exceeded u_max = " << cfg_.u_max;
        return blowup(BlowUpTrigger::Amplitude, linf, cfg_.u_max, os.str());
      }
    }
    std::ostringstream os;
    os << "reached t_horizon = " << cfg_.t_horizon << " with ||u||_inf = " << linf;
    traj_.outcome = RunOutcome::horizon_reached(t, os.str());
    return finish();
  }

 private:
  static void project_mean(std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
  }

  void source(std::span<const double> u, std::vector<double>& out) {
    const double p = spec_.p();
    double m = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double f = signed_power(u[j], p);
      if (!std::isfinite(f)) throw Error(ErrorCode::Overflow, "|u|^p overflows on the fd grid");
      out[j] = f;
      m += f;
    }
    m /= static_cast<double>(n_);
    for (double& f : out) f -= m;
  }

  const PentadiagonalSolver& solver(double dt) {
    if (!solver_ || solver_dt_ != dt) {
      const double s = 0.5 * dt / (h_ * h_ * h_ * h_);
      std::vector<double> diag(n_), off1(n_, 0.0), off2(n_, 0.0);
      for (std::size_t i = 0; i < n_; ++i) {
        diag[i] = 1.0 + 6.0 * s;
        if (i >= 1) off1[i] = -4.0 * s;
        if (i >= 2) off2[i] = s;
      }
      // Reflection closures: rows 0, 1, N-2, N-1 of the biharmonic stencil.
      diag[0] = 1.0 + 2.0 * s;
      off1[1] = -3.0 * s;
      diag[1] = 1.0 + 6.0 * s;
      diag[n_ - 1] = 1.0 + 2.0 * s;
      off1[n_ - 1] = -3.0 * s;
      solver_.emplace(diag, off1, off2);
      solver_dt_ = dt;
    }
    return *solver_;
  }

  void take_step(double dt, double dt_prev) {
    apply_biharmonic(u_, h_, Au_);
    const double w = dt_prev > 0.0 ? dt / dt_prev : 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double src = dt_prev > 0.0 ? (1.0 + 0.5 * w) * N_[j] - 0.5 * w * N_prev_[j] : N_[j];
      rhs_[j] = u_[j] - 0.5 * dt * Au_[j] + dt * src;
    }
    solver(dt).solve(rhs_, next_);
    project_mean(next_);
  }

  double record(Time t, double dt) {
    FieldNorms n;
    const double p = spec_.p();
    double mass = 0.0, l2 = 0.0, lp = 0.0, peak = 0.0;
    for (double v : u_) {
      mass += v;
      l2 += v * v;
      lp += std::abs(v) * std::abs(signed_power(v, p));
      peak = std::max(peak, std::abs(v));
    }
    apply_second_difference(u_, h_, work_);
    double h2 = 0.0;
    for (double v : work_) h2 += v * v;
    apply_biharmonic(u_, h_, Au_);
    double ut2 = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double ut = N_[j] - Au_[j];
      ut2 += ut * ut;
    }
    n.l2sq = h_ * l2;
    n.lp1 = h_ * lp;
    n.linf = peak;
    n.h2sq = h_ * h2;
    if (!std::isfinite(n.lp1) || !std::isfinite(n.h2sq)) throw Error(ErrorCode::Overflow, "fd norms overflow");
    recorder_.record(t, dt, h_ * mass, n, h_ * ut2, [this] { return state(); });
    return peak;
  }

  SpectralField state() const { return to_spectral(GridField(u_), spec_); }

  Trajectory finish() {
    recorder_.finish([this] { return state(); });
    return std::move(traj_);
  }

  Trajectory blowup(BlowUpTrigger trigger, double value, double threshold, std::string evidence) {
    recorder_.finish([this] {
      const bool finite = std::all_of(u_.begin(), u_.end(), [](double v) { return std::isfinite(v); });
      return finite ? state() : SpectralField::zero(spec_);
    });
    const Time t_end = traj_.samples.empty() ? Time{0} : traj_.samples.back().t;
    Time estimate = t_end;
    try {
      std::vector<Time> ts;
      std::vector<double> linf;
      for (const auto& s : traj_.samples) {
        ts.push_back(s.t);
        linf.push_back(s.linf);
      }
      const BlowUpFit fit = estimate_blowup_time(ts, linf, spec_.p());
      estimate = fit.T;
      std::ostringstream os;
      os << "; fitted rate exponent " << fit.exponent << " over " << fit.tail_samples << " samples";
      evidence += os.str();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientTail) throw;
      evidence += "; blow-up time estimate falls back to t_end";
    }
    traj_.outcome = RunOutcome::blow_up(t_end, estimate, trigger, value, threshold, std::move(evidence));
    return std::move(traj_);
  }

  DomainSpec spec_;
  FdConfig cfg_;
  std::size_t n_;
  double h_;
  Trajectory traj_;
  TrajectoryRecorder recorder_;
  std::vector<double> u_, next_, rhs_, Au_, N_, N_prev_, work_;
  std::optional<PentadiagonalSolver> solver_;
  double solver_dt_ = 0.0;
};

}  // namespace

Trajectory fd_advance(const GridField& u0, const DomainSpec& spec, const FdConfig& cfg) {
  cfg.validate();
  require_size(u0, spec);
  if (spec.n_modes() < 64) throw Error(ErrorCode::ConfigInvalid, "fd grid needs at least 64 points");
  return FdRun(u0, spec, cfg).run();
}

namespace {

double interp(Time t0, double f0, Time t1, double f1, Time t) {
  if (t1 == t0) return f0;
  const double w = static_cast<double>((t - t0) / (t1 - t0));
  return (1.0 - w) * f0 + w * f1;
}

}  // namespace

WeakFormReport weak_form_residual(const Trajectory& traj, std::size_t n_test, std::size_t n_time) {
  const auto& cps = traj.checkpoints;
  if (cps.size() < 3) throw Error(ErrorCode::NoCheckpoints, "weak form needs at least 3 checkpoints");
  if (n_test == 0 || n_time == 0) throw Error(ErrorCode::ConfigInvalid, "empty test-function set");
  const DomainSpec& spec = traj.spec;
  const std::size_t nc = spec.n_coeffs();

  // G_k(s) = lambda_k c_k - source_k at every checkpoint, for k <= n_test.
  SpectralWorkspace ws(spec);
  std::vector<double> src(nc);
  const std::size_t kmax = std::min(n_test, nc);
  std::vector<std::vector<double>> C(cps.size(), std::vector<double>(kmax));
  std::vector<std::vector<double>> G(cps.size(), std::vector<double>(kmax));
  for (std::size_t i = 0; i < cps.size(); ++i) {
    require_size(cps[i].field, spec);
    ws.source(cps[i].field.coeffs(), src);
    for (std::size_t k = 0; k < kmax; ++k) {
      C[i][k] = cps[i].field[k];
      G[i][k] = ws.symbol()[k] * cps[i].field[k] - src[k];
    }
  }

  WeakFormReport rep;
  rep.n_test = n_test;
  rep.n_time = n_time;
  rep.residuals.assign(n_test * n_time, 0.0);
  rep.reliable.resize(n_test);
  for (std::size_t k = 1; k <= n_test; ++k)
    rep.reliable[k - 1] = k <= nc && 3 * k <= 2 * spec.n_modes();

  const Time t_begin = cps.front().t;
  const Time t_end = cps.back().t;
  const std::size_t n_seg = n_time + 1;
  const Time width = (t_end - t_begin) / static_cast<Time>(n_seg);
  auto node = [&](std::size_t i) { return i == n_seg ? t_end : t_begin + width * static_cast<Time>(i); };
  const Time snap = width * 1e-9L;

  bool all_simpson = true;
  // integral over segment of (w0 + w1 * (s - s_i)/width) * X(s) for the
  // per-checkpoint series X; accumulates psi-weighted integrals.
  for (std::size_t seg = 0; seg < n_seg; ++seg) {
    const Time s0 = node(seg), s1 = node(seg + 1);
    // Checkpoints inside [s0, s1].
    std::size_t lo = 0;
    while (lo < cps.size() && cps[lo].t < s0 - snap) ++lo;
    std::size_t hi = lo;
    while (hi + 1 < cps.size() && cps[hi + 1].t <= s1 + snap) ++hi;
    const std::size_t count = hi >= lo ? hi - lo + 1 : 0;
    bool simpson = count >= 3 && (count - 1) % 2 == 0 && std::abs(static_cast<double>(cps[lo].t - s0)) <= static_cast<double>(snap) &&
                   std::abs(static_cast<double>(cps[hi].t - s1)) <= static_cast<double>(snap);
    if (simpson) {
      const Time step = (cps[hi].t - cps[lo].t) / static_cast<Time>(count - 1);
      for (std::size_t i = lo + 1; i <= hi; ++i)
        if (std::abs(static_cast<double>(cps[i].t - cps[i - 1].t - step)) > 1e-9 * static_cast<double>(step)) simpson = false;
    }
    all_simpson = all_simpson && simpson;

    // Hats touching this segment: m = seg (descending side) and m = seg + 1
    // (ascending side), restricted to 1..n_time.
    for (int side = 0; side < 2; ++side) {
      const std::size_t m = seg + static_cast<std::size_t>(side);
      if (m < 1 || m > n_time) continue;
      // psi on the segment: ascending (side 1) goes 0 -> 1, descending 1 -> 0.
      const double dpsi = (side == 1 ? 1.0 : -1.0) / static_cast<double>(width);
      auto psi = [&](Time s) {
        const double x = static_cast<double>((s - s0) / width);
        return side == 1 ? x : 1.0 - x;
      };
      for (std::size_t k = 0; k < kmax; ++k) {
        auto integrand = [&](std::size_t i) { return -dpsi * C[i][k] + psi(cps[i].t) * G[i][k]; };
        double sum = 0.0;
        if (simpson) {
          const double hstep = static_cast<double>((cps[hi].t - cps[lo].t) / static_cast<Time>(count - 1));
          for (std::size_t i = lo; i <= hi; ++i) {
            const double w = (i == lo || i == hi) ? 1.0 : ((i - lo) % 2 == 1 ? 4.0 : 2.0);
            sum += w * integrand(i);
          }
          sum *= hstep / 3.0;
        } else {
          // Trapezoid on the checkpoint grid, with linear interpolation at
          // segment ends that fall between checkpoints.
          std::vector<std::pair<Time, double>> pts;
          auto value_at = [&](Time s) {
            std::size_t j = 1;
            while (j + 1 < cps.size() && cps[j].t < s) ++j;
            const double c = interp(cps[j - 1].t, C[j - 1][k], cps[j].t, C[j][k], s);
            const double g = interp(cps[j - 1].t, G[j - 1][k], cps[j].t, G[j][k], s);
            return -dpsi * c + psi(s) * g;
          };
          pts.emplace_back(s0, value_at(s0));
          for (std::size_t i = 0; i < cps.size(); ++i)
            if (cps[i].t > s0 && cps[i].t < s1) pts.emplace_back(cps[i].t, integrand(i));
          pts.emplace_back(s1, value_at(s1));
          for (std::size_t i = 1; i < pts.size(); ++i)
            sum += 0.5 * static_cast<double>(pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second);
        }
        rep.residuals[k * n_time + (m - 1)] += 0.5 * spec.a() * sum;
      }
    }
  }
  for (auto& r : rep.residuals) r = std::abs(r);
  rep.quadrature = all_simpson ? "simpson" : "trapezoid";
  for (std::size_t k = 1; k <= n_test; ++k)
    if (rep.reliable[k - 1])
      for (std::size_t m = 1; m <= n_time; ++m) rep.max_reliable = std::max(rep.max_reliable, rep.at(k, m));
  return rep;
}

namespace {

struct Series {
  std::vector<Time> t;
  std::vector<double> J, I, l2;
};

Series series_of(const Trajectory& tr) {
  Series s;
  for (const auto& x : tr.samples) {
    s.t.push_back(x.t);
    s.J.push_back(x.J);
    s.I.push_back(x.I);
    s.l2.push_back(std::sqrt(x.l2sq));
  }
  return s;
}

double sample_at(const std::vector<Time>& t, const std::vector<double>& f, Time x) {
  auto it = std::lower_bound(t.begin(), t.end(), x);
  if (it == t.begin()) return f.front();
  if (it == t.end()) return f.back();
  const auto j = static_cast<std::size_t>(it - t.begin());
  return interp(t[j - 1], f[j - 1], t[j], f[j], x);
}

double rel_diff(double x, double y) {
  const double d = std::abs(x - y);
  const double s = std::max(std::abs(x), std::abs(y));
  return s > 0.0 ? d / s : 0.0;
}

double l2(std::span<const double> c) {
  double s = 0.0;
  for (double v : c) s += v * v;
  return std::sqrt(s);
}

}  // namespace

ComparisonReport compare(const Trajectory& a, const Trajectory& b) {
  if (a.samples.empty() || b.samples.empty()) throw Error(ErrorCode::EmptyTrajectory, "compare");
  ComparisonReport rep;
  rep.overlap_begin = std::max(a.samples.front().t, b.samples.front().t);
  rep.overlap_end = std::min(a.samples.back().t, b.samples.back().t);
  if (rep.overlap_end < rep.overlap_begin)
    throw Error(ErrorCode::DisjointRanges, "trajectories do not overlap in time");

  const Series sa = series_of(a), sb = series_of(b);
  const bool a_finer = sa.t.size() >= sb.t.size();
  const Series& fine = a_finer ? sa : sb;
  const Series& coarse = a_finer ? sb : sa;
  for (std::size_t i = 0; i < fine.t.size(); ++i) {
    const Time t = fine.t[i];
    if (t < rep.overlap_begin || t > rep.overlap_end) continue;
    rep.series.max_rel_J = std::max(rep.series.max_rel_J, rel_diff(fine.J[i], sample_at(coarse.t, coarse.J, t)));
    rep.series.max_rel_I = std::max(rep.series.max_rel_I, rel_diff(fine.I[i], sample_at(coarse.t, coarse.I, t)));
    rep.series.max_rel_l2 = std::max(rep.series.max_rel_l2, rel_diff(fine.l2[i], sample_at(coarse.t, coarse.l2, t)));
  }

  if (!a.checkpoints.empty() && !b.checkpoints.empty()) {
    const std::size_t width = std::max(a.checkpoints.front().field.size(), b.checkpoints.front().field.size());
    const auto& cb = b.checkpoints;
    for (const auto& cp : a.checkpoints) {
      if (cp.t < cb.front().t || cp.t > cb.back().t) continue;
      std::size_t j = 0;
      while (j + 1 < cb.size() && cb[j + 1].t < cp.t) ++j;
      const std::size_t j1 = std::min(j + 1, cb.size() - 1);
      const SpectralField x = cp.field.resized(width);
      const SpectralField y0 = cb[j].field.resized(width);
      const SpectralField y1 = cb[j1].field.resized(width);
      std::vector<double> diff(width), other(width);
      for (std::size_t k = 0; k < width; ++k) {
        other[k] = interp(cb[j].t, y0[k], cb[j1].t, y1[k], cp.t);
        diff[k] = x[k] - other[k];
      }
      const double scale = std::max(l2(x.coeffs()), l2(other));
      const double r = scale > 0.0 ? l2(diff) / scale : 0.0;
      rep.state_differences.emplace_back(cp.t, r);
      rep.max_rel_state = std::max(rep.max_rel_state, r);
    }
  }

  rep.kind_a = a.outcome.kind;
  rep.kind_b = b.outcome.kind;
  rep.kinds_agree = rep.kind_a == rep.kind_b;
  if (a.outcome.blowup_time_estimate && b.outcome.blowup_time_estimate) {
    const double ta = static_cast<double>(*a.outcome.blowup_time_estimate);
    const double tb = static_cast<double>(*b.outcome.blowup_time_estimate);
    rep.blowup_time_rel_diff = rel_diff(ta, tb);
  }
  return rep;
}

}  // namespace thinfilm::oracle
