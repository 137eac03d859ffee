#include "roughflow/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughflow/bump.hpp"
#include "roughflow/error.hpp"
#include "roughflow/holder.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {
namespace {

void check_problem(const PdeProblem& p) {
  require(p.lambda > 0.0 && std::isfinite(p.lambda), "damping lambda must be positive");
  require(p.kappa > 0.0, "laplacian coefficient must be positive");
  require(p.drift.torus() == p.source.torus(), "drift and source must share a torus");
  require(p.drift.grid() == p.source.grid(), "drift and source must share a time grid");
  require(p.drift.components() == p.drift.torus().dimension(), "drift must be a d-vector field");
}

double sup_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

// Sweeps of the discrete mild map over the whole time grid.
class MildSweeper {
 public:
  explicit MildSweeper(const PdeProblem& p)
      : p_(p),
        torus_(p.drift.torus()),
        d_(torus_.dimension()),
        nc_(p.source.components()),
        m_(p.drift.grid().steps()),
        fft_(torus_) {
    const double dt = p.drift.grid().dt();
    const std::size_t ns = fft_.spectrum_size();
    e_.resize(ns);
    w_.resize(ns);
    kv_.resize(ns);
    nyq_.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
      const Point k = fft_.wavevector(i);
      const double a = p.lambda + p.kappa * (k[0] * k[0] + k[1] * k[1]);
      e_[i] = std::exp(-a * dt);
      w_[i] = -std::expm1(-a * dt) / a;
      kv_[i] = k;
      nyq_[i] = fft_.is_nyquist(i);
    }
    b_.reserve(m_);
    f_.reserve(m_);
    for (int n = 0; n < m_; ++n) {
      b_.push_back(p.drift.cell_value(n));
      f_.push_back(p.source.cell_value(n));
    }
  }

  /// One sweep. With `jacobi` the left node uses the old iterate too and
  /// nothing is written; returns the sup gap between new and old slices.
  double sweep(std::vector<GridField>& v, std::vector<GridField>& g, bool jacobi) {
    const std::size_t np = torus_.size();
    std::vector<double> src(np), out(np);
    std::vector<Complex> fhat, vhat;
    GridField vnew(torus_, nc_), gnew(torus_, nc_ * d_);
    double gap = 0.0;
    // Spectra of the current left node, one per component.
    std::vector<std::vector<Complex>> left(nc_);
    for (int c = 0; c < nc_; ++c) left[c].assign(fft_.spectrum_size(), Complex(0.0));
    for (int n = 0; n < m_; ++n) {
      const GridField& b = b_[n];
      const GridField& f = f_[n];
      if (jacobi && n > 0)
        for (int c = 0; c < nc_; ++c) fft_.forward(v[n].component(c), left[c]);
      for (int c = 0; c < nc_; ++c) {
        for (std::size_t x = 0; x < np; ++x) {
          double adv = 0.0;
          for (int j = 0; j < d_; ++j)
            adv += b.at(x, j) * 0.5 * (g[n].at(x, c * d_ + j) + g[n + 1].at(x, c * d_ + j));
          src[x] = f.at(x, c) - adv;
        }
        fft_.forward(src, fhat);
        vhat.resize(fhat.size());
        for (std::size_t i = 0; i < fhat.size(); ++i) vhat[i] = e_[i] * left[c][i] + w_[i] * fhat[i];
        fft_.inverse(vhat, out);
        vnew.set_component(c, out);
        for (int j = 0; j < d_; ++j) {
          std::vector<Complex> dh(vhat.size());
          for (std::size_t i = 0; i < vhat.size(); ++i)
            dh[i] = nyq_[i] ? Complex(0.0) : Complex(0.0, kv_[i][j]) * vhat[i];
          fft_.inverse(dh, out);
          for (std::size_t x = 0; x < np; ++x) gnew.at(x, c * d_ + j) = out[x];
        }
        if (!jacobi) left[c] = vhat;
      }
      if (!vnew.all_finite()) fail(ErrorCode::non_finite, "mild iteration produced non-finite values");
      gap = std::max(gap, sup_diff(vnew, v[n + 1]));
      if (!jacobi) {
        v[n + 1] = vnew;
        g[n + 1] = gnew;
      }
    }
    return gap;
  }

 private:
  const PdeProblem& p_;
  Torus torus_;
  int d_;
  int nc_;
  int m_;
  Spectral fft_;
  std::vector<double> e_, w_;
  std::vector<Point> kv_;
  std::vector<bool> nyq_;
  std::vector<GridField> b_, f_;
};

void summarize(PdeSolution& s) {
  const int d = s.v.torus().dimension();
  const int nc = s.v.components();
  double c1 = 0.0, gs = 0.0;
  for (std::size_t k = 0; k < s.v.size(); ++k) {
    const GridField& v = s.v.slice(k);
    const GridField& g = s.gradient.slice(k);
    for (int c = 0; c < nc; ++c) {
      double vs = 0.0;
      std::vector<double> gj(d, 0.0);
      for (std::size_t x = 0; x < v.points(); ++x) {
        vs = std::max(vs, std::abs(v.at(x, c)));
        for (int j = 0; j < d; ++j) gj[j] = std::max(gj[j], std::abs(g.at(x, c * d + j)));
      }
      const double gm = *std::max_element(gj.begin(), gj.end());
      c1 = std::max(c1, vs + gm);
      gs = std::max(gs, gm);
    }
  }
  s.linf_c1 = c1;
  s.grad_sup = gs;
}

}  // namespace

PdeSolution solve_mild(const PdeProblem& problem, double tol, int max_iter) {
  check_problem(problem);
  require(tol > 0.0, "tolerance must be positive");
  require(max_iter >= 1, "max_iter must be positive");
  const Torus& torus = problem.drift.torus();
  const int d = torus.dimension();
  const int nc = problem.source.components();
  const TimeGrid grid = problem.drift.grid();
  const int m = grid.steps();

  std::vector<GridField> v(m + 1, GridField(torus, nc));
  std::vector<GridField> g(m + 1, GridField(torus, nc * d));
  MildSweeper sweeper(problem);

  double prev = std::numeric_limits<double>::infinity();
  int stalls = 0;
  int it = 0;
  double residual = std::numeric_limits<double>::infinity();
  for (;;) {
    if (it >= max_iter)
      fail(ErrorCode::max_iter_exceeded, "mild iteration did not converge in " + std::to_string(max_iter) +
                                             " sweeps (gap " + std::to_string(prev) + ")");
    const double gap = sweeper.sweep(v, g, false);
    ++it;
    if (gap < tol) {
      residual = sweeper.sweep(v, g, true);
      if (residual < tol) break;
    }
    if (gap >= prev && gap >= tol) {
      if (++stalls >= 5)
        fail(ErrorCode::non_contraction, "iterate gap failed to decrease for 5 sweeps (gap " +
                                             std::to_string(gap) + ")");
    } else {
      stalls = 0;
    }
    prev = gap;
  }

  const double q = problem.source.q();
  const double alpha = problem.source.alpha();
  PdeSolution sol{TimeIndexedField(grid, TimeSampling::nodes, std::move(v), q, alpha),
                  TimeIndexedField(grid, TimeSampling::nodes, std::move(g), q, alpha),
                  it,
                  residual,
                  0.0,
                  0.0,
                  std::nullopt};
  summarize(sol);
  return sol;
}

TimeIndexedField time_derivative(const PdeProblem& problem, const PdeSolution& sol) {
  const Torus& torus = sol.v.torus();
  const int d = torus.dimension();
  const int nc = sol.v.components();
  Spectral fft(torus);
  std::vector<GridField> out;
  out.reserve(sol.v.size());
  for (std::size_t k = 0; k < sol.v.size(); ++k) {
    const GridField& v = sol.v.slice(k);
    const GridField& g = sol.gradient.slice(k);
    const GridField& b = problem.drift.node_value(static_cast<int>(k));
    const GridField& f = problem.source.node_value(static_cast<int>(k));
    GridField lap = laplacian(fft, v);
    GridField dt(torus, nc);
    for (std::size_t x = 0; x < v.points(); ++x)
      for (int c = 0; c < nc; ++c) {
        double adv = 0.0;
        for (int j = 0; j < d; ++j) adv += b.at(x, j) * g.at(x, c * d + j);
        dt.at(x, c) = problem.kappa * lap.at(x, c) - problem.lambda * v.at(x, c) - adv + f.at(x, c);
      }
    out.push_back(std::move(dt));
  }
  return TimeIndexedField(sol.v.grid(), TimeSampling::nodes, std::move(out), sol.v.q(), sol.v.alpha());
}

PdeNormReport norm_report(const PdeProblem& problem, const PdeSolution& sol, int stride) {
  require(stride >= 1, "stride must be positive");
  const std::size_t n = sol.v.size();
  const double alpha = sol.v.alpha();
  const double q = sol.v.q();
  TimeIndexedField dtv = time_derivative(problem, sol);
  std::vector<double> c2a(n), c1a(n), dta(n);
  for (std::size_t k = 0; k < n; k += stride) {
    c2a[k] = slice_norm(sol.v.slice(k), NormKind::C2a, alpha);
    c1a[k] = slice_norm(sol.v.slice(k), NormKind::C1a, alpha);
    dta[k] = slice_norm(dtv.slice(k), NormKind::C0a, alpha);
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t base = (k / stride) * stride;
    c2a[k] = c2a[base];
    c1a[k] = c1a[base];
    dta[k] = dta[base];
  }
  PdeNormReport r;
  r.lq_c2a = lq_time_norm(c2a, sol.v.grid(), TimeSampling::nodes, q);
  r.linf_c1a = *std::max_element(c1a.begin(), c1a.end());
  r.dt_lq_c0a = lq_time_norm(dta, sol.v.grid(), TimeSampling::nodes, q);
  return r;
}

AprioriReport verify_apriori(const PdeProblem& problem, const std::vector<double>& scales,
                             double tol, int norm_stride) {
  require(!scales.empty(), "need at least one scale");
  AprioriReport rep;
  const PdeSolution base = solve_mild(problem, tol);
  rep.base_norm = norm_report(problem, base, norm_stride).w_norm();
  std::vector<std::pair<double, double>> pts;
  for (double s : scales) {
    require(s >= 0.0, "scales must be nonnegative");
    PdeProblem scaled = problem;
    for (std::size_t k = 0; k < scaled.source.size(); ++k) scaled.source.slice(k) *= s;
    const PdeSolution sol = solve_mild(scaled, std::max(tol * s, 1e-300));
    const double w = norm_report(scaled, sol, norm_stride).w_norm();
    rep.scales.push_back(s);
    rep.w_norms.push_back(w);
    rep.max_proportionality_error = std::max(rep.max_proportionality_error, std::abs(w - s * rep.base_norm));
    pts.emplace_back(s, w);
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].second < pts[i - 1].second) rep.monotone = false;
  return rep;
}

TuneResult tune_lambda(const PdeProblem& problem, double eta, double tol, int max_iter, double lambda0) {
  require(eta > 0.0, "target eta must be positive");
  require(lambda0 > 0.0, "initial lambda must be positive");
  std::vector<std::pair<double, double>> curve;
  PdeProblem trial = problem;
  double lambda = lambda0;
  for (int k = 0; k <= 40; ++k, lambda *= 2.0) {
    trial.lambda = lambda;
    try {
      PdeSolution sol = solve_mild(trial, tol, max_iter);
      curve.emplace_back(lambda, sol.linf_c1);
      if (sol.linf_c1 <= eta) return TuneResult{lambda, std::move(sol), std::move(curve)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::non_contraction && e.code() != ErrorCode::max_iter_exceeded) throw;
      curve.emplace_back(lambda, std::numeric_limits<double>::infinity());
    }
  }
  fail(ErrorCode::lambda_search_exhausted, "no lambda up to 2^40 met the target");
}

StabilityReport verify_stability(const PdeProblem& limit, const std::vector<PdeProblem>& sequence,
                                  double final_tol, double tol) {
  StabilityReport rep;
  const PdeSolution ref = solve_mild(limit, tol);
  Spectral fft(limit.drift.torus());
  for (const auto& p : sequence) {
    const PdeSolution s = solve_mild(p, tol);
    require(s.v.size() == ref.v.size() && s.v.torus() == ref.v.torus(), "sequence grids must match limit");
    StabilityGap gap;
    std::vector<double> c2(s.v.size());
    for (std::size_t k = 0; k < s.v.size(); ++k) {
      const GridField dv = s.v.slice(k) - ref.v.slice(k);
      const GridField dg = s.gradient.slice(k) - ref.gradient.slice(k);
      gap.linf_c0 = std::max(gap.linf_c0, dv.sup_norm());
      gap.linf_c1 = std::max(gap.linf_c1, dv.sup_norm() + dg.sup_norm());
      c2[k] = dv.sup_norm() + dg.sup_norm() + hessian(fft, dv).sup_norm();
    }
    gap.lq_c2 = lq_time_norm(c2, s.v.grid(), TimeSampling::nodes, s.v.q());
    rep.gaps.push_back(gap);
  }
  for (std::size_t i = 1; i < rep.gaps.size(); ++i)
    if (rep.gaps[i].linf_c1 > 1.2 * rep.gaps[i - 1].linf_c1) rep.monotone = false;
  rep.converged = rep.gaps.empty() || rep.gaps.back().linf_c1 <= final_tol;
  return rep;
}

namespace {

double bump1(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }
double bump1_prime(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return bump1(s) * (-2.0 * s / (w * w));
}

}  // namespace

double weak_form_residual(const PdeProblem& problem, const PdeSolution& sol,
                          const std::vector<SpaceTimeBump>& bumps) {
  const Torus& torus = sol.v.torus();
  const int d = torus.dimension();
  const int nc = sol.v.components();
  const TimeGrid grid = sol.v.grid();
  const double dt = grid.dt();
  const double dv = torus.cell_volume();
  Spectral fft(torus);
  std::vector<GridField> lap;
  lap.reserve(sol.v.size());
  for (const auto& s : sol.v.slices()) lap.push_back(laplacian(fft, s));

  double worst = 0.0;
  for (const auto& bump : bumps) {
    Bump space{bump.center, bump.radius, d};
    std::vector<double> phix(torus.size());
    for (std::size_t x = 0; x < torus.size(); ++x) {
      const Point p = torus.coordinate(x);
      Point y{};
      for (int i = 0; i < d; ++i) y[i] = torus.displacement(p[i], bump.center[i]);
      phix[x] = space.value_at(y);
    }
    for (int c = 0; c < nc; ++c) {
      double lhs = 0.0, rhs = 0.0;
      for (int n = 0; n < grid.steps(); ++n) {
        const double tm = grid.midpoint(n);
        const double s = (tm - bump.t_center) / bump.t_radius;
        const double pt = bump1(s);
        const double dpt = bump1_prime(s) / bump.t_radius;
        if (pt == 0.0 && dpt == 0.0) continue;
        const GridField b = problem.drift.cell_value(n);
        const GridField f = problem.source.cell_value(n);
        const GridField& v0 = sol.v.slice(n);
        const GridField& v1 = sol.v.slice(n + 1);
        const GridField& g0 = sol.gradient.slice(n);
        const GridField& g1 = sol.gradient.slice(n + 1);
        for (std::size_t x = 0; x < torus.size(); ++x) {
          if (phix[x] == 0.0) continue;
          const double vm = 0.5 * (v0.at(x, c) + v1.at(x, c));
          double adv = 0.0;
          for (int j = 0; j < d; ++j) adv += b.at(x, j) * 0.5 * (g0.at(x, c * d + j) + g1.at(x, c * d + j));
          const double lm = 0.5 * (lap[n].at(x, c) + lap[n + 1].at(x, c));
          lhs += vm * dpt * phix[x];
          rhs += (adv + problem.lambda * vm - problem.kappa * lm - f.at(x, c)) * pt * phix[x];
        }
      }
      worst = std::max(worst, std::abs(lhs - rhs) * dt * dv);
    }
  }
  return worst;
}

}  // namespace roughflow
