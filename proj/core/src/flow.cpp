#include "roughflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughflow/drift.hpp"
#include "roughflow/error.hpp"
#include "roughflow/parallel.hpp"

namespace roughflow {
namespace {

constexpr int kD2 = kMaxDim * kMaxDim;

struct StepWork {
  double a[kMaxDim];
  double ga[kD2];
  double s[kD2];
  double gs[kD2 * kMaxDim];
  double hs[kD2 * kMaxDim * kMaxDim];
};

// One step from x over [t_from, t_to] (h = |t_to - t_from| > 0), increment dw
// (always W_later - W_earlier). Updates x and, when jac != nullptr, jac.
void step(const SdeSystem& sys, Scheme scheme, double t_from, double t_to, const Point& dw, Point& x,
          Mat* jac, StepWork& w) {
  const int d = sys.dimension();
  const double h = std::abs(t_to - t_from);
  const double sign = t_to >= t_from ? 1.0 : -1.0;
  const bool need_grad = jac != nullptr;
  const bool milstein = scheme == Scheme::milstein && !sys.additive();
  sys.drift(t_from, t_to, x, w.a, need_grad ? w.ga : nullptr);
  sys.diffusion(t_from, t_to, x, w.s, (need_grad || milstein) ? w.gs : nullptr,
                (need_grad && milstein) ? w.hs : nullptr);

  Point nx = x;
  for (int i = 0; i < d; ++i) {
    double inc = w.a[i] * h;
    for (int j = 0; j < d; ++j) inc += w.s[i * d + j] * dw[j];
    nx[i] += sign * inc;
  }
  // A_jl = dW_j dW_l - delta_jl h
  double A[kD2];
  if (milstein) {
    for (int j = 0; j < d; ++j)
      for (int l = 0; l < d; ++l) A[j * d + l] = dw[j] * dw[l] - (j == l ? h : 0.0);
    for (int i = 0; i < d; ++i) {
      double c = 0.0;
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) {
          double lj = 0.0;
          for (int m = 0; m < d; ++m) lj += w.s[m * d + j] * w.gs[(i * d + l) * d + m];
          c += A[j * d + l] * lj;
        }
      nx[i] += 0.5 * c;
    }
  }

  if (need_grad) {
    Mat D = identity_mat(d);
    for (int i = 0; i < d; ++i)
      for (int n = 0; n < d; ++n) {
        double v = w.ga[i * d + n] * h;
        if (!sys.additive())
          for (int j = 0; j < d; ++j) v += w.gs[(i * d + j) * d + n] * dw[j];
        D[mat_index(i, n)] += sign * v;
        if (milstein) {
          double c = 0.0;
          for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l) {
              double s = 0.0;
              for (int m = 0; m < d; ++m)
                s += w.gs[(m * d + j) * d + n] * w.gs[(i * d + l) * d + m] +
                     w.s[m * d + j] * w.hs[((i * d + l) * d + m) * d + n];
              c += A[j * d + l] * s;
            }
          D[mat_index(i, n)] += 0.5 * c;
        }
      }
    *jac = matmul(D, *jac, d);
  }
  x = nx;
}

bool finite_point(const Point& p, int d) {
  for (int i = 0; i < d; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

// Coarse nodes from `from` to `to` (inclusive), stride-spaced from `from`.
std::vector<int> coarse_nodes(int from, int to, int stride) {
  std::vector<int> n{from};
  const int dir = to >= from ? 1 : -1;
  int k = from;
  while (k != to) {
    k = dir > 0 ? std::min(k + stride, to) : std::max(k - stride, to);
    n.push_back(k);
  }
  return n;
}

}  // namespace

SdeSystem::SdeSystem(const TimeIndexedField& drift)
    : dim_(drift.torus().dimension()), horizon_(drift.grid().horizon()), drift_(drift) {
  require(drift.components() == dim_, "SDE drift must have d components");
}

SdeSystem::SdeSystem(const TimeIndexedField& drift, const TimeIndexedField& diffusion)
    : SdeSystem(drift) {
  require(diffusion.components() == dim_ * dim_, "SDE diffusion must have d*d components");
  require(diffusion.torus() == drift.torus(), "drift and diffusion tori differ");
  require(std::abs(diffusion.grid().horizon() - horizon_) < 1e-12, "drift and diffusion horizons differ");
  diffusion_ = SpaceTimeInterpolant(diffusion);
}

void SdeSystem::drift(double t_from, double t_to, const Point& x, double* a, double* grad) const {
  drift_.for_step(t_from, t_to).evaluate(x, a, grad, nullptr);
}

void SdeSystem::diffusion(double t_from, double t_to, const Point& x, double* s, double* grad,
                          double* hess) const {
  const int d = dim_;
  if (additive()) {
    for (int i = 0; i < d * d; ++i) s[i] = (i % (d + 1) == 0) ? 1.0 : 0.0;
    if (grad) std::fill(grad, grad + d * d * d, 0.0);
    if (hess) std::fill(hess, hess + d * d * d * d, 0.0);
    return;
  }
  diffusion_.for_step(t_from, t_to).evaluate(x, s, grad, hess);
}

ParticleState replicate(const std::vector<Point>& points, int paths, int dimension) {
  ParticleState s;
  s.points_per_path = static_cast<int>(points.size());
  s.x.reserve(points.size() * paths);
  for (int p = 0; p < paths; ++p) s.x.insert(s.x.end(), points.begin(), points.end());
  s.jac.assign(s.x.size(), identity_mat(dimension));
  return s;
}

ParticleState FlowEnsemble::state() const {
  ParticleState s{points_per_path, positions, jacobians};
  if (s.jac.empty()) s.jac.assign(s.x.size(), identity_mat(dimension));
  return s;
}

FlowEnsemble integrate(const SdeSystem& sys, const BrownianDriver& driver, int from, int to,
                       ParticleState start, const FlowOptions& opt) {
  const int d = sys.dimension();
  const TimeGrid& g = driver.grid();
  require(driver.dimension() == d, "driver and SDE dimensions differ");
  require(std::abs(g.horizon() - sys.horizon()) < 1e-12, "driver and coefficient horizons differ");
  require(from >= 0 && to >= 0 && from <= g.steps() && to <= g.steps(), "flow indices outside the time grid");
  require(opt.stride >= 1, "stride must be positive");
  require(start.points_per_path > 0 &&
              start.x.size() == static_cast<std::size_t>(start.points_per_path) * driver.paths(),
          "particle count must be points_per_path * paths");
  if (start.jac.size() != start.x.size()) start.jac.assign(start.x.size(), identity_mat(d));

  const std::vector<int> nodes = coarse_nodes(from, to, opt.stride);
  FlowEnsemble e;
  e.dimension = d;
  e.from = from;
  e.to = to;
  e.paths = driver.paths();
  e.points_per_path = start.points_per_path;
  e.initial = start.x;
  e.positions = std::move(start.x);
  if (opt.jacobians) e.jacobians = std::move(start.jac);
  const std::size_t n = e.positions.size();
  if (opt.record) {
    e.recorded_nodes = static_cast<int>(nodes.size());
    e.trajectory.assign(n * nodes.size() * d, 0.0);
    if (opt.jacobians) e.jacobian_trajectory.assign(n * nodes.size() * d * d, 0.0);
  }

  parallel_for(n, [&](std::size_t i) {
    const int path = static_cast<int>(i / e.points_per_path);
    Point x = e.positions[i];
    Mat J = opt.jacobians ? e.jacobians[i] : identity_mat(d);
    Mat* jp = opt.jacobians ? &J : nullptr;
    StepWork w{};
    auto record = [&](std::size_t node) {
      if (!opt.record) return;
      for (int c = 0; c < d; ++c) e.trajectory[(i * nodes.size() + node) * d + c] = x[c];
      if (opt.jacobians)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            e.jacobian_trajectory[(i * nodes.size() + node) * d * d + a * d + b] = J[mat_index(a, b)];
    };
    record(0);
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
      const int k0 = nodes[k], k1 = nodes[k + 1];
      const Point dw = driver.increment_between(path, std::min(k0, k1), std::max(k0, k1));
      step(sys, opt.scheme, g.node(k0), g.node(k1), dw, x, jp, w);
      if (!finite_point(x, d)) fail(ErrorCode::non_finite, "particle left the finite range");
      record(k + 1);
    }
    e.positions[i] = x;
    if (opt.jacobians) e.jacobians[i] = J;
  });
  return e;
}

FlowEnsemble integrate_forward(const SdeSystem& sys, const BrownianDriver& driver, int s, int t,
                               const std::vector<Point>& points, const FlowOptions& opt) {
  require(s <= t, "forward flow needs s <= t");
  return integrate(sys, driver, s, t, replicate(points, driver.paths(), sys.dimension()), opt);
}

FlowEnsemble integrate_backward(const SdeSystem& sys, const BrownianDriver& driver, int s, int t,
                                const std::vector<Point>& points, const FlowOptions& opt) {
  require(s <= t, "backward flow needs s <= t");
  return integrate(sys, driver, t, s, replicate(points, driver.paths(), sys.dimension()), opt);
}

FlowEnsemble flow_via_zvonkin(const ZvonkinMap& map, const SdeSystem& sys, const BrownianDriver& driver,
                              int from, int to, ParticleState start, const FlowOptions& opt) {
  const bool fwd = map.direction() == Direction::forward;
  require(fwd ? from <= to : from >= to, "flow direction does not match the Zvonkin map");
  const int d = sys.dimension();
  const TimeGrid& g = driver.grid();
  const int n_from = map.node(g.node(from));
  const int n_to = map.node(g.node(to));
  if (start.jac.size() != start.x.size()) start.jac.assign(start.x.size(), identity_mat(d));
  const std::vector<Point> original = start.x;
  parallel_for(start.x.size(), [&](std::size_t i) {
    const Mat G = map.jacobian(n_from, start.x[i]);
    start.jac[i] = matmul(G, start.jac[i], d);
    start.x[i] = map.apply(n_from, start.x[i]);
  });
  FlowEnsemble e = integrate(sys, driver, from, to, std::move(start), FlowOptions{opt.stride, opt.scheme, opt.jacobians, false});
  parallel_for(e.positions.size(), [&](std::size_t i) {
    const Point x = invert_map(map, n_to, e.positions[i]);
    if (opt.jacobians) e.jacobians[i] = matmul(inverse(map.jacobian(n_to, x), d), e.jacobians[i], d);
    e.positions[i] = x;
  });
  e.initial = original;
  return e;
}

FlowRoute direct_route(const SdeSystem& sys, const BrownianDriver& driver, FlowOptions opt) {
  return [&sys, &driver, opt](int from, int to, const ParticleState& start) {
    return integrate(sys, driver, from, to, start, opt);
  };
}

FlowRoute zvonkin_route(const ZvonkinMap& map, const SdeSystem& sys, const BrownianDriver& driver,
                        FlowOptions opt) {
  return [&map, &sys, &driver, opt](int from, int to, const ParticleState& start) {
    return flow_via_zvonkin(map, sys, driver, from, to, start, opt);
  };
}

ResidualStats residual(const std::vector<Point>& a, const std::vector<Point>& b, int d) {
  require(a.size() == b.size(), "residual needs equal particle counts");
  ResidualStats r;
  r.count = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += (a[i][c] - b[i][c]) * (a[i][c] - b[i][c]);
    const double e = std::sqrt(s);
    r.max = std::max(r.max, e);
    r.mean += e;
  }
  if (r.count) r.mean /= static_cast<double>(r.count);
  return r;
}

ResidualStats verify_flow_property(const FlowRoute& route, int s, int r, int t, const ParticleState& start) {
  require(s <= r && r <= t, "flow property needs s <= r <= t");
  const FlowEnsemble full = route(s, t, start);
  const FlowEnsemble first = route(s, r, start);
  const FlowEnsemble second = route(r, t, first.state());
  return residual(full.positions, second.positions, full.dimension);
}

ResidualStats verify_inverse_flow(const FlowRoute& forward, const FlowRoute& backward, int s, int t,
                                  const ParticleState& start) {
  const FlowEnsemble x = forward(s, t, start);
  const FlowEnsemble back = backward(t, s, x.state());
  return residual(back.positions, start.x, x.dimension);
}

namespace {

// sup over recorded nodes of |A - B| (positions) per particle
void path_sups(const FlowEnsemble& a, const FlowEnsemble& b, std::vector<double>& pos,
               std::vector<double>& jac) {
  const int d = a.dimension;
  const std::size_t nodes = static_cast<std::size_t>(a.recorded_nodes);
  pos.assign(a.particles(), 0.0);
  jac.assign(a.particles(), 0.0);
  for (std::size_t i = 0; i < a.particles(); ++i) {
    for (std::size_t k = 0; k < nodes; ++k) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = a.trajectory[(i * nodes + k) * d + c] - b.trajectory[(i * nodes + k) * d + c];
        s += diff * diff;
      }
      pos[i] = std::max(pos[i], std::sqrt(s));
      if (!a.jacobian_trajectory.empty()) {
        double q = 0.0;
        for (int c = 0; c < d * d; ++c) {
          const double diff = a.jacobian_trajectory[(i * nodes + k) * d * d + c] -
                              b.jacobian_trajectory[(i * nodes + k) * d * d + c];
          q += diff * diff;
        }
        jac[i] = std::max(jac[i], std::sqrt(q));
      }
    }
  }
}

// sup over lattice points of the path mean of x^p, with the standard error
// at the maximizing point.
std::pair<double, double> sup_moment(const std::vector<double>& sups, int paths, int points, double p) {
  double best = -1.0, best_se = 0.0;
  for (int i = 0; i < points; ++i) {
    double m = 0.0, m2 = 0.0;
    for (int path = 0; path < paths; ++path) {
      const double v = std::pow(sups[static_cast<std::size_t>(path) * points + i], p);
      m += v;
      m2 += v * v;
    }
    m /= paths;
    m2 /= paths;
    const double var = std::max(0.0, m2 - m * m) * paths / std::max(1, paths - 1);
    if (m > best) {
      best = m;
      best_se = std::sqrt(var / paths);
    }
  }
  return {best, best_se};
}

}  // namespace

StabilityCurve stability_sweep(const TimeIndexedField& b, const BrownianDriver& driver,
                               const StabilityOptions& opt) {
  require(!opt.eps.empty(), "stability sweep needs mollification scales");
  require(opt.p >= 1.0, "moment order must be >= 1");
  const Torus& torus = b.torus();
  const int d = torus.dimension();
  std::vector<Point> lattice;
  const double h = torus.length() / opt.lattice;
  for (int i = 0; i < opt.lattice; ++i) {
    if (d == 1) {
      lattice.push_back(Point{i * h, 0.0});
    } else {
      for (int j = 0; j < opt.lattice; ++j) lattice.push_back(Point{i * h, j * h});
    }
  }
  const FlowOptions fo{opt.stride, Scheme::euler, opt.gradients, true};
  const int T = driver.grid().steps();
  const SdeSystem ref_sys(mollify_drift(b, opt.eps_ref));
  const FlowEnsemble ref = integrate_forward(ref_sys, driver, 0, T, lattice, fo);

  StabilityCurve c;
  c.eps = opt.eps;
  std::vector<double> pos, jac;
  for (double eps : opt.eps) {
    const SdeSystem sys(mollify_drift(b, eps));
    const FlowEnsemble x = integrate_forward(sys, driver, 0, T, lattice, fo);
    path_sups(x, ref, pos, jac);
    const auto [v, se] = sup_moment(pos, driver.paths(), static_cast<int>(lattice.size()), opt.p);
    c.value.push_back(v);
    c.stderr_.push_back(se);
    if (opt.gradients) {
      const auto [gv, gse] = sup_moment(jac, driver.paths(), static_cast<int>(lattice.size()), opt.p);
      c.grad_value.push_back(gv);
      c.grad_stderr.push_back(gse);
    }
  }
  auto monotone = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > 1.2 * v[i - 1]) return false;
    return true;
  };
  auto se_ok = [](const std::vector<double>& v, const std::vector<double>& se) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!(se[i] <= 0.25 * v[i])) return false;
    return true;
  };
  auto spread = [](const std::vector<double>& v, const std::vector<double>& se) {
    return *std::max_element(se.begin(), se.end()) / *std::min_element(v.begin(), v.end());
  };
  c.positive = std::all_of(c.value.begin(), c.value.end(), [](double v) { return v > 0.0; });
  c.monotone = monotone(c.value);
  c.stderr_ok = se_ok(c.value, c.stderr_);
  c.stderr_spread = spread(c.value, c.stderr_);
  if (opt.gradients) {
    c.positive = c.positive && std::all_of(c.grad_value.begin(), c.grad_value.end(), [](double v) { return v > 0.0; });
    c.grad_monotone = monotone(c.grad_value);
    c.stderr_ok = c.stderr_ok && se_ok(c.grad_value, c.grad_stderr);
    c.stderr_spread = std::max(c.stderr_spread, spread(c.grad_value, c.grad_stderr));
  }
  if (c.positive && c.eps.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(c.eps.size());
    for (std::size_t i = 0; i < c.eps.size(); ++i) {
      const double lx = std::log(c.eps[i]), ly = std::log(c.value[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    c.empirical_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return c;
}

}  // namespace roughflow
