#include "roughflow/spde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughflow/error.hpp"
#include "roughflow/parallel.hpp"

namespace roughflow {
namespace {

bool inside(const Box& b, const Point& x, int d) {
  for (int i = 0; i < d; ++i)
    if (x[i] < b.lo[i] || x[i] >= b.hi[i]) return false;
  return true;
}

std::vector<int> coarse(int from, int to, int stride) {
  std::vector<int> n{from};
  int k = from;
  while (k != to) {
    k = to > from ? std::min(k + stride, to) : std::max(k - stride, to);
    n.push_back(k);
  }
  return n;
}

struct Quadrature {
  std::vector<Point> x;
  double w = 0.0;
};

Quadrature support_quadrature(const std::vector<Bump>& theta, int dim, int quad) {
  Point lo{}, hi{};
  for (int i = 0; i < dim; ++i) {
    lo[i] = std::numeric_limits<double>::infinity();
    hi[i] = -lo[i];
  }
  for (const Bump& b : theta)
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], b.center[i] - b.radius);
      hi[i] = std::max(hi[i], b.center[i] + b.radius);
    }
  Quadrature q;
  Point h{};
  q.w = 1.0;
  for (int i = 0; i < dim; ++i) {
    h[i] = (hi[i] - lo[i]) / quad;
    q.w *= h[i];
  }
  if (dim == 1) {
    for (int i = 0; i < quad; ++i) q.x.push_back(Point{lo[0] + (i + 0.5) * h[0], 0.0});
  } else {
    for (int i = 0; i < quad; ++i)
      for (int j = 0; j < quad; ++j) q.x.push_back(Point{lo[0] + (i + 0.5) * h[0], lo[1] + (j + 0.5) * h[1]});
  }
  return q;
}

WeakFormStats summarize(const std::vector<std::vector<double>>& res) {
  WeakFormStats s;
  for (std::size_t j = 0; j < res.size(); ++j) {
    double m2 = 0.0, ma = 0.0;
    for (double r : res[j]) {
      m2 += r * r;
      ma += std::abs(r);
    }
    const double n = static_cast<double>(res[j].size());
    s.rms = std::max(s.rms, std::sqrt(m2 / n));
    s.mean_abs = std::max(s.mean_abs, ma / n);
  }
  if (!res.empty()) s.per_path = res.front();
  return s;
}

}  // namespace

BVInitialData BVInitialData::smooth(int dim, std::function<double(const Point&)> f,
                                    std::function<Point(const Point&)> grad, double lo, double hi) {
  require(lo <= hi, "smooth datum range must satisfy lo <= hi");
  BVInitialData u;
  u.kind_ = Kind::smooth;
  u.dim_ = dim;
  u.f_ = std::move(f);
  u.grad_ = std::move(grad);
  u.lo_ = lo;
  u.hi_ = hi;
  return u;
}

BVInitialData BVInitialData::indicator(int dim, const Box& box) {
  BVInitialData u = piecewise_constant(dim, {Box{box.lo, box.hi, 1.0}});
  u.kind_ = Kind::indicator_of_box;
  return u;
}

BVInitialData BVInitialData::piecewise_constant(int dim, std::vector<Box> boxes) {
  require(!boxes.empty(), "piecewise-constant datum needs at least one box");
  for (const Box& b : boxes)
    for (int i = 0; i < dim; ++i) require(b.lo[i] < b.hi[i], "box must have positive extent");
  BVInitialData u;
  u.kind_ = Kind::piecewise_constant;
  u.dim_ = dim;
  u.boxes_ = std::move(boxes);
  // range over the cells of the box arrangement
  std::vector<double> ax[kMaxDim];
  for (int i = 0; i < dim; ++i) {
    for (const Box& b : u.boxes_) {
      ax[i].push_back(b.lo[i]);
      ax[i].push_back(b.hi[i]);
    }
    std::sort(ax[i].begin(), ax[i].end());
    std::vector<double> mids{ax[i].front() - 1.0, ax[i].back() + 1.0};
    for (std::size_t k = 0; k + 1 < ax[i].size(); ++k) mids.push_back(0.5 * (ax[i][k] + ax[i][k + 1]));
    ax[i] = mids;
  }
  u.lo_ = std::numeric_limits<double>::infinity();
  u.hi_ = -u.lo_;
  auto visit = [&](const Point& x) {
    const double v = u(x);
    u.lo_ = std::min(u.lo_, v);
    u.hi_ = std::max(u.hi_, v);
  };
  for (double x : ax[0]) {
    if (dim == 1) {
      visit(Point{x, 0.0});
    } else {
      for (double y : ax[1]) visit(Point{x, y});
    }
  }
  return u;
}

double BVInitialData::operator()(const Point& x) const {
  if (kind_ == Kind::smooth) return f_(x);
  double v = 0.0;
  for (const Box& b : boxes_)
    if (inside(b, x, dim_)) v += b.weight;
  return v;
}

Point BVInitialData::gradient(const Point& x) const {
  if (kind_ == Kind::smooth) return grad_(x);
  return Point{0.0, 0.0};
}

double BVInitialData::min_value() const { return lo_; }
double BVInitialData::max_value() const { return hi_; }

std::vector<BVInitialData::Facet> BVInitialData::jump_set(int per_side) const {
  std::vector<Facet> f;
  if (kind_ == Kind::smooth) return f;
  require(per_side >= 1, "per_side must be positive");
  for (const Box& b : boxes_) {
    const double w = std::abs(b.weight);
    if (dim_ == 1) {
      f.push_back(Facet{Point{b.lo[0], 0.0}, Point{-1.0, 0.0}, w});
      f.push_back(Facet{Point{b.hi[0], 0.0}, Point{1.0, 0.0}, w});
      continue;
    }
    const double sx = (b.hi[0] - b.lo[0]) / per_side, sy = (b.hi[1] - b.lo[1]) / per_side;
    for (int k = 0; k < per_side; ++k) {
      const double x = b.lo[0] + (k + 0.5) * sx, y = b.lo[1] + (k + 0.5) * sy;
      f.push_back(Facet{Point{x, b.lo[1]}, Point{0.0, -1.0}, w * sx});
      f.push_back(Facet{Point{x, b.hi[1]}, Point{0.0, 1.0}, w * sx});
      f.push_back(Facet{Point{b.lo[0], y}, Point{-1.0, 0.0}, w * sy});
      f.push_back(Facet{Point{b.hi[0], y}, Point{1.0, 0.0}, w * sy});
    }
  }
  return f;
}

double ParticleMeasure::mass() const noexcept {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

double ParticleMeasure::total_variation() const noexcept {
  double m = 0.0;
  for (double w : weights) m += std::abs(w);
  return m;
}

double ParticleMeasure::integrate(const std::function<double(const Point&)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * f(points[i]);
  return s;
}

ParticleMeasure sample_density(int dim, const Point& lo, const Point& hi, int per_axis,
                               const std::function<double(const Point&)>& rho) {
  require(per_axis >= 1, "per_axis must be positive");
  ParticleMeasure m;
  Point h{};
  double cell = 1.0;
  for (int i = 0; i < dim; ++i) {
    h[i] = (hi[i] - lo[i]) / per_axis;
    cell *= h[i];
  }
  auto add = [&](const Point& x) {
    m.points.push_back(x);
    m.weights.push_back(rho(x) * cell);
  };
  for (int i = 0; i < per_axis; ++i) {
    if (dim == 1) {
      add(Point{lo[0] + (i + 0.5) * h[0], 0.0});
    } else {
      for (int j = 0; j < per_axis; ++j) add(Point{lo[0] + (i + 0.5) * h[0], lo[1] + (j + 0.5) * h[1]});
    }
  }
  return m;
}

GridField TransportSolution::as_field(int path, const Torus& torus) const {
  require(static_cast<std::size_t>(points) == torus.size(), "evaluation points are not the torus grid");
  GridField f(torus, 1);
  for (int p = 0; p < points; ++p) f.at(static_cast<std::size_t>(p)) = at(path, p);
  return f;
}

TransportSolution solve_transport(const BVInitialData& u_in, const FlowEnsemble& backward) {
  require(backward.to <= backward.from, "transport needs a backward ensemble");
  TransportSolution s;
  s.paths = backward.paths;
  s.points = backward.points_per_path;
  s.values.resize(backward.particles());
  for (std::size_t i = 0; i < backward.particles(); ++i) s.values[i] = u_in(backward.positions[i]);
  return s;
}

std::vector<ParticleMeasure> solve_continuity(const ParticleMeasure& mu_in, const FlowEnsemble& forward) {
  require(forward.to >= forward.from, "continuity needs a forward ensemble");
  require(static_cast<std::size_t>(forward.points_per_path) == mu_in.points.size(),
          "ensemble does not match the particle measure");
  std::vector<ParticleMeasure> out(static_cast<std::size_t>(forward.paths));
  for (int p = 0; p < forward.paths; ++p) {
    const auto first = forward.positions.begin() + static_cast<std::ptrdiff_t>(p) * forward.points_per_path;
    for (std::size_t i = 0; i < mu_in.points.size(); ++i)
      require(forward.initial[p * mu_in.points.size() + i] == mu_in.points[i],
              "ensemble does not start at the particles");
    out[p].points.assign(first, first + forward.points_per_path);
    out[p].weights = mu_in.weights;
  }
  return out;
}

DualityReport verify_duality(const BVInitialData& u_in, const ParticleMeasure& mu_in, const FlowRoute& forward,
                             const FlowRoute& backward, int paths, const std::vector<int>& nodes) {
  const double i0 = mu_in.integrate([&](const Point& x) { return u_in(x); });
  const double scale = std::max(std::abs(i0), std::numeric_limits<double>::min());
  const ParticleState start = replicate(mu_in.points, paths, u_in.dimension());
  DualityReport r;
  r.nodes = nodes;
  for (int t : nodes) {
    const FlowEnsemble x = forward(0, t, start);
    const FlowEnsemble back = backward(t, 0, x.state());
    double worst = 0.0;
    for (int p = 0; p < paths; ++p) {
      double it = 0.0;
      for (std::size_t i = 0; i < mu_in.points.size(); ++i)
        it += mu_in.weights[i] * u_in(back.positions[p * mu_in.points.size() + i]);
      worst = std::max(worst, std::abs(it - i0) / scale);
    }
    r.drift.push_back(worst);
    r.max_relative_drift = std::max(r.max_relative_drift, worst);
  }
  return r;
}

void check_test_functions(const std::vector<Bump>& theta, double length) {
  require(!theta.empty(), "at least one test function is needed");
  for (const Bump& b : theta)
    require(b.radius > 0.0 && b.radius < 0.5 * length, "test function support must be compact inside the torus");
}

WeakFormStats verify_weak_form_continuity(const SdeSystem& sys, const BrownianDriver& driver,
                                          const ParticleMeasure& mu_in, const std::vector<Bump>& theta,
                                          int stride, double correction) {
  const int d = sys.dimension();
  const TimeGrid& g = driver.grid();
  const int T = g.steps();
  const FlowEnsemble e =
      integrate_forward(sys, driver, 0, T, mu_in.points, FlowOptions{stride, Scheme::euler, false, true});
  const std::vector<int> nodes = coarse(0, T, stride);
  const std::size_t nn = nodes.size();
  const std::size_t np = mu_in.points.size();
  std::vector<std::vector<double>> res(theta.size(), std::vector<double>(driver.paths(), 0.0));
  parallel_for(static_cast<std::size_t>(driver.paths()), [&](std::size_t p) {
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const Bump& th = theta[j];
      double r = 0.0;
      for (std::size_t i = 0; i < np; ++i) {
        const std::size_t part = p * np + i;
        auto pos = [&](std::size_t k) {
          Point x{0.0, 0.0};
          for (int c = 0; c < d; ++c) x[c] = e.trajectory[(part * nn + k) * d + c];
          return x;
        };
        double acc = th.value(pos(nn - 1)) - th.value(pos(0));
        for (std::size_t k = 0; k + 1 < nn; ++k) {
          const Point x = pos(k);
          const double h = g.node(nodes[k + 1]) - g.node(nodes[k]);
          double a[kMaxDim];
          sys.drift(g.node(nodes[k]), g.node(nodes[k + 1]), x, a, nullptr);
          const Point gt = th.gradient(x);
          const Point dw = driver.increment_between(static_cast<int>(p), nodes[k], nodes[k + 1]);
          double term = correction * th.laplacian(x) * h;
          for (int c = 0; c < d; ++c) term += a[c] * gt[c] * h + gt[c] * dw[c];
          acc -= term;
        }
        r += mu_in.weights[i] * acc;
      }
      res[j][p] = r;
    }
  });
  return summarize(res);
}

WeakFormStats verify_weak_form_transport(const SdeSystem& sys, const BrownianDriver& driver,
                                         const BVInitialData& u_in, const std::vector<Bump>& theta,
                                         int stride, int quad, double correction) {
  const int d = sys.dimension();
  const TimeGrid& g = driver.grid();
  const int T = g.steps();
  const int paths = driver.paths();
  const Quadrature q = support_quadrature(theta, d, quad);
  const std::size_t nq = q.x.size();
  const std::vector<int> nodes = coarse(0, T, stride);
  const std::size_t nn = nodes.size();
  const std::size_t nt = theta.size();
  // per node, path, test function: I = int u th, G_i = int d_i th u, L = int Lap th u, B = int th b . grad u
  std::vector<double> I(nn * paths * nt), L(nn * paths * nt), B(nn * paths * nt), G(nn * paths * nt * kMaxDim);
  auto idx = [&](std::size_t k, std::size_t p, std::size_t j) { return (k * paths + p) * nt + j; };
  for (std::size_t k = 0; k < nn; ++k) {
    std::vector<Point> foot(nq * paths);
    std::vector<Mat> jac(nq * paths, identity_mat(d));
    if (nodes[k] == 0) {
      for (int p = 0; p < paths; ++p)
        for (std::size_t m = 0; m < nq; ++m) foot[p * nq + m] = q.x[m];
    } else {
      const FlowEnsemble back = integrate_backward(sys, driver, 0, nodes[k], q.x, FlowOptions{stride});
      foot = back.positions;
      jac = back.jacobians;
    }
    const bool last = k + 1 == nn;
    parallel_for(static_cast<std::size_t>(paths), [&](std::size_t p) {
      const double t0 = g.node(nodes[k]);
      const double t1 = last ? t0 : g.node(nodes[k + 1]);
      for (std::size_t m = 0; m < nq; ++m) {
        const Point& x = q.x[m];
        const std::size_t part = p * nq + m;
        const double u = u_in(foot[part]);
        double bu = 0.0;
        if (!last) {
          const Point gu0 = u_in.gradient(foot[part]);
          Point gu{0.0, 0.0};  // (grad X^-1)^T grad u_in
          for (int a = 0; a < d; ++a)
            for (int c = 0; c < d; ++c) gu[a] += jac[part][mat_index(c, a)] * gu0[c];
          double bv[kMaxDim];
          sys.drift(t0, t1, x, bv, nullptr);
          for (int c = 0; c < d; ++c) bu += bv[c] * gu[c];
        }
        for (std::size_t j = 0; j < nt; ++j) {
          const double th = theta[j].value(x);
          const Point gt = theta[j].gradient(x);
          const std::size_t id = idx(k, p, j);
          I[id] += q.w * th * u;
          L[id] += q.w * theta[j].laplacian(x) * u;
          B[id] += q.w * th * bu;
          for (int c = 0; c < d; ++c) G[id * kMaxDim + c] += q.w * gt[c] * u;
        }
      }
    });
  }
  std::vector<std::vector<double>> res(nt, std::vector<double>(paths, 0.0));
  for (int p = 0; p < paths; ++p)
    for (std::size_t j = 0; j < nt; ++j) {
      double r = I[idx(nn - 1, p, j)] - I[idx(0, p, j)];
      for (std::size_t k = 0; k + 1 < nn; ++k) {
        const double h = g.node(nodes[k + 1]) - g.node(nodes[k]);
        const Point dw = driver.increment_between(p, nodes[k], nodes[k + 1]);
        const std::size_t id = idx(k, p, j);
        r += B[id] * h - correction * L[id] * h;
        for (int c = 0; c < d; ++c) r -= G[id * kMaxDim + c] * dw[c];
      }
      res[j][p] = r;
    }
  return summarize(res);
}

BvReport bv_mass_bound(const BVInitialData& u_in, const SdeSystem& sys, const BrownianDriver& driver,
                       const Bump& theta, int stride, int per_side) {
  const int d = sys.dimension();
  const auto facets = u_in.jump_set(per_side);
  BvReport r;
  r.per_path.assign(driver.paths(), 0.0);
  if (facets.empty()) {
    r.finite = true;
    return r;
  }
  std::vector<Point> pts;
  for (const auto& f : facets) pts.push_back(f.x);
  const FlowEnsemble e = integrate_forward(sys, driver, 0, driver.grid().steps(), pts,
                                           FlowOptions{stride, Scheme::euler, true, true});
  const std::size_t nn = static_cast<std::size_t>(e.recorded_nodes);
  const std::size_t nf = facets.size();
  for (int p = 0; p < driver.paths(); ++p) {
    double sup = 0.0;
    for (std::size_t k = 0; k < nn; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < nf; ++i) {
        const std::size_t part = p * nf + i;
        Point x{0.0, 0.0};
        Mat J = identity_mat(d);
        for (int c = 0; c < d; ++c) x[c] = e.trajectory[(part * nn + k) * d + c];
        for (int a = 0; a < d; ++a)
          for (int c = 0; c < d; ++c) J[mat_index(a, c)] = e.jacobian_trajectory[(part * nn + k) * d * d + a * d + c];
        const Mat Ji = inverse(J, d);
        Point m{0.0, 0.0};  // J^-T n
        for (int a = 0; a < d; ++a)
          for (int c = 0; c < d; ++c) m[a] += Ji[mat_index(c, a)] * facets[i].normal[c];
        s += std::abs(theta.value(x)) * std::abs(det(J, d)) * norm(m, d) * facets[i].weight;
      }
      sup = std::max(sup, s);
    }
    r.per_path[p] = sup;
    r.max = std::max(r.max, sup);
  }
  r.finite = std::isfinite(r.max);
  return r;
}

}  // namespace roughflow
