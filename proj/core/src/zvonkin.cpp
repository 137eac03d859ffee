#include "roughflow/zvonkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughflow/error.hpp"
#include "roughflow/holder.hpp"

namespace roughflow {
namespace {

// Model problem d_t w + a . grad w + lambda w = 1/2 Laplace w + f.
PdeProblem model_problem(const TimeIndexedField& b, Direction direction, double lambda) {
  require(b.components() == b.torus().dimension(), "drift must be a d-vector field");
  if (direction == Direction::forward) {
    // w(tau) = v(T - tau): drift -b(T - tau), source b(T - tau).
    TimeIndexedField flipped = b.reversed();
    TimeIndexedField a = flipped;
    for (std::size_t k = 0; k < a.size(); ++k) a.slice(k) *= -1.0;
    return PdeProblem{std::move(a), std::move(flipped), lambda, 0.5};
  }
  TimeIndexedField f = b;
  for (std::size_t k = 0; k < f.size(); ++k) f.slice(k) *= -1.0;
  return PdeProblem{b, std::move(f), lambda, 0.5};
}

PdeSolution to_physical_time(PdeSolution s, Direction direction) {
  if (direction == Direction::forward) {
    s.v = s.v.reversed();
    s.gradient = s.gradient.reversed();
  }
  return s;
}

void check_eta(double eta, int d) {
  require(eta > 0.0 && eta <= 1.0 / (2.0 * d) + 1e-15, "eta must lie in (0, 1/(2d)]");
}

}  // namespace

ZvonkinMap::ZvonkinMap(Direction direction, double lambda, double eta, PdeSolution pde,
                       std::vector<std::pair<double, double>> lambda_curve)
    : direction_(direction),
      lambda_(lambda),
      eta_(eta),
      pde_(std::move(pde)),
      curve_(std::move(lambda_curve)),
      interp_(pde_.v) {}

int ZvonkinMap::node(double t) const noexcept {
  const int k = static_cast<int>(std::lround(t / grid().dt()));
  return std::clamp(k, 0, grid().steps());
}

void ZvonkinMap::evaluate(int node, const Point& x, double* v, double* grad, double* hess) const {
  interp_.slice(static_cast<std::size_t>(node)).evaluate(x, v, grad, hess);
}

Point ZvonkinMap::apply(int node, const Point& x) const {
  double v[kMaxDim] = {0.0, 0.0};
  evaluate(node, x, v, nullptr, nullptr);
  Point y = x;
  for (int i = 0; i < dimension(); ++i) y[i] += v[i];
  return y;
}

Mat ZvonkinMap::jacobian(int node, const Point& x) const {
  const int d = dimension();
  double g[kMaxDim * kMaxDim] = {};
  evaluate(node, x, nullptr, g, nullptr);
  Mat m = identity_mat(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[mat_index(i, j)] += g[i * d + j];
  return m;
}

ZvonkinMap build_map(const TimeIndexedField& b, Direction direction, double eta, const ZvonkinOptions& opt) {
  check_eta(eta, b.torus().dimension());
  PdeProblem p = model_problem(b, direction, opt.lambda0);
  TuneResult r = tune_lambda(p, eta, opt.tol, opt.max_iter, opt.lambda0);
  return ZvonkinMap(direction, r.lambda, eta, to_physical_time(std::move(r.solution), direction),
                    std::move(r.curve));
}

ZvonkinMap build_map_fixed(const TimeIndexedField& b, Direction direction, double lambda, double eta,
                           const ZvonkinOptions& opt) {
  check_eta(eta, b.torus().dimension());
  PdeProblem p = model_problem(b, direction, lambda);
  PdeSolution s = solve_mild(p, opt.tol, opt.max_iter);
  std::vector<std::pair<double, double>> curve{{lambda, s.linf_c1}};
  return ZvonkinMap(direction, lambda, eta, to_physical_time(std::move(s), direction), std::move(curve));
}

ZvonkinPair build_maps(const TimeIndexedField& b, double eta, const ZvonkinOptions& opt) {
  ZvonkinMap fwd = build_map(b, Direction::forward, eta, opt);
  try {
    ZvonkinMap bwd = build_map_fixed(b, Direction::backward, fwd.lambda(), eta, opt);
    if (bwd.pde().linf_c1 <= eta) return ZvonkinPair{std::move(fwd), std::move(bwd), true};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::non_contraction && e.code() != ErrorCode::max_iter_exceeded) throw;
  }
  ZvonkinMap bwd = build_map(b, Direction::backward, eta, opt);
  return ZvonkinPair{std::move(fwd), std::move(bwd), false};
}

Point invert_map(const ZvonkinMap& map, int node, const Point& y) {
  const int d = map.dimension();
  Point x = y;
  for (int it = 0; it < 50; ++it) {
    double v[kMaxDim] = {0.0, 0.0};
    double g[kMaxDim * kMaxDim] = {};
    map.evaluate(node, x, v, g, nullptr);
    Point r{};
    double res = 0.0;
    for (int i = 0; i < d; ++i) {
      r[i] = x[i] + v[i] - y[i];
      res = std::max(res, std::abs(r[i]));
    }
    if (!std::isfinite(res)) break;
    if (res < 1e-12) return x;
    Mat J = identity_mat(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) J[mat_index(i, j)] += g[i * d + j];
    const Point step = matvec(inverse(J, d), r, d);
    for (int i = 0; i < d; ++i) x[i] -= step[i];
    // One extra check after the update lets a converged step below 1e-10 but
    // above 1e-12 (roundoff floor) still return.
    if (it == 49 || norm(step, d) < 1e-14) {
      map.evaluate(node, x, v, nullptr, nullptr);
      double fin = 0.0;
      for (int i = 0; i < d; ++i) fin = std::max(fin, std::abs(x[i] + v[i] - y[i]));
      if (fin < 1e-10) return x;
    }
  }
  fail(ErrorCode::newton_divergence, "Newton inversion of g did not converge in 50 iterations");
}

double diagonal_dominance(const ZvonkinMap& map) {
  const int d = map.dimension();
  double worst = std::numeric_limits<double>::infinity();
  const auto& grad = map.pde().gradient;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const GridField& g = grad.slice(k);
    for (std::size_t p = 0; p < g.points(); ++p)
      for (int i = 0; i < d; ++i) {
        double off = 0.0;
        for (int j = 0; j < d; ++j)
          if (j != i) off += std::abs(g.at(p, i * d + j));
        worst = std::min(worst, std::abs(1.0 + g.at(p, i * d + i)) - off);
      }
  }
  return worst;
}

TransformedCoefficients transform_coefficients(const ZvonkinMap& map) {
  const Torus& torus = map.torus();
  const int d = torus.dimension();
  const TimeGrid grid = map.grid();
  const double sign = map.direction() == Direction::forward ? 1.0 : -1.0;
  std::vector<GridField> drift, diff;
  drift.reserve(grid.steps() + 1);
  diff.reserve(grid.steps() + 1);
  double dev = 0.0, sup = 0.0;
  for (int k = 0; k <= grid.steps(); ++k) {
    GridField bk(torus, d), sk(torus, d * d);
    for (std::size_t p = 0; p < torus.size(); ++p) {
      const Point x = invert_map(map, k, torus.coordinate(p));
      double v[kMaxDim] = {0.0, 0.0};
      double g[kMaxDim * kMaxDim] = {};
      map.evaluate(k, x, v, g, nullptr);
      double bn = 0.0;
      for (int i = 0; i < d; ++i) {
        bk.at(p, i) = sign * map.lambda() * v[i];
        bn += v[i] * v[i];
        for (int j = 0; j < d; ++j) {
          sk.at(p, i * d + j) = (i == j ? 1.0 : 0.0) + g[i * d + j];
          dev = std::max(dev, std::abs(g[i * d + j]));
        }
      }
      sup = std::max(sup, map.lambda() * std::sqrt(bn));
    }
    drift.push_back(std::move(bk));
    diff.push_back(std::move(sk));
  }
  const double q = map.pde().v.q();
  const double alpha = map.pde().v.alpha();
  return TransformedCoefficients{map.direction(),
                                 map.lambda(),
                                 TimeIndexedField(grid, TimeSampling::nodes, std::move(drift), q, alpha),
                                 TimeIndexedField(grid, TimeSampling::nodes, std::move(diff), q, alpha),
                                 dev,
                                 sup};
}

double transformed_drift_regularity(const TransformedCoefficients& c, double alpha) {
  double worst = 0.0;
  for (const auto& s : c.drift.slices()) worst = std::max(worst, estimate_zygmund_seminorm(s, 1, alpha));
  return worst;
}

}  // namespace roughflow
