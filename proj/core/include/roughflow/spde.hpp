#pragma once

#include <functional>
#include <vector>

#include "roughflow/bump.hpp"
#include "roughflow/flow.hpp"

namespace roughflow {

struct Box {
  Point lo{};
  Point hi{};
  double weight = 1.0;
};

/// Initial datum on R^d: a smooth function with gradient, or a weighted sum
/// of box indicators (one box for the indicator kind).
class BVInitialData {
 public:
  enum class Kind { smooth, indicator_of_box, piecewise_constant };

  /// [lo, hi] is the known range of f (used by the maximum principle).
  static BVInitialData smooth(int dim, std::function<double(const Point&)> f,
                              std::function<Point(const Point&)> grad, double lo, double hi);
  static BVInitialData indicator(int dim, const Box& box);
  static BVInitialData piecewise_constant(int dim, std::vector<Box> boxes);

  Kind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dim_; }
  const std::vector<Box>& boxes() const noexcept { return boxes_; }

  double operator()(const Point& x) const;
  /// Classical gradient (zero a.e. for the box kinds).
  Point gradient(const Point& x) const;
  double min_value() const;
  double max_value() const;

  /// Jump set as surface elements: (midpoint, unit normal, area * |jump|);
  /// `per_side` points per box side in 2D, the two endpoints in 1D.
  struct Facet {
    Point x;
    Point normal;
    double weight;
  };
  std::vector<Facet> jump_set(int per_side) const;

 private:
  Kind kind_ = Kind::smooth;
  int dim_ = 1;
  std::function<double(const Point&)> f_;
  std::function<Point(const Point&)> grad_;
  std::vector<Box> boxes_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Weighted particle cloud sum_i w_i delta_{x_i}.
struct ParticleMeasure {
  std::vector<Point> points;
  std::vector<double> weights;

  double mass() const noexcept;
  double total_variation() const noexcept;
  double integrate(const std::function<double(const Point&)>& f) const;
};

/// Equal-weight particles sampling density rho on the box [lo, hi] (midpoint
/// lattice with `per_axis` points per axis), total mass int rho.
ParticleMeasure sample_density(int dim, const Point& lo, const Point& hi, int per_axis,
                               const std::function<double(const Point&)>& rho);

/// u_t(x) = u_in(X_t^-1(x)) per path, from a backward ensemble started at the
/// evaluation points at time t and run down to 0.
struct TransportSolution {
  int paths = 0;
  int points = 0;
  std::vector<double> values;  // path-major

  double at(int path, int point) const noexcept { return values[static_cast<std::size_t>(path) * points + point]; }
  /// Path slice as a grid field when the evaluation points are the torus grid.
  GridField as_field(int path, const Torus& torus) const;
};

TransportSolution solve_transport(const BVInitialData& u_in, const FlowEnsemble& backward);

/// mu_t = (X_t)_# mu_in per path; `forward` must start at mu_in's points.
std::vector<ParticleMeasure> solve_continuity(const ParticleMeasure& mu_in, const FlowEnsemble& forward);

struct DualityReport {
  std::vector<int> nodes;
  std::vector<double> drift;  // max over paths of |int u_t dmu_t - int u_in dmu_in| / |int u_in dmu_in|, per node
  double max_relative_drift = 0.0;
};

/// For each node t: forward route 0 -> t from the particles, backward route
/// t -> 0, and sum_i w_i u_in(X_t^-1(X_t(x_i))) against sum_i w_i u_in(x_i).
DualityReport verify_duality(const BVInitialData& u_in, const ParticleMeasure& mu_in, const FlowRoute& forward,
                             const FlowRoute& backward, int paths, const std::vector<int>& nodes);

struct WeakFormStats {
  double rms = 0.0;       // sqrt(E[residual^2]) at the final time, max over test functions
  double mean_abs = 0.0;
  std::vector<double> per_path;  // residual of the first test function
};

/// Checks test functions for compact support of radius in (0, L/2).
void check_test_functions(const std::vector<Bump>& theta, double length);

/// Ito form int th dmu_t = int th dmu_in + int int b . grad th dmu dr
///   + sum_i int (int d_i th dmu_r) dW^i + c int int Lap th dmu dr
/// with left-point sums on the coarse nodes of `options.stride`; c = 1/2 is
/// the Ito correction.
WeakFormStats verify_weak_form_continuity(const SdeSystem& sys, const BrownianDriver& driver,
                                          const ParticleMeasure& mu_in, const std::vector<Bump>& theta,
                                          int stride, double correction = 0.5);

/// Ito form int u_t th = int u_in th - int int th b . grad u dr
///   + sum_i int (int d_i th u_r) dW^i + c int int Lap th u dr,
/// u_r from backward flows started at every coarse node; space integrals
/// by the midpoint rule with `quad` points per axis on the support of th.
WeakFormStats verify_weak_form_transport(const SdeSystem& sys, const BrownianDriver& driver,
                                         const BVInitialData& u_in, const std::vector<Bump>& theta,
                                         int stride, int quad = 48, double correction = 0.5);

struct BvReport {
  std::vector<double> per_path;  // sup over coarse nodes of int th |grad u_t|
  double max = 0.0;
  bool finite = false;
};

/// int th |grad u_t| = sum over facets y of |th(X_t(y))| det J |J^-T n| dS
/// (surface measure of the transported jump set), J = grad X_t(y).
BvReport bv_mass_bound(const BVInitialData& u_in, const SdeSystem& sys, const BrownianDriver& driver,
                       const Bump& theta, int stride, int per_side = 64);

}  // namespace roughflow
