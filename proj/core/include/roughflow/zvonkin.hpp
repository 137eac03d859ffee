#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "roughflow/interpolant.hpp"
#include "roughflow/parabolic.hpp"

namespace roughflow {

enum class Direction { forward, backward };

struct ZvonkinOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double lambda0 = 1.0;
};

/// g_t(x) = x + v_t(x) with v solving, componentwise,
///   forward:  d_t v + b . grad v + 1/2 Laplace v = lambda v - b,  v(T) = 0
///   backward: d_t v + b . grad v + lambda v = 1/2 Laplace v - b,  v(0) = 0
/// Slices of `pde` are indexed by physical time nodes t_k = k T / M.
/// Immutable after construction.
class ZvonkinMap {
 public:
  ZvonkinMap(Direction direction, double lambda, double eta, PdeSolution pde,
             std::vector<std::pair<double, double>> lambda_curve);

  Direction direction() const noexcept { return direction_; }
  double lambda() const noexcept { return lambda_; }
  double eta() const noexcept { return eta_; }
  const PdeSolution& pde() const noexcept { return pde_; }
  const TimeGrid& grid() const noexcept { return pde_.v.grid(); }
  const Torus& torus() const noexcept { return pde_.v.torus(); }
  int dimension() const noexcept { return torus().dimension(); }
  const std::vector<std::pair<double, double>>& lambda_curve() const noexcept { return curve_; }

  /// max_{t, x, i, j} |d_j v^i| (diagnostic ||grad v||_{L^inf_t C^0_x}).
  double margin() const noexcept { return pde_.grad_sup; }
  bool certified() const noexcept { return margin() <= eta_; }

  /// Node index nearest to time t.
  int node(double t) const noexcept;

  Point apply(int node, const Point& x) const;
  /// I + grad v at x.
  Mat jacobian(int node, const Point& x) const;
  /// v, grad v and Hessian of v at x (any pointer may be null); layouts as
  /// in FourierInterpolant::evaluate.
  void evaluate(int node, const Point& x, double* v, double* grad, double* hess) const;

  const SpaceTimeInterpolant& interpolant() const noexcept { return interp_; }

 private:
  Direction direction_;
  double lambda_;
  double eta_;
  PdeSolution pde_;
  std::vector<std::pair<double, double>> curve_;
  SpaceTimeInterpolant interp_;
};

/// Tunes lambda (doubling from options.lambda0) until the componentwise
/// ||v||_{L^inf_t C^1_x} <= eta, with eta in (0, 1/(2d)].
ZvonkinMap build_map(const TimeIndexedField& b, Direction direction, double eta,
                     const ZvonkinOptions& options = {});

/// Map for a fixed lambda (no tuning; may be uncertified).
ZvonkinMap build_map_fixed(const TimeIndexedField& b, Direction direction, double lambda, double eta,
                           const ZvonkinOptions& options = {});

struct ZvonkinPair {
  ZvonkinMap forward;
  ZvonkinMap backward;
  bool shared_lambda = false;
};

/// Forward map tuned first; the backward map reuses its lambda when that
/// certifies, otherwise it is tuned on its own.
ZvonkinPair build_maps(const TimeIndexedField& b, double eta, const ZvonkinOptions& options = {});

/// Newton iteration for g_t(x) = y from x0 = y; |g_t(x) - y| < 1e-10 on
/// return. Throws NewtonDivergence after 50 iterations.
Point invert_map(const ZvonkinMap& map, int node, const Point& y);

/// min over nodes, points and rows of |1 + d_i v^i| - sum_{j != i} |d_j v^i|.
double diagonal_dominance(const ZvonkinMap& map);

/// Forward: drift lambda v o g^-1, diffusion I + grad v o g^-1.
/// Backward: drift -lambda v o g^-1 and the same diffusion, to be used as
/// Y_s = y - int_s^t drift dr - int_s^t diffusion dW (backward integral).
struct TransformedCoefficients {
  Direction direction = Direction::forward;
  double lambda = 0.0;
  TimeIndexedField drift;      // node-sampled, d components
  TimeIndexedField diffusion;  // node-sampled, d * d components (row-major)
  double sigma_deviation = 0.0;  // max |sigma - I| entry over nodes
  double drift_sup = 0.0;        // max |drift| over nodes
};

TransformedCoefficients transform_coefficients(const ZvonkinMap& map);

/// Holder/Zygmund report of the transformed drift slices (C^{1,alpha} check):
/// max over slices of the k = 1 Zygmund seminorm.
double transformed_drift_regularity(const TransformedCoefficients& c, double alpha);

}  // namespace roughflow
