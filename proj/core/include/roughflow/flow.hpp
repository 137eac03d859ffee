#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "roughflow/brownian.hpp"
#include "roughflow/interpolant.hpp"
#include "roughflow/zvonkin.hpp"

namespace roughflow {

/// dZ = a_t(Z) dt + sigma_t(Z) dW with Fourier-interpolated coefficients;
/// sigma = I when no diffusion field is given. Backward integration solves
/// Z_s = z - int_s^t a dr - int_s^t sigma dW_hat.
class SdeSystem {
 public:
  explicit SdeSystem(const TimeIndexedField& drift);
  SdeSystem(const TimeIndexedField& drift, const TimeIndexedField& diffusion);
  explicit SdeSystem(const TransformedCoefficients& c) : SdeSystem(c.drift, c.diffusion) {}

  int dimension() const noexcept { return dim_; }
  double horizon() const noexcept { return horizon_; }
  bool additive() const noexcept { return diffusion_.empty(); }

  /// Drift (d values) and its gradient (d * d, row i = grad a^i) for the
  /// step t_from -> t_to; grad may be null.
  void drift(double t_from, double t_to, const Point& x, double* a, double* grad) const;
  /// Diffusion (d * d, row-major), gradient (d^3) and Hessian (d^4) of the
  /// entries; any output may be null. Identity when additive.
  void diffusion(double t_from, double t_to, const Point& x, double* s, double* grad,
                 double* hess) const;

 private:
  int dim_;
  double horizon_;
  SpaceTimeInterpolant drift_;
  SpaceTimeInterpolant diffusion_;
};

enum class Scheme { euler, milstein };

struct FlowOptions {
  /// Coarse step in units of the driver's fine step; the final step is
  /// shortened when the interval is not a multiple of it.
  int stride = 1;
  Scheme scheme = Scheme::euler;
  bool jacobians = true;
  /// Keep positions (and Jacobians) at every coarse node.
  bool record = false;
};

/// Particles of all paths, path-major: particle = path * points_per_path + i.
struct ParticleState {
  int points_per_path = 0;
  std::vector<Point> x;
  std::vector<Mat> jac;
};

/// Same points on every path, Jacobians I.
ParticleState replicate(const std::vector<Point>& points, int paths, int dimension);

struct FlowEnsemble {
  int dimension = 1;
  int from = 0;  // fine index of the start time
  int to = 0;    // fine index of the end time (< from when backward)
  int paths = 0;
  int points_per_path = 0;
  std::vector<Point> initial;
  std::vector<Point> positions;
  std::vector<Mat> jacobians;  // empty unless requested
  int recorded_nodes = 0;
  std::vector<double> trajectory;           // particle-major, node, component
  std::vector<double> jacobian_trajectory;  // particle-major, node, d * d entries

  std::size_t particles() const noexcept { return positions.size(); }
  ParticleState state() const;
};

/// Euler-Maruyama (or Milstein without Levy areas) from fine index `from`
/// to `to`, forward or backward according to their order.
FlowEnsemble integrate(const SdeSystem& sys, const BrownianDriver& driver, int from, int to,
                       ParticleState start, const FlowOptions& options = {});

/// X_{s,t}(x) for s <= t (fine indices).
FlowEnsemble integrate_forward(const SdeSystem& sys, const BrownianDriver& driver, int s, int t,
                               const std::vector<Point>& points, const FlowOptions& options = {});
/// Backward flow X_s^{x,t} from t down to s.
FlowEnsemble integrate_backward(const SdeSystem& sys, const BrownianDriver& driver, int s, int t,
                                const std::vector<Point>& points, const FlowOptions& options = {});

/// g_to^-1 o Y o g_from: forward maps need from <= to, backward maps from >= to.
/// `sys` carries the transformed coefficients of `map`.
FlowEnsemble flow_via_zvonkin(const ZvonkinMap& map, const SdeSystem& sys, const BrownianDriver& driver,
                              int from, int to, ParticleState start, const FlowOptions& options = {});

using FlowRoute = std::function<FlowEnsemble(int from, int to, const ParticleState& start)>;

FlowRoute direct_route(const SdeSystem& sys, const BrownianDriver& driver, FlowOptions options = {});
FlowRoute zvonkin_route(const ZvonkinMap& map, const SdeSystem& sys, const BrownianDriver& driver,
                        FlowOptions options = {});

struct ResidualStats {
  double max = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};

ResidualStats residual(const std::vector<Point>& a, const std::vector<Point>& b, int dimension);

/// |X_{s,t}(x) - X_{r,t}(X_{s,r}(x))| over all particles.
ResidualStats verify_flow_property(const FlowRoute& route, int s, int r, int t, const ParticleState& start);

/// |X^-1_{s,t}(X_{s,t}(x)) - x| with the forward route run s -> t and the
/// backward route t -> s.
ResidualStats verify_inverse_flow(const FlowRoute& forward, const FlowRoute& backward, int s, int t,
                                  const ParticleState& start);

struct StabilityOptions {
  std::vector<double> eps{1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125};
  double eps_ref = 1.0 / 256.0;
  double p = 2.0;
  int lattice = 16;  // points per axis
  int stride = 1;
  bool gradients = true;
};

struct StabilityCurve {
  std::vector<double> eps;
  std::vector<double> value;   // sup_x E[sup_t |X^n - X|^p]
  std::vector<double> stderr_;
  std::vector<double> grad_value;
  std::vector<double> grad_stderr;
  bool positive = false;
  bool monotone = false;       // each value <= 1.2 x previous
  bool grad_monotone = false;
  bool stderr_ok = false;      // every stderr <= 25% of its own value (both curves)
  double stderr_spread = 0.0;  // max stderr / smallest value over both curves
  double empirical_rate = 0.0; // log-log slope of value vs eps
};

/// Flows of b^n = mollify(b, eps_n) against the eps_ref flow on [0, T]
/// (direct Euler route, shared driver, 16^d lattice of initial points).
StabilityCurve stability_sweep(const TimeIndexedField& b, const BrownianDriver& driver,
                               const StabilityOptions& options = {});

}  // namespace roughflow
