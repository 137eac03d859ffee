#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roughflow/grid.hpp"

namespace roughflow {

/// d_t v + b . grad v + lambda v = kappa Laplace v + f, v(0) = 0, solved
/// componentwise when f has several components.
struct PdeProblem {
  TimeIndexedField drift;   // d components
  TimeIndexedField source;  // any number of components
  double lambda = 1.0;
  double kappa = 1.0;
};

struct PdeNormReport {
  double lq_c2a = 0.0;     // ||v||_{L^q_t C^{2,alpha}}
  double linf_c1a = 0.0;   // ||v||_{L^inf_t C^{1,alpha}}
  double dt_lq_c0a = 0.0;  // ||d_t v||_{L^q_t C^{0,alpha}}

  /// ||v||_W = ||v||_{L^q C^{2,alpha}} + ||d_t v||_{L^q C^{0,alpha}}.
  double w_norm() const noexcept { return lq_c2a + dt_lq_c0a; }
};

struct PdeSolution {
  TimeIndexedField v;         // node-sampled, M + 1 slices, v(0) = 0
  TimeIndexedField gradient;  // component c * d + j holds d_j v^c
  int iterations = 0;
  double residual = 0.0;      // sup-norm fixed-point residual of the returned v
  double linf_c1 = 0.0;       // max_t max_c (||v^c||_inf + max_j ||d_j v^c||_inf)
  double grad_sup = 0.0;      // max_t max_{c,j} ||d_j v^c||_inf
  std::optional<PdeNormReport> norms;
};

/// Mild-solution fixed point. Each Fourier mode is advanced exactly over a
/// cell with the source f - b . grad v frozen at its cell value (b, f from
/// the cell, grad v as the average of the end nodes). The implicit coupling
/// is resolved by repeated sweeps in time from v = 0; a sweep uses the newest
/// left-node values. Stops when both the iterate gap and the fixed-point
/// residual fall below `tol`.
/// Throws NonContraction when the gap fails to decrease five times in a row,
/// MaxIterExceeded after `max_iter` sweeps.
PdeSolution solve_mild(const PdeProblem& problem, double tol = 1e-10, int max_iter = 200);

/// d_t v reconstructed from the right-hand side of the equation at every node.
TimeIndexedField time_derivative(const PdeProblem& problem, const PdeSolution& sol);

/// W-norm components; `stride` > 1 evaluates Hoelder parts on every
/// stride-th slice only (others reuse the nearest evaluated value).
PdeNormReport norm_report(const PdeProblem& problem, const PdeSolution& sol, int stride = 1);

struct AprioriReport {
  std::vector<double> scales;
  std::vector<double> w_norms;
  double base_norm = 0.0;
  double max_proportionality_error = 0.0;  // max_s | ||v(s f)|| - s ||v(f)|| |
  bool monotone = true;                    // nondecreasing in s
};

/// Solves with source s * f for each scale and reports ||v||_W against s.
AprioriReport verify_apriori(const PdeProblem& problem, const std::vector<double>& scales,
                             double tol = 1e-10, int norm_stride = 1);

struct TuneResult {
  double lambda = 1.0;
  PdeSolution solution;
  /// (lambda, ||v||_{L^inf_t C^1_x}); non-contracting trials are recorded
  /// with an infinite norm.
  std::vector<std::pair<double, double>> curve;
};

/// Doubles lambda from `lambda0` until ||v||_{L^inf_t C^1_x} <= eta.
/// Throws LambdaSearchExhausted after 40 doublings.
TuneResult tune_lambda(const PdeProblem& problem, double eta, double tol = 1e-10,
                       int max_iter = 200, double lambda0 = 1.0);

struct StabilityGap {
  double linf_c0 = 0.0;
  double linf_c1 = 0.0;
  double lq_c2 = 0.0;
};

struct StabilityReport {
  std::vector<StabilityGap> gaps;
  bool monotone = true;  // each gap <= 1.2 x previous (L^inf_t C^1 component)
  bool converged = true; // last L^inf_t C^1 gap below final_tol
};

/// Solves the limit problem and each member of an approximating sequence
/// and reports ||v^n - v||.
StabilityReport verify_stability(const PdeProblem& limit, const std::vector<PdeProblem>& sequence,
                                  double final_tol, double tol = 1e-10);

/// Space-time bump phi(t, x) = bump_t(t) * bump_x(x) with torus-periodic
/// spatial part.
struct SpaceTimeBump {
  Point center{};
  double radius = 1.0;
  double t_center = 0.5;
  double t_radius = 0.25;
};

/// | int int v d_t phi - int int (b . grad v + lambda v - kappa Laplace v - f) phi |
/// per component, discretized by the midpoint rule on the cells and grid
/// quadrature in space; returned as the max over components and bumps.
double weak_form_residual(const PdeProblem& problem, const PdeSolution& sol,
                          const std::vector<SpaceTimeBump>& bumps);

}  // namespace roughflow
