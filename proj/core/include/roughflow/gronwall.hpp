#pragma once

#include <functional>
#include <vector>

namespace roughflow {

/// u(t) <= f(t) + int_0^t g(t, s) h(s) u(s) ds on (0, T), with
/// g(t, s) = r(t, s) (t - s)^-beta, r bounded (beta = 0: regular kernel).
struct VolterraProblem {
  std::function<double(double)> f;
  std::function<double(double, double)> r;
  double beta = 0.0;
  std::function<double(double)> h;
  double p = 2.0;
  double q = 2.0;
  double T = 1.0;
  int M = 1000;

  double kernel(double t, double s) const;
  void validate() const;
};

struct VolterraSolution {
  std::vector<double> t;
  std::vector<double> u;
};

/// Product-trapezoid time stepping for the equality case: the linear
/// interpolant of r h u is integrated exactly against (t - s)^-beta.
/// Throws QuadratureDiverged for beta >= 1 or a vanishing implicit pivot.
VolterraSolution solve_volterra_equality(const VolterraProblem& problem);

struct GronwallConstant {
  double value = 0.0;
  double remainder_bound = 0.0;  // bound on the neglected tail
  int terms = 0;
};

/// E = sum_n (g_norm h_norm)^n / (n!)^(1/q), summed until a term drops below
/// 1e-12 or n = max_terms. Throws SeriesDiverged when max_terms is reached
/// while the terms have grown for the last 10 indices.
GronwallConstant gronwall_constant(double g_norm, double h_norm, double q, int max_terms = 400);

struct KernelNorms {
  double g_sup = 0.0;  // sup_{s <= t} ||g(s, .)||_{L^p(0, s)}
  double h_lq = 0.0;   // ||h||_{L^q(0, t)}
};

/// Norms on (0, t_n) for every grid node n, by quadrature.
std::vector<KernelNorms> kernel_norms(const VolterraProblem& problem);

/// E for the problem's norms at time t (nearest grid node at or above t).
GronwallConstant gronwall_constant(const VolterraProblem& problem, double t, int max_terms = 400);

struct GronwallReport {
  std::vector<double> t;
  std::vector<double> u;
  std::vector<double> bound;   // E(t) sup_{s <= t} f(s)
  double min_margin = 0.0;     // min over nodes of bound - u
  bool holds = false;
};

/// Checks u(t) <= E(t) ||f||_{L^inf(0, t)} + 1e-8 at every node; throws
/// BoundViolated naming the first offending node.
GronwallReport verify_gronwall_bound(const VolterraProblem& problem);

struct CounterexampleReport {
  std::vector<double> t;
  std::vector<double> u;         // 1 + t
  std::vector<double> rhs;       // e^(1 - e^-t)
  std::vector<double> rhs_quad;  // right side by quadrature of its defining integral
  double min_gap = 0.0;          // min of u - rhs over t >= 0.1
  double max_quad_error = 0.0;
  bool refuted = false;          // rhs < u at every t > 0
};

/// u = 1 + t, f = 1, g = e^-t satisfy the inequality with equality while the
/// exponential-kernel bound evaluates to e^(1 - e^-t) < 1 + t.
CounterexampleReport refute_flawed_inequality(int nodes = 1000, double T = 5.0);

}  // namespace roughflow
