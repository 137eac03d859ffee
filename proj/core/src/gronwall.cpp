#include "roughflow/gronwall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "roughflow/error.hpp"

namespace roughflow {
namespace {

// Weights of the linear interpolant on [s_j, s_j + dt] against
// (t - s)^-beta, where t - s runs from a down to b = a - dt.
std::pair<double, double> product_weights(double a, double b, double beta, double dt) {
  const double i0 = (std::pow(a, 1.0 - beta) - (b > 0.0 ? std::pow(b, 1.0 - beta) : 0.0)) / (1.0 - beta);
  const double i1 = (std::pow(a, 2.0 - beta) - (b > 0.0 ? std::pow(b, 2.0 - beta) : 0.0)) / (2.0 - beta);
  return {(i1 - b * i0) / dt, (a * i0 - i1) / dt};
}

// w[m][0/1]: weights for the subinterval whose right end lies m cells before t_n.
std::vector<std::pair<double, double>> weight_table(int M, double dt, double beta) {
  std::vector<std::pair<double, double>> w(M);
  for (int m = 0; m < M; ++m) w[m] = product_weights((m + 1) * dt, m * dt, beta, dt);
  return w;
}

}  // namespace

double VolterraProblem::kernel(double t, double s) const {
  return beta == 0.0 ? r(t, s) : r(t, s) * std::pow(t - s, -beta);
}

void VolterraProblem::validate() const {
  require(static_cast<bool>(f) && static_cast<bool>(r) && static_cast<bool>(h), "Volterra problem needs f, r and h");
  require(p > 1.0 && q > 1.0 && std::abs(1.0 / p + 1.0 / q - 1.0) < 1e-12, "exponents must be conjugate in (1, inf)");
  require(T > 0.0 && M >= 1, "need T > 0 and M >= 1");
  require(beta >= 0.0, "kernel exponent must be nonnegative");
  if (beta >= 1.0)
    fail(ErrorCode::quadrature_diverged, "kernel singularity (t - s)^-" + std::to_string(beta) + " is not integrable");
}

VolterraSolution solve_volterra_equality(const VolterraProblem& pr) {
  pr.validate();
  const int M = pr.M;
  const double dt = pr.T / M;
  const auto w = weight_table(M, dt, pr.beta);
  VolterraSolution s;
  s.t.resize(M + 1);
  s.u.resize(M + 1);
  std::vector<double> hv(M + 1), phi(M + 1);
  for (int n = 0; n <= M; ++n) {
    s.t[n] = pr.T * n / M;
    hv[n] = pr.h(s.t[n]);
  }
  s.u[0] = pr.f(0.0);
  for (int n = 1; n <= M; ++n) {
    const double tn = s.t[n];
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double coef = pr.r(tn, s.t[j]) * hv[j] * s.u[j];
      // node j is the left end of interval j (m = n-1-j) and the right end of interval j-1 (m = n-j)
      acc += coef * w[n - 1 - j].first;
      if (j > 0) acc += coef * w[n - j].second;
    }
    const double diag = pr.r(tn, tn) * hv[n] * w[0].second;
    const double pivot = 1.0 - diag;
    if (!(pivot > 1e-12)) fail(ErrorCode::quadrature_diverged, "implicit Volterra step has no positive pivot");
    s.u[n] = (pr.f(tn) + acc) / pivot;
    if (!std::isfinite(s.u[n])) fail(ErrorCode::quadrature_diverged, "Volterra solution is not finite");
  }
  return s;
}

GronwallConstant gronwall_constant(double g_norm, double h_norm, double q, int max_terms) {
  require(g_norm >= 0.0 && h_norm >= 0.0, "norms must be nonnegative");
  require(q > 1.0, "q must exceed 1");
  const double x = g_norm * h_norm;
  GronwallConstant c;
  if (x == 0.0) {
    c.value = 1.0;
    c.terms = 1;
    return c;
  }
  const double lx = std::log(x);
  int growth = 0;
  double prev = -std::numeric_limits<double>::infinity();
  int n = 0;
  for (; n <= max_terms; ++n) {
    const double lt = n * lx - std::lgamma(n + 1.0) / q;
    const double term = std::exp(lt);
    c.value += term;
    growth = lt > prev ? growth + 1 : 0;
    prev = lt;
    if (term < 1e-12 && x / std::pow(n + 1.0, 1.0 / q) < 1.0) break;
  }
  c.terms = std::min(n, max_terms) + 1;
  if (n > max_terms && growth >= 10)
    fail(ErrorCode::series_diverged, "Gronwall series terms still growing at the truncation index");
  // terms beyond the last one (index c.terms - 1) have ratios <= x / (c.terms + 1)^(1/q)
  const int last = c.terms - 1;
  const double next = std::exp((last + 1) * lx - std::lgamma(last + 2.0) / q);
  const double rho = x / std::pow(last + 2.0, 1.0 / q);
  c.remainder_bound = rho < 1.0 ? next / (1.0 - rho) : std::numeric_limits<double>::infinity();
  if (!std::isfinite(c.value)) fail(ErrorCode::series_diverged, "Gronwall series overflowed");
  return c;
}

std::vector<KernelNorms> kernel_norms(const VolterraProblem& pr) {
  pr.validate();
  const int M = pr.M;
  const double dt = pr.T / M;
  // |g|^p = |r|^p (t - s)^(-beta p); integrable only for beta p < 1
  const double bp = pr.beta * pr.p;
  if (bp >= 1.0) fail(ErrorCode::quadrature_diverged, "kernel is not in L^p: beta p >= 1");
  const auto w = weight_table(M, dt, bp);
  std::vector<KernelNorms> out(M + 1);
  double hq = 0.0, gsup = 0.0;
  double hprev = std::pow(std::abs(pr.h(0.0)), pr.q);
  for (int n = 1; n <= M; ++n) {
    const double tn = pr.T * n / M;
    const double hn = std::pow(std::abs(pr.h(tn)), pr.q);
    hq += 0.5 * dt * (hprev + hn);
    hprev = hn;
    double gp = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = std::pow(std::abs(pr.r(tn, pr.T * j / M)), pr.p);
      const double b = std::pow(std::abs(pr.r(tn, pr.T * (j + 1) / M)), pr.p);
      const auto [wl, wr] = w[n - 1 - j];
      gp += a * wl + b * wr;
    }
    gsup = std::max(gsup, std::pow(gp, 1.0 / pr.p));
    out[n] = KernelNorms{gsup, std::pow(hq, 1.0 / pr.q)};
  }
  return out;
}

GronwallConstant gronwall_constant(const VolterraProblem& pr, double t, int max_terms) {
  const auto norms = kernel_norms(pr);
  const int n = std::clamp(static_cast<int>(std::ceil(t / pr.T * pr.M - 1e-9)), 0, pr.M);
  return gronwall_constant(norms[n].g_sup, norms[n].h_lq, pr.q, max_terms);
}

GronwallReport verify_gronwall_bound(const VolterraProblem& pr) {
  const VolterraSolution sol = solve_volterra_equality(pr);
  const auto norms = kernel_norms(pr);
  GronwallReport r;
  r.t = sol.t;
  r.u = sol.u;
  r.bound.resize(sol.t.size());
  r.min_margin = std::numeric_limits<double>::infinity();
  double fsup = 0.0;
  for (std::size_t n = 0; n < sol.t.size(); ++n) {
    fsup = std::max(fsup, std::abs(pr.f(sol.t[n])));
    const double E = gronwall_constant(norms[n].g_sup, norms[n].h_lq, pr.q).value;
    r.bound[n] = E * fsup;
    r.min_margin = std::min(r.min_margin, r.bound[n] - sol.u[n]);
    if (sol.u[n] > r.bound[n] + 1e-8)
      fail(ErrorCode::bound_violated, "u exceeds E ||f|| at node " + std::to_string(n) + " (t = " +
                                          std::to_string(sol.t[n]) + ")");
  }
  r.holds = true;
  return r;
}

CounterexampleReport refute_flawed_inequality(int nodes, double T) {
  require(nodes >= 2 && T > 0.0, "need at least two nodes and T > 0");
  CounterexampleReport r;
  r.min_gap = std::numeric_limits<double>::infinity();
  r.refuted = true;
  for (int k = 1; k <= nodes; ++k) {
    const double t = T * k / nodes;
    const double u = 1.0 + t;
    const double rhs = std::exp(1.0 - std::exp(-t));
    // 1 + int_0^t f(s) g(t - s) exp(int_s^t g(t - r) dr) ds by composite Simpson
    const int m = 2000;
    const double hs = t / m;
    double integral = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double s = i * hs;
      const double inner = 1.0 - std::exp(-(t - s));
      const double val = std::exp(-(t - s)) * std::exp(inner);
      integral += val * (i == 0 || i == m ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    const double quad = 1.0 + integral * hs / 3.0;
    r.t.push_back(t);
    r.u.push_back(u);
    r.rhs.push_back(rhs);
    r.rhs_quad.push_back(quad);
    r.max_quad_error = std::max(r.max_quad_error, std::abs(quad - rhs));
    if (!(rhs < u)) r.refuted = false;
    if (t >= 0.1) r.min_gap = std::min(r.min_gap, u - rhs);
  }
  return r;
}

}  // namespace roughflow
