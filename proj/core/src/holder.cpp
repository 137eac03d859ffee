#include "roughflow/holder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "roughflow/error.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {
namespace {

constexpr std::size_t kFullPairLimit = 4096;
constexpr std::size_t kSampledPairs = 1000000;
constexpr std::uint64_t kPairSeed = 0x5eed'0f'a1'fa;

double point_diff(const GridField& f, std::size_t p, std::size_t q) {
  double s = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const double d = f.at(p, c) - f.at(q, c);
    s += d * d;
  }
  return std::sqrt(s);
}

// Torus distance of an index offset (di, dj).
double offset_distance(const Torus& t, int di, int dj) {
  const int n = t.points();
  auto fold = [n](int a) {
    a = ((a % n) + n) % n;
    return std::min(a, n - a);
  };
  const double h = t.spacing();
  const double x = fold(di) * h;
  const double y = fold(dj) * h;
  return std::sqrt(x * x + y * y);
}

}  // namespace

double estimate_holder_seminorm(const GridField& f, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "holder exponent must lie in (0,1)");
  require(f.points() > 0 && f.values().size() > 0, "empty field");
  const Torus& t = f.torus();
  const int n = t.points();
  const std::size_t np = f.points();
  double best = 0.0;
  if (np <= kFullPairLimit) {
    // Distance depends only on the index offset, so loop offsets outermost.
    const int ny = t.dimension() == 2 ? n : 1;
    for (int di = 0; di < n; ++di)
      for (int dj = 0; dj < ny; ++dj) {
        if (di == 0 && dj == 0) continue;
        const double w = std::pow(offset_distance(t, di, dj), -alpha);
        double m = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
          const auto ij = t.axis_indices(p);
          m = std::max(m, point_diff(f, p, t.flat_index(ij[0] + di, ij[1] + dj)));
        }
        best = std::max(best, m * w);
      }
    return best;
  }
  std::mt19937_64 rng(kPairSeed);
  std::uniform_int_distribution<std::size_t> pick(0, np - 1);
  for (std::size_t s = 0; s < kSampledPairs; ++s) {
    const std::size_t p = pick(rng);
    const std::size_t q = pick(rng);
    if (p == q) continue;
    const double dist = t.distance(t.coordinate(p), t.coordinate(q));
    best = std::max(best, point_diff(f, p, q) / std::pow(dist, alpha));
  }
  return best;
}

double estimate_zygmund_seminorm(const GridField& f, int k, double alpha) {
  require(k == 1 || k == 2, "zygmund order must be 1 or 2");
  require(alpha > 0.0 && alpha < 1.0, "holder exponent must lie in (0,1)");
  const Torus& t = f.torus();
  const int d = t.dimension();
  const int n = t.points();
  const double h = t.spacing();
  const std::size_t np = f.points();
  const int nc = f.components();

  // Shift directions: axes, plus diagonals in 2D.
  std::vector<std::array<int, 2>> dirs = {{1, 0}};
  if (d == 2) dirs = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

  double best = 0.0;
  std::vector<double> deriv(np * nc);
  for (int nu = 0; nu < d; ++nu) {
    for (std::size_t p = 0; p < np; ++p) {
      const auto ij = t.axis_indices(p);
      const std::size_t fwd = nu == 0 ? t.flat_index(ij[0] + 1, ij[1]) : t.flat_index(ij[0], ij[1] + 1);
      const std::size_t bwd = nu == 0 ? t.flat_index(ij[0] - 1, ij[1]) : t.flat_index(ij[0], ij[1] - 1);
      for (int c = 0; c < nc; ++c) deriv[p * nc + c] = (f.at(fwd, c) - f.at(bwd, c)) / (2.0 * h);
    }
    for (const auto& dir : dirs) {
      const double step = h * std::sqrt(double(dir[0] * dir[0] + dir[1] * dir[1]));
      for (int o = 1; o <= n / 2 && o * step <= 1.0 + 1e-12; ++o) {
        const int si = o * dir[0], sj = o * dir[1];
        double m = 0.0;
        for (std::size_t p = 0; p < np; ++p) {
          const auto ij = t.axis_indices(p);
          const std::size_t p1 = t.flat_index(ij[0] + si, ij[1] + sj);
          const std::size_t p2 = t.flat_index(ij[0] + 2 * si, ij[1] + 2 * sj);
          double s = 0.0;
          for (int c = 0; c < nc; ++c) {
            const double v = k == 1 ? deriv[p1 * nc + c] - deriv[p * nc + c]
                                    : deriv[p2 * nc + c] - 2.0 * deriv[p1 * nc + c] + deriv[p * nc + c];
            s += v * v;
          }
          m = std::max(m, std::sqrt(s));
        }
        best = std::max(best, m / std::pow(o * step, k + alpha - 1.0));
      }
    }
  }
  return best;
}

int derivative_order(NormKind kind) noexcept {
  switch (kind) {
    case NormKind::C0:
    case NormKind::C0a: return 0;
    case NormKind::C1:
    case NormKind::C1a: return 1;
    case NormKind::C2:
    case NormKind::C2a: return 2;
  }
  return 0;
}

bool has_holder_part(NormKind kind) noexcept {
  return kind == NormKind::C0a || kind == NormKind::C1a || kind == NormKind::C2a;
}

double HolderReport::norm() const noexcept {
  double s = sup_norm;
  for (double v : derivative_sup) s += v;
  return s + (order == 0 ? seminorm : derivative_seminorms.back());
}

namespace {

// All derivatives of order j as separate fields (one per multi-index).
std::vector<GridField> derivatives(Spectral& fft, const GridField& f, int j) {
  const int d = f.torus().dimension();
  std::vector<std::array<int, kMaxDim>> orders;
  if (d == 1) {
    orders.push_back({j, 0});
  } else {
    for (int a = 0; a <= j; ++a) orders.push_back({a, j - a});
  }
  std::vector<GridField> out;
  for (const auto& o : orders) {
    GridField g(f.torus(), f.components());
    for (int c = 0; c < f.components(); ++c) g.set_component(c, spectral_derivative(fft, f.component(c), o));
    out.push_back(std::move(g));
  }
  return out;
}

HolderReport build_report(const GridField& f, int k, double alpha, bool seminorms) {
  HolderReport r;
  r.order = k;
  r.alpha = alpha;
  r.sup_norm = f.sup_norm();
  if (seminorms) r.seminorm = estimate_holder_seminorm(f, alpha);
  if (k > 0) {
    Spectral fft(f.torus());
    for (int j = 1; j <= k; ++j) {
      double sup = 0.0, semi = 0.0;
      for (const auto& g : derivatives(fft, f, j)) {
        sup = std::max(sup, g.sup_norm());
        if (seminorms) semi = std::max(semi, estimate_holder_seminorm(g, alpha));
      }
      r.derivative_sup.push_back(sup);
      r.derivative_seminorms.push_back(semi);
    }
    if (seminorms) r.zygmund = estimate_zygmund_seminorm(f, k, alpha);
  }
  return r;
}

}  // namespace

HolderReport holder_report(const GridField& f, int k, double alpha) {
  require(k >= 0 && k <= 2, "holder report order must be 0, 1 or 2");
  return build_report(f, k, alpha, true);
}

double slice_norm(const GridField& f, NormKind kind, double alpha) {
  const int k = derivative_order(kind);
  const bool semi = has_holder_part(kind);
  HolderReport r;
  if (semi) {
    r.order = k;
    r.alpha = alpha;
    r.sup_norm = f.sup_norm();
    if (k == 0) r.seminorm = estimate_holder_seminorm(f, alpha);
    if (k > 0) {
      Spectral fft(f.torus());
      for (int j = 1; j <= k; ++j) {
        double sup = 0.0, s = 0.0;
        for (const auto& g : derivatives(fft, f, j)) {
          sup = std::max(sup, g.sup_norm());
          if (j == k) s = std::max(s, estimate_holder_seminorm(g, alpha));
        }
        r.derivative_sup.push_back(sup);
        r.derivative_seminorms.push_back(s);
      }
    }
    return r.norm();
  }
  r = build_report(f, k, alpha, false);
  double s = r.sup_norm;
  for (double v : r.derivative_sup) s += v;
  return s;
}

double lq_time_norm(const std::vector<double>& g, const TimeGrid& grid, TimeSampling sampling,
                    double q) {
  for (double v : g)
    if (!std::isfinite(v)) fail(ErrorCode::non_finite, "non-finite slice norm");
  const double dt = grid.dt();
  double integral = 0.0;
  if (sampling == TimeSampling::nodes) {
    for (std::size_t k = 0; k + 1 < g.size(); ++k)
      integral += 0.5 * dt * (std::pow(g[k], q) + std::pow(g[k + 1], q));
  } else {
    for (std::size_t k = 1; k < g.size(); ++k) integral += dt * std::pow(g[k], q);
    const double g0 = std::pow(g[0], q);
    double first = dt * g0;
    if (g.size() >= 2 && g0 > 0.0) {
      const double g1 = std::pow(g[1], q);
      if (g1 > 0.0) {
        const double p = std::log(g0 / g1) / std::log(3.0);
        if (p > 1e-3 && p < 1.0) first = g0 * dt * std::pow(2.0, -p) / (1.0 - p);
      }
    }
    integral += first;
  }
  return std::pow(integral, 1.0 / q);
}

double lq_time_norm(const TimeIndexedField& F, NormKind kind) {
  std::vector<double> g(F.size());
  for (std::size_t k = 0; k < F.size(); ++k) g[k] = slice_norm(F.slice(k), kind, F.alpha());
  return lq_time_norm(g, F.grid(), F.sampling(), F.q());
}

double linf_time_norm(const TimeIndexedField& F, NormKind kind) {
  double best = 0.0;
  for (std::size_t k = 0; k < F.size(); ++k)
    best = std::max(best, slice_norm(F.slice(k), kind, F.alpha()));
  return best;
}

}  // namespace roughflow
