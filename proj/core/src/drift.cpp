#include "roughflow/drift.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "roughflow/error.hpp"
#include "roughflow/holder.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {
namespace {

struct Octave {
  std::array<int, 2> dir;
  double phase;
};

// Phases and directions; the first J+1 entries do not depend on J.
std::vector<std::vector<Octave>> draw_octaves(const DriftSpec& spec, int d, int J) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> pick(0, 3);
  static constexpr std::array<std::array<int, 2>, 4> dirs{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  std::vector<std::vector<Octave>> out(d);
  for (int j = 0; j <= J; ++j)
    for (int c = 0; c < d; ++c) {
      Octave o;
      o.phase = phase(rng);
      const int which = pick(rng);
      o.dir = d == 1 ? std::array<int, 2>{1, 0} : dirs[which];
      out[c].push_back(o);
    }
  return out;
}

GridField spatial_profile(const DriftSpec& spec, const Torus& torus, int J) {
  const int d = torus.dimension();
  const auto oct = draw_octaves(spec, d, J);
  const double k0 = 2.0 * std::numbers::pi / torus.length();
  GridField f(torus, d);
  for (std::size_t p = 0; p < torus.size(); ++p) {
    const Point x = torus.coordinate(p);
    for (int c = 0; c < d; ++c) {
      double s = 0.0;
      for (int j = 0; j <= J; ++j) {
        const auto& o = oct[c][j];
        const double freq = std::ldexp(1.0, j);
        s += std::pow(freq, -spec.alpha) * std::cos(freq * k0 * (o.dir[0] * x[0] + o.dir[1] * x[1]) + o.phase);
      }
      f.at(p, c) = spec.amplitude * s;
    }
  }
  return f;
}

void check_spec(const DriftSpec& spec, const Torus& torus) {
  require(spec.alpha > 0.0 && spec.alpha < 1.0, "drift alpha must lie in (0,1)");
  require(spec.q >= 2.0, "drift q must be >= 2");
  require(spec.theta >= 0.0 && spec.theta * spec.q < 1.0, "drift theta must satisfy 0 <= theta q < 1");
  require(spec.J >= 0, "drift octave count must be nonnegative");
  const int reach = torus.dimension() == 2 ? 2 : 1;  // diagonal directions double the index reach
  require(std::ldexp(1.0, spec.J) * reach <= torus.points() / 4.0,
          "unresolvable drift: need 2^J <= N/4 along every axis");
}

double temporal_bump(double s) {
  return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
}

}  // namespace

TimeIndexedField generate_drift(const DriftSpec& spec, const Torus& torus, const TimeGrid& grid) {
  check_spec(spec, torus);
  const GridField profile = spatial_profile(spec, torus, spec.J);
  std::vector<GridField> slices;
  slices.reserve(grid.steps());
  for (int k = 0; k < grid.steps(); ++k) {
    const double factor = std::pow(grid.midpoint(k) / grid.horizon(), -spec.theta);
    slices.push_back(factor * profile);
  }
  return TimeIndexedField(grid, TimeSampling::cells, std::move(slices), spec.q, spec.alpha);
}

TimeIndexedField mollify_drift(const TimeIndexedField& b, double eps) {
  require(eps > 0.0 && std::isfinite(eps), "mollification scale must be positive");
  const Torus& torus = b.torus();
  Spectral fft(torus);
  std::vector<GridField> spatial;
  spatial.reserve(b.size());
  std::vector<double> buf(torus.size());
  for (const auto& s : b.slices()) {
    GridField out(torus, s.components());
    for (int c = 0; c < s.components(); ++c) {
      fft.apply(s.component(c), buf, [eps](const Point& k, bool) -> Complex {
        return std::exp(-0.5 * eps * eps * (k[0] * k[0] + k[1] * k[1]));
      });
      out.set_component(c, buf);
    }
    spatial.push_back(std::move(out));
  }

  const int width = static_cast<int>(std::ceil(eps / b.grid().dt() - 1e-9));
  const int half = width / 2;
  if (half == 0) return TimeIndexedField(b.grid(), b.sampling(), std::move(spatial), b.q(), b.alpha());
  std::vector<double> w(2 * half + 1);
  double total = 0.0;
  for (int j = -half; j <= half; ++j) total += w[j + half] = temporal_bump(j / (half + 1.0));
  for (auto& x : w) x /= total;

  const int n = static_cast<int>(spatial.size());
  std::vector<GridField> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    GridField acc(torus, b.components());
    for (int j = -half; j <= half; ++j) {
      const int src = k + j;
      if (src < 0 || src >= n) continue;  // zero extension
      auto a = acc.values();
      auto s = spatial[src].values();
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += w[j + half] * s[i];
    }
    out.push_back(std::move(acc));
  }
  return TimeIndexedField(b.grid(), b.sampling(), std::move(out), b.q(), b.alpha());
}

RoughnessProbe roughness_probe(const DriftSpec& spec, int points, double alpha_probe) {
  const Torus coarse_t(1, 2.0 * std::numbers::pi, points);
  const Torus fine_t(1, 2.0 * std::numbers::pi, 2 * points);
  check_spec(spec, coarse_t);
  RoughnessProbe r;
  r.alpha_probe = alpha_probe;
  r.coarse = estimate_holder_seminorm(spatial_profile(spec, coarse_t, spec.J), alpha_probe);
  r.fine = estimate_holder_seminorm(spatial_profile(spec, fine_t, spec.J + 1), alpha_probe);
  r.ratio = r.fine / r.coarse;
  return r;
}

DriftCertificate certify_drift(const DriftSpec& spec, const TimeIndexedField& b) {
  DriftCertificate c;
  std::vector<double> norms(b.size());
  // Slices are scalar multiples of one profile, so one seminorm suffices.
  const GridField profile = spatial_profile(spec, b.torus(), spec.J);
  const double base = slice_norm(profile, NormKind::C0a, spec.alpha);
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double factor = std::pow(b.slice_time(k) / b.grid().horizon(), -spec.theta);
    norms[k] = factor * base;
  }
  c.lq_c0a = lq_time_norm(norms, b.grid(), b.sampling(), spec.q);
  c.sup_slice_c0a = *std::max_element(norms.begin(), norms.end());
  const int n1 = b.torus().dimension() == 1 ? b.torus().points() : std::max(64, b.torus().points());
  c.at_alpha = roughness_probe(spec, n1, spec.alpha);
  c.above_alpha = roughness_probe(spec, n1, std::min(spec.alpha + 0.2, 0.99));
  return c;
}

}  // namespace roughflow
