#include "roughflow/heat_kernel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "roughflow/error.hpp"
#include "roughflow/holder.hpp"

namespace roughflow {
namespace {

constexpr double kTailTarget = 1e-12;

// One-dimensional periodized kernel at x in [-L/2, L/2).
double periodized_1d(double x, double t, double L, int R) {
  const double pre = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
  double s = 0.0;
  for (int m = -R; m <= R; ++m) {
    const double y = x + m * L;
    s += std::exp(-y * y / (4.0 * t));
  }
  return pre * s;
}

}  // namespace

double image_tail_bound(const Torus& torus, double t, int images) {
  // Each omitted image sits at distance >= (|m| - 1/2) L from x.
  const double L = torus.length();
  const double pre = 1.0 / std::sqrt(4.0 * std::numbers::pi * t);
  double tail = 0.0;
  for (int m = images + 1; m < images + 200; ++m) {
    const double y = (m - 0.5) * L;
    const double term = 2.0 * pre * std::exp(-y * y / (4.0 * t));
    tail += term;
    if (term < 1e-300) break;
  }
  if (torus.dimension() == 2) {
    const double full = periodized_1d(0.0, t, L, images) + tail;
    tail = 2.0 * full * tail;
  }
  return tail;
}

int default_image_radius(const Torus& torus, double t) {
  require(t > 0.0, "heat kernel time must be positive");
  int r = 1;
  while (image_tail_bound(torus, t, r) >= kTailTarget && r < 100000) ++r;
  return std::max(6, r);
}

GridField kernel_values(const HeatKernelSpec& spec) {
  require(spec.t > 0.0 && std::isfinite(spec.t), "heat kernel time must be positive");
  const int R = spec.images == 0 ? default_image_radius(spec.torus, spec.t) : spec.images;
  require(R >= 3, "image radius must be at least 3");
  const Torus& torus = spec.torus;
  const int n = torus.points();
  const double L = torus.length();
  const double h = torus.spacing();
  // The periodized Gaussian factorizes over axes.
  std::vector<double> axis(n);
  for (int i = 0; i < n; ++i) {
    const double x = i < n / 2 ? i * h : (i - n) * h;
    axis[i] = periodized_1d(x, spec.t, L, R);
  }
  GridField out(torus, 1);
  for (std::size_t p = 0; p < torus.size(); ++p) {
    const auto ij = torus.axis_indices(p);
    out.at(p) = torus.dimension() == 1 ? axis[ij[0]] : axis[ij[0]] * axis[ij[1]];
  }
  return out;
}

GridField heat_convolve(const GridField& f, double t) {
  Spectral fft(f.torus());
  return heat_convolve(fft, f, t);
}

GridField heat_convolve(Spectral& fft, const GridField& f, double t) {
  require(t >= 0.0 && std::isfinite(t), "heat convolution time must be nonnegative");
  require(f.all_finite(), "heat convolution of a non-finite field");
  if (t == 0.0) return f;
  GridField out(f.torus(), f.components());
  std::vector<double> buf(f.points());
  for (int c = 0; c < f.components(); ++c) {
    const auto comp = f.component(c);
    fft.apply(comp, buf, [t](const Point& k, bool) -> Complex {
      return std::exp(-(k[0] * k[0] + k[1] * k[1]) * t);
    });
    out.set_component(c, buf);
  }
  return out;
}

GridField lacunary_field(const Torus& torus, double alpha, std::span<const double> phases) {
  const double k0 = 2.0 * std::numbers::pi / torus.length();
  GridField f(torus, 1);
  for (std::size_t p = 0; p < torus.size(); ++p) {
    const double x = torus.coordinate(p)[0];
    double s = 0.0;
    for (std::size_t j = 0; j < phases.size(); ++j) {
      const double freq = std::ldexp(1.0, static_cast<int>(j));
      s += std::pow(freq, -alpha) * std::cos(freq * k0 * x + phases[j]);
    }
    f.at(p) = s;
  }
  return f;
}

std::string ScalingReport::to_json() const {
  nlohmann::json j{{"order", order},
                   {"alpha", alpha},
                   {"fitted_slope", fitted_slope},
                   {"r_squared", r_squared},
                   {"implied_C", implied_C}};
  return j.dump();
}

std::vector<double> geometric_sequence(double a, double b, int n) {
  require(a > 0.0 && b > a && n >= 2, "geometric sequence needs 0 < a < b and n >= 2");
  std::vector<double> out(n);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) out[i] = std::exp(la + (lb - la) * i / (n - 1));
  return out;
}

std::vector<ScalingReport> verify_derivative_scaling(double alpha, const std::vector<int>& orders,
                                                     const ScalingOptions& opt) {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  for (int o : orders) require(o >= 1 && o <= 3, "derivative orders must be 1, 2 or 3");
  const Torus torus(1, 2.0 * std::numbers::pi, opt.points);
  const int J = static_cast<int>(std::log2(opt.points / 4));
  require(J >= 2, "grid too coarse for the scaling test");
  std::vector<double> times = opt.times;
  if (times.empty()) times = geometric_sequence(std::pow(4.0, -J), std::pow(4.0, -J / 2.0), 31);

  const int reals = opt.smooth_control ? 1 : std::max(1, opt.realizations);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<GridField> fields;
  double seminorm = 0.0;
  for (int r = 0; r < reals; ++r) {
    std::vector<double> ph(J + 1);
    for (auto& p : ph) p = phase(rng);
    if (opt.smooth_control) ph.assign(1, 0.0);
    fields.push_back(lacunary_field(torus, alpha, ph));
    if (r == 0) seminorm = estimate_holder_seminorm(fields.back(), alpha);
  }

  Spectral fft(torus);
  std::vector<ScalingReport> reports;
  for (int order : orders) {
    std::vector<double> lt, ly;
    double cmax = 0.0;
    for (double t : times) {
      double mean_log = 0.0;
      for (const auto& f : fields) {
        std::vector<double> g(f.points());
        fft.apply(f.values(), g, [&](const Point& k, bool nyq) -> Complex {
          if (nyq && order % 2 == 1) return 0.0;
          return std::pow(Complex(0.0, k[0]), order) * std::exp(-k[0] * k[0] * t);
        });
        double sup = 0.0;
        for (double v : g) sup = std::max(sup, std::abs(v));
        mean_log += std::log(sup);
      }
      mean_log /= static_cast<double>(fields.size());
      lt.push_back(std::log(t));
      ly.push_back(mean_log);
      cmax = std::max(cmax, std::exp(mean_log) / (std::pow(t, (alpha - order) / 2.0) * seminorm));
    }
    const double n = static_cast<double>(lt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      sx += lt[i];
      sy += ly[i];
      sxx += lt[i] * lt[i];
      sxy += lt[i] * ly[i];
      syy += ly[i] * ly[i];
    }
    const double cov = sxy - sx * sy / n;
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    ScalingReport rep;
    rep.order = order;
    rep.alpha = alpha;
    rep.fitted_slope = cov / vx;
    rep.r_squared = vy > 0.0 ? cov * cov / (vx * vy) : 1.0;
    rep.implied_C = cmax;
    if (!opt.smooth_control && rep.r_squared < opt.min_r_squared)
      fail(ErrorCode::fit_rejected, "log-log fit residual too large (r^2 = " +
                                        std::to_string(rep.r_squared) + ")");
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace roughflow
