#include "roughflow/interpolant.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "roughflow/error.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {

FourierInterpolant::FourierInterpolant(const GridField& f, double rel_threshold)
    : dim_(f.torus().dimension()), components_(f.components()) {
  const Torus& torus = f.torus();
  k0_ = 2.0 * std::numbers::pi / torus.length();
  Spectral fft(torus);
  std::vector<std::vector<Complex>> spectra(components_);
  double cmax = 0.0;
  for (int c = 0; c < components_; ++c) {
    fft.forward(f.component(c), spectra[c]);
    for (const auto& z : spectra[c]) cmax = std::max(cmax, std::abs(z));
  }
  if (cmax == 0.0) return;
  const double cut = rel_threshold * cmax;
  const double scale = 1.0 / static_cast<double>(torus.size());
  for (std::size_t idx = 0; idx < fft.spectrum_size(); ++idx) {
    if (fft.is_nyquist(idx)) continue;
    double mag = 0.0;
    for (int c = 0; c < components_; ++c) mag = std::max(mag, std::abs(spectra[c][idx]));
    if (mag <= cut) continue;
    const auto m = fft.mode(idx);
    const int last = dim_ == 1 ? m[0] : m[1];
    const double w = (last == 0 ? 1.0 : 2.0) * scale;
    modes_.push_back(m);
    max_mode_ = std::max({max_mode_, std::abs(m[0]), std::abs(m[1])});
    for (int c = 0; c < components_; ++c) {
      coeffs_.push_back(w * spectra[c][idx].real());
      coeffs_.push_back(w * spectra[c][idx].imag());
    }
  }
}

void FourierInterpolant::evaluate(const Point& x, double* value, double* grad,
                                  double* hess) const {
  const int d = dim_;
  const int nc = components_;
  if (value)
    for (int c = 0; c < nc; ++c) value[c] = 0.0;
  if (grad)
    for (int i = 0; i < nc * d; ++i) grad[i] = 0.0;
  if (hess)
    for (int i = 0; i < nc * d * d; ++i) hess[i] = 0.0;
  if (modes_.empty()) return;

  // Dense spectra use a table of powers of exp(i k0 x); sparse ones call
  // sincos per mode.
  const bool table = static_cast<std::size_t>(max_mode_) <= 4 * modes_.size();
  thread_local std::vector<std::complex<double>> px, py;
  if (table) {
    auto build = [&](double xa, std::vector<std::complex<double>>& p) {
      p.resize(2 * max_mode_ + 1);
      const std::complex<double> e(std::cos(k0_ * xa), std::sin(k0_ * xa));
      p[max_mode_] = 1.0;
      for (int m = 1; m <= max_mode_; ++m) {
        p[max_mode_ + m] = p[max_mode_ + m - 1] * e;
        p[max_mode_ - m] = std::conj(p[max_mode_ + m]);
      }
    };
    build(x[0], px);
    if (d == 2) build(x[1], py);
  }

  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const auto& m = modes_[i];
    double cs, sn;
    if (table) {
      std::complex<double> e = px[max_mode_ + m[0]];
      if (d == 2) e *= py[max_mode_ + m[1]];
      cs = e.real();
      sn = e.imag();
    } else {
      const double th = k0_ * (m[0] * x[0] + (d == 2 ? m[1] * x[1] : 0.0));
      cs = std::cos(th);
      sn = std::sin(th);
    }
    const double k[2] = {k0_ * m[0], k0_ * m[1]};
    const double* cf = &coeffs_[2 * nc * i];
    for (int c = 0; c < nc; ++c) {
      const double re = cf[2 * c];
      const double im = cf[2 * c + 1];
      const double r = re * cs - im * sn;
      const double s = re * sn + im * cs;
      if (value) value[c] += r;
      if (grad)
        for (int a = 0; a < d; ++a) grad[c * d + a] -= k[a] * s;
      if (hess)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) hess[(c * d + a) * d + b] -= k[a] * k[b] * r;
    }
  }
}

double FourierInterpolant::value(const Point& x, int component) const {
  std::vector<double> v(components_);
  evaluate(x, v.data());
  return v[component];
}

SpaceTimeInterpolant::SpaceTimeInterpolant(const TimeIndexedField& f, double rel_threshold)
    : grid_(f.grid()), sampling_(f.sampling()) {
  slices_.reserve(f.size());
  for (const auto& s : f.slices()) slices_.emplace_back(s, rel_threshold);
}

const FourierInterpolant& SpaceTimeInterpolant::for_step(double t_from, double t_to) const noexcept {
  const double dt = grid_.dt();
  const int m = grid_.steps();
  std::size_t k;
  if (sampling_ == TimeSampling::cells) {
    const int c = static_cast<int>(std::floor(0.5 * (t_from + t_to) / dt));
    k = static_cast<std::size_t>(std::clamp(c, 0, m - 1));
  } else {
    const double x = t_from / dt;
    const int c = t_to >= t_from ? static_cast<int>(std::floor(x + 1e-9))
                                 : static_cast<int>(std::ceil(x - 1e-9));
    k = static_cast<std::size_t>(std::clamp(c, 0, m));
  }
  return slices_[k];
}

}  // namespace roughflow
