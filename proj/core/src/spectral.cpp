#include "roughflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "roughflow/error.hpp"

namespace roughflow {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Spectral::Impl {
  Torus torus;
  std::size_t real_size;
  std::size_t complex_size;
  double* rbuf = nullptr;
  fftw_complex* cbuf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit Impl(const Torus& t) : torus(t) {
    const int n = t.points();
    real_size = t.size();
    complex_size = t.dimension() == 1 ? static_cast<std::size_t>(n / 2 + 1)
                                      : static_cast<std::size_t>(n) * (n / 2 + 1);
    rbuf = fftw_alloc_real(real_size);
    cbuf = fftw_alloc_complex(complex_size);
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (t.dimension() == 1) {
      fwd = fftw_plan_dft_r2c_1d(n, rbuf, cbuf, FFTW_ESTIMATE);
      inv = fftw_plan_dft_c2r_1d(n, cbuf, rbuf, FFTW_ESTIMATE);
    } else {
      fwd = fftw_plan_dft_r2c_2d(n, n, rbuf, cbuf, FFTW_ESTIMATE);
      inv = fftw_plan_dft_c2r_2d(n, n, cbuf, rbuf, FFTW_ESTIMATE);
    }
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(rbuf);
    fftw_free(cbuf);
  }
};

Spectral::Spectral(const Torus& torus) : impl_(std::make_unique<Impl>(torus)) {}
Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

const Torus& Spectral::torus() const noexcept { return impl_->torus; }
std::size_t Spectral::spectrum_size() const noexcept { return impl_->complex_size; }

std::array<int, kMaxDim> Spectral::mode(std::size_t idx) const noexcept {
  const int n = impl_->torus.points();
  if (impl_->torus.dimension() == 1) return {static_cast<int>(idx), 0};
  const int half = n / 2 + 1;
  const int i = static_cast<int>(idx / half);
  const int j = static_cast<int>(idx % half);
  return {i <= n / 2 ? i : i - n, j};
}

Point Spectral::wavevector(std::size_t idx) const noexcept {
  const auto m = mode(idx);
  const double k0 = 2.0 * std::numbers::pi / impl_->torus.length();
  return {k0 * m[0], k0 * m[1]};
}

bool Spectral::is_nyquist(std::size_t idx) const noexcept {
  const auto m = mode(idx);
  const int h = impl_->torus.points() / 2;
  return std::abs(m[0]) == h || std::abs(m[1]) == h;
}

void Spectral::forward(std::span<const double> in, std::vector<Complex>& out) {
  require(in.size() == impl_->real_size, "spectral forward: size mismatch");
  std::copy(in.begin(), in.end(), impl_->rbuf);
  fftw_execute(impl_->fwd);
  out.resize(impl_->complex_size);
  for (std::size_t i = 0; i < impl_->complex_size; ++i)
    out[i] = Complex(impl_->cbuf[i][0], impl_->cbuf[i][1]);
}

void Spectral::inverse(std::span<const Complex> in, std::span<double> out) {
  require(in.size() == impl_->complex_size && out.size() == impl_->real_size,
          "spectral inverse: size mismatch");
  for (std::size_t i = 0; i < impl_->complex_size; ++i) {
    impl_->cbuf[i][0] = in[i].real();
    impl_->cbuf[i][1] = in[i].imag();
  }
  fftw_execute(impl_->inv);
  const double scale = 1.0 / static_cast<double>(impl_->real_size);
  for (std::size_t i = 0; i < impl_->real_size; ++i) out[i] = impl_->rbuf[i] * scale;
}

void Spectral::apply(std::span<const double> in, std::span<double> out,
                     const std::function<Complex(const Point&, bool)>& multiplier) {
  std::vector<Complex> c;
  forward(in, c);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= multiplier(wavevector(i), is_nyquist(i));
  inverse(c, out);
}

std::vector<double> spectral_derivative(Spectral& fft, std::span<const double> f,
                                        std::array<int, kMaxDim> order) {
  const int total = order[0] + order[1];
  std::vector<double> out(f.size());
  fft.apply(f, out, [&](const Point& k, bool nyquist) -> Complex {
    if (nyquist && (total % 2 == 1)) return 0.0;
    Complex m = 1.0;
    for (int a = 0; a < kMaxDim; ++a)
      for (int r = 0; r < order[a]; ++r) m *= Complex(0.0, k[a]);
    return m;
  });
  return out;
}

GridField gradient(const GridField& f) {
  Spectral fft(f.torus());
  return gradient(fft, f);
}

GridField gradient(Spectral& fft, const GridField& f) {
  const int d = f.torus().dimension();
  GridField out(f.torus(), f.components() * d);
  for (int c = 0; c < f.components(); ++c) {
    const auto comp = f.component(c);
    for (int j = 0; j < d; ++j) {
      std::array<int, kMaxDim> ord{};
      ord[j] = 1;
      out.set_component(c * d + j, spectral_derivative(fft, comp, ord));
    }
  }
  return out;
}

GridField hessian(Spectral& fft, const GridField& f) {
  const int d = f.torus().dimension();
  GridField out(f.torus(), f.components() * d * d);
  for (int c = 0; c < f.components(); ++c) {
    const auto comp = f.component(c);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        std::array<int, kMaxDim> ord{};
        ord[i] += 1;
        ord[j] += 1;
        const auto dij = spectral_derivative(fft, comp, ord);
        out.set_component((c * d + i) * d + j, dij);
        if (i != j) out.set_component((c * d + j) * d + i, dij);
      }
  }
  return out;
}

GridField laplacian(Spectral& fft, const GridField& f) {
  GridField out(f.torus(), f.components());
  for (int c = 0; c < f.components(); ++c) {
    const auto comp = f.component(c);
    std::vector<double> lap(comp.size());
    fft.apply(comp, lap, [](const Point& k, bool) -> Complex { return -(k[0] * k[0] + k[1] * k[1]); });
    out.set_component(c, lap);
  }
  return out;
}

}  // namespace roughflow
