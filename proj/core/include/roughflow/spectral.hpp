#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "roughflow/grid.hpp"

namespace roughflow {

using Complex = std::complex<double>;

/// Real-to-complex FFT pair on one torus. Owns its plans and scratch
/// buffers, so a single instance must not be shared between threads;
/// independent instances are fine.
class Spectral {
 public:
  explicit Spectral(const Torus& torus);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;

  const Torus& torus() const noexcept;
  /// Number of stored half-spectrum coefficients.
  std::size_t spectrum_size() const noexcept;
  /// Integer mode numbers (m_x, m_y) of half-spectrum slot `idx`.
  std::array<int, kMaxDim> mode(std::size_t idx) const noexcept;
  /// Physical wavevector 2 pi m / L of slot `idx`.
  Point wavevector(std::size_t idx) const noexcept;
  /// True when some axis sits on the Nyquist frequency.
  bool is_nyquist(std::size_t idx) const noexcept;

  /// Unnormalized forward transform of N^d real samples.
  void forward(std::span<const double> in, std::vector<Complex>& out);
  /// Normalized inverse: inverse(forward(f)) == f.
  void inverse(std::span<const Complex> in, std::span<double> out);

  /// out = F^{-1}[ m(k) F[in] ]; the multiplier must keep the field real.
  void apply(std::span<const double> in, std::span<double> out,
             const std::function<Complex(const Point&, bool nyquist)>& multiplier);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Spectral partial derivative of a scalar array; `order` holds the
/// derivative count per axis.
std::vector<double> spectral_derivative(Spectral& fft, std::span<const double> f,
                                        std::array<int, kMaxDim> order);

/// Gradient of every component: output component c * d + j is d_j f^c.
GridField gradient(const GridField& f);
GridField gradient(Spectral& fft, const GridField& f);
/// Hessian of every component: output component (c * d + i) * d + j.
GridField hessian(Spectral& fft, const GridField& f);
GridField laplacian(Spectral& fft, const GridField& f);

}  // namespace roughflow
