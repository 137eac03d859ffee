#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughflow/grid.hpp"
#include "roughflow/spectral.hpp"

namespace roughflow {

struct HeatKernelSpec {
  Torus torus;
  double t;
  /// Images kept per axis on each side; 0 selects default_image_radius.
  int images = 0;
};

/// Upper bound on the mass of the periodized kernel lost by keeping only
/// images |m| <= R on each axis.
double image_tail_bound(const Torus& torus, double t, int images);

/// max(6, smallest R whose tail bound is below 1e-12).
int default_image_radius(const Torus& torus, double t);

/// Periodized kernel (4 pi t)^(-d/2) sum_m exp(-|x + mL|^2 / 4t) on the grid,
/// with x taken in [-L/2, L/2)^d.
GridField kernel_values(const HeatKernelSpec& spec);

/// K_t * f via the Fourier multiplier exp(-|k|^2 t); t = 0 returns f.
GridField heat_convolve(const GridField& f, double t);
GridField heat_convolve(Spectral& fft, const GridField& f, double t);

/// sum_{j=0}^{J} 2^{-j alpha} cos(2^j k0 x + phase_j) along the first axis.
GridField lacunary_field(const Torus& torus, double alpha, std::span<const double> phases);

struct ScalingReport {
  int order = 1;
  double alpha = 0.5;
  double fitted_slope = 0.0;
  double r_squared = 0.0;
  double implied_C = 0.0;

  double expected_slope() const noexcept { return (alpha - order) / 2.0; }
  std::string to_json() const;
};

struct ScalingOptions {
  int points = 4096;
  /// Phase realizations averaged in log space before fitting.
  int realizations = 16;
  std::uint64_t seed = 20240611;
  /// Sample times; empty selects 31 log-spaced times in [4^-J, 4^(-J/2)],
  /// the window where every octave of the test field is resolved.
  std::vector<double> times;
  /// Fits with r^2 below this raise FitRejected.
  double min_r_squared = 0.98;
  /// Replace the rough series by cos(x) (smoothness control).
  bool smooth_control = false;
};

/// Log-log slope of ||d^nu (K_t * f)||_inf against t for each order in
/// {1, 2, 3}, with f the lacunary series of exponent alpha.
std::vector<ScalingReport> verify_derivative_scaling(double alpha, const std::vector<int>& orders,
                                                     const ScalingOptions& options = {});

/// Geometric sequence of n points from a to b inclusive.
std::vector<double> geometric_sequence(double a, double b, int n);

}  // namespace roughflow
