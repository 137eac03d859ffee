#pragma once

#include <string>
#include <vector>

#include "roughflow/grid.hpp"

namespace roughflow {

/// Estimated sup |f(x) - f(y)| / dist(x, y)^alpha over grid pairs, with the
/// torus metric. Every pair is visited when N^d <= 4096; larger grids use a
/// fixed-seed sample of 10^6 pairs.
double estimate_holder_seminorm(const GridField& f, double alpha);

/// Zygmund-type seminorm with m = 1: max over centered-difference first
/// derivatives d_nu f and lattice shifts |h| <= 1 of
/// ||Delta_h^k [d_nu f]||_inf / |h|^(k + alpha - 1). k is 1 or 2.
double estimate_zygmund_seminorm(const GridField& f, int k, double alpha);

enum class NormKind { C0, C1, C2, C0a, C1a, C2a };

int derivative_order(NormKind kind) noexcept;
bool has_holder_part(NormKind kind) noexcept;

struct HolderReport {
  double sup_norm = 0.0;
  double seminorm = 0.0;
  /// max_{|nu| = j} ||d_nu f||_inf for j = 1..k.
  std::vector<double> derivative_sup;
  /// max_{|nu| = j} [d_nu f]_alpha for j = 1..k.
  std::vector<double> derivative_seminorms;
  double zygmund = 0.0;
  int order = 0;
  double alpha = 0.5;

  /// C^{k,alpha} norm: sum of the sup parts plus the top-order seminorm.
  double norm() const noexcept;
};

/// Full report for order k in {0, 1, 2}; derivatives are spectral.
HolderReport holder_report(const GridField& f, int k, double alpha);

/// Norm of one slice in the requested space.
double slice_norm(const GridField& f, NormKind kind, double alpha);

/// (int_0^T ||F_t||^q dt)^(1/q) with q and alpha from the field metadata.
/// Node-sampled fields use the trapezoidal rule. Cell-sampled fields use the
/// midpoint rule, except on the first cell where a power law fitted to the
/// first two cells is integrated exactly (keeps t^-p singularities accurate).
double lq_time_norm(const TimeIndexedField& F, NormKind kind);

/// Same quadrature applied to precomputed per-slice norms.
double lq_time_norm(const std::vector<double>& slice_norms, const TimeGrid& grid,
                    TimeSampling sampling, double q);

/// max over slices of the slice norm.
double linf_time_norm(const TimeIndexedField& F, NormKind kind);

}  // namespace roughflow
