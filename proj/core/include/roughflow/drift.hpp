#pragma once

#include <cstdint>

#include "roughflow/grid.hpp"

namespace roughflow {

/// b_t(x) = A (t/T)^(-theta) sum_{j=0}^{J} 2^(-j alpha) cos(2^j k0 <e_j, x> + phi_j)
/// per component, with k0 = 2 pi / L and phases/directions drawn from `seed`.
struct DriftSpec {
  double alpha = 0.5;
  double q = 2.0;
  int J = 6;
  double theta = 0.45;
  double amplitude = 1.0;
  std::uint64_t seed = 1;
};

/// Cell-sampled d-vector drift on the given grids. Requires 2^J <= N/4 and
/// 0 <= theta q < 1.
TimeIndexedField generate_drift(const DriftSpec& spec, const Torus& torus, const TimeGrid& grid);

/// Space-time mollification: spatial Fourier multiplier exp(-eps^2 |k|^2 / 2)
/// and a normalized C^inf bump over ceil(eps / dt) slices in time, with the
/// field extended by zero outside [0, T].
TimeIndexedField mollify_drift(const TimeIndexedField& b, double eps);

struct RoughnessProbe {
  double alpha_probe = 0.0;
  double coarse = 0.0;   // seminorm at (N, J)
  double fine = 0.0;     // seminorm at (2N, J + 1)
  double ratio = 0.0;    // fine / coarse
};

/// Holder seminorm at `alpha_probe` of one time-frozen spatial profile at two
/// resolutions, where the finer one also resolves one more octave.
RoughnessProbe roughness_probe(const DriftSpec& spec, int points, double alpha_probe);

struct DriftCertificate {
  double lq_c0a = 0.0;         // ||b||_{L^q_t C^{0,alpha}_x}
  double sup_slice_c0a = 0.0;  // max over slices of ||b_t||_{C^{0,alpha}}
  RoughnessProbe at_alpha;
  RoughnessProbe above_alpha;  // probe at alpha + 0.2 (capped below 1)
};

/// `b` must come from generate_drift(spec, ...): its slices are multiples of
/// one spatial profile.
DriftCertificate certify_drift(const DriftSpec& spec, const TimeIndexedField& b);

}  // namespace roughflow
