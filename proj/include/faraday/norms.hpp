#pragma once

#include "faraday/field.hpp"

namespace faraday {

/// H^s(Sigma) norm via the multiplier (1 + |k|^2)^s, summed over components. Exact for
/// band-limited fields, any real s >= -1.
double sobolev_norm_surface(const SurfaceField& f, double s);

/// H^k(Omega) norm: sum over all multi-indices |alpha| <= k of ||d^alpha f||_0^2, square-rooted.
/// Throws ConfigError for k outside [0, 4].
double sobolev_norm_volume(const VolumeField& f, int k);

/// Squared variants, convenient for functionals that sum squares.
double sobolev_norm_surface_sq(const SurfaceField& f, double s);
double sobolev_norm_volume_sq(const VolumeField& f, int k);

/// int_Sigma f g summed over components (real part of the spectral inner product).
double inner_surface(const SurfaceField& f, const SurfaceField& g);
/// int_Omega f g summed over components, Clenshaw-Curtis in x3.
double inner_volume(const VolumeField& f, const VolumeField& g);
/// int_Sigma f and int_Omega f for a single component.
double integrate_surface(const SurfaceField& f, int c = 0);
double integrate_volume(const VolumeField& f, int c = 0);

/// Harmonic extension: mode k is multiplied by exp(|k| x3).
VolumeField poisson_extend(const SurfaceField& f, const GridPtr& grid);

}  // namespace faraday
