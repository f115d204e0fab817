#pragma once

#include <cstdint>

#include "pikfnn/types.hpp"

namespace pikfnn {

/// Uniformly pulsating sphere of radius r centred at the origin, radial
/// surface velocity v0: the closed-form exterior pressure field
/// p(rbar) = (r/rbar) * (i k r rho0 c0 / (i k r - 1)) * v0 * e^{ik(rbar - r)}.
struct PulsatingSphere {
  double radius_m = 1.0;
  double velocity_ms = 1e-4;
  WaveContext ctx;
};

/// Exterior pressure at `point`; throws std::domain_error inside the sphere.
Complex pulsating_sphere_pressure(const Point3& point, const PulsatingSphere& sphere);

/// A handful of monopoles placed strictly inside a spherical envelope around
/// the origin. Their superposed field plays the role of an externally
/// computed near-field solution: it satisfies the Helmholtz equation and the
/// environment's boundary conditions by construction, with known values
/// everywhere.
struct SyntheticSourceCloud {
  std::vector<Point3> positions;
  ComplexVector strengths;
  double envelope_radius_m = 0.0;
  Environment environment;
};

void validate(const SyntheticSourceCloud& cloud);

/// Deterministic cloud from a seed: `count` monopoles uniform in the
/// envelope ball, strengths uniform in the complex unit square.
SyntheticSourceCloud make_synthetic_cloud(const Environment& env, int count,
                                          double envelope_radius_m, std::uint64_t seed);

/// Superposed field of the cloud at the given points (all of which must lie
/// outside the envelope).
ComplexVector synthetic_field(const SyntheticSourceCloud& cloud, const PointSet& points,
                              const WaveContext& ctx, const SeriesControl& series);

}  // namespace pikfnn
