#include "pikfnn/oracles.hpp"

#include <cmath>
#include <random>

#include "pikfnn/kernels.hpp"

namespace pikfnn {

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform
// for a given seed, unlike the <random> distributions.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Complex pulsating_sphere_pressure(const Point3& point, const PulsatingSphere& sphere) {
  if (!(sphere.radius_m > 0.0))
    throw std::invalid_argument("pulsating sphere radius must be > 0");
  const double rbar = norm(point);
  if (rbar < sphere.radius_m)
    throw std::domain_error("pulsating_sphere_pressure: point inside the sphere");
  const double k = sphere.ctx.wavenumber;
  const double r = sphere.radius_m;
  const Complex ikr{0.0, k * r};
  const Complex impedance =
      ikr * (sphere.ctx.density_kgm3 * sphere.ctx.sound_speed_ms) / (ikr - 1.0);
  return (r / rbar) * impedance * sphere.velocity_ms *
         std::polar(1.0, k * (rbar - r));
}

void validate(const SyntheticSourceCloud& cloud) {
  if (cloud.positions.size() != cloud.strengths.size())
    throw std::invalid_argument("synthetic cloud: positions/strengths size mismatch");
  if (cloud.positions.empty())
    throw std::invalid_argument("synthetic cloud: no monopoles");
  if (!(cloud.envelope_radius_m > 0.0))
    throw std::invalid_argument("synthetic cloud: envelope radius must be > 0");
  for (const Point3& p : cloud.positions) {
    if (!(norm(p) < cloud.envelope_radius_m))
      throw std::invalid_argument("synthetic cloud: monopole outside the envelope");
  }
  for (const Complex& s : cloud.strengths) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw std::invalid_argument("synthetic cloud: non-finite strength");
  }
  validate(cloud.environment);
}

SyntheticSourceCloud make_synthetic_cloud(const Environment& env, int count,
                                          double envelope_radius_m, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("synthetic cloud: count must be >= 1");
  SyntheticSourceCloud cloud;
  cloud.environment = env;
  cloud.envelope_radius_m = envelope_radius_m;
  std::mt19937_64 rng(seed);
  while (static_cast<int>(cloud.positions.size()) < count) {
    const double x = 2.0 * uniform01(rng) - 1.0;
    const double y = 2.0 * uniform01(rng) - 1.0;
    const double z = 2.0 * uniform01(rng) - 1.0;
    if (x * x + y * y + z * z >= 0.98) continue;  // keep strictly inside
    cloud.positions.push_back(
        {envelope_radius_m * x, envelope_radius_m * y, envelope_radius_m * z});
    cloud.strengths.push_back(
        {2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0});
  }
  validate(cloud);
  return cloud;
}

ComplexVector synthetic_field(const SyntheticSourceCloud& cloud, const PointSet& points,
                              const WaveContext& ctx, const SeriesControl& series) {
  validate(cloud);
  ComplexVector field(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point3& p = points.points[i];
    if (!(norm(p) > cloud.envelope_radius_m))
      throw std::domain_error("synthetic_field: evaluation point inside the envelope");
    Complex acc{0.0, 0.0};
    for (std::size_t q = 0; q < cloud.positions.size(); ++q) {
      acc += cloud.strengths[q] *
             kernel_eval(cloud.environment, p, cloud.positions[q], ctx, series);
    }
    field[i] = acc;
  }
  return field;
}

}  // namespace pikfnn
