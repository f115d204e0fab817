#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pikfnn {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

// Distances below this are treated as a coincident source/field point.
inline constexpr double kSingularDistance = 1e-12;

/// Thrown when a kernel is evaluated at (or too close to) a source point
/// or one of its images.
class SingularEvaluation : public std::runtime_error {
 public:
  explicit SingularEvaluation(const std::string& what) : std::runtime_error(what) {}
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Point3 operator-(const Point3& a, const Point3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Point3 operator+(const Point3& a, const Point3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
double norm(const Point3& p);
double distance(const Point3& a, const Point3& b);

/// Time-harmonic wave parameters of the seawater medium.
/// wavenumber = 2*pi*frequency / sound_speed.
struct WaveContext {
  double frequency_hz = 0.0;
  double sound_speed_ms = 0.0;   // c0
  double density_kgm3 = 0.0;     // rho0
  double wavenumber = 0.0;       // k, rad/m
};

WaveContext make_wave_context(double frequency_hz, double sound_speed_ms,
                              double density_kgm3);

struct Sediment {
  double density_kgm3 = 0.0;     // rho1
  double sound_speed_ms = 0.0;   // c1
};

/// How the sediment reflection coefficient is evaluated inside the image
/// series: per image ray angle, or once at normal incidence.
enum class Beta1Mode { PerImageAngle, NormalIncidence };

struct Unbounded {};

/// Half-space ocean with a pressure-release surface at z = +h.
struct Deep {
  double surface_distance_m = 0.0;  // h > 0
};

/// Waveguide: surface at z = +h, sediment interface at z = -(H - h).
struct Shallow {
  double surface_distance_m = 0.0;  // h
  double depth_m = 0.0;             // H, requires 0 < h < H
  Sediment sediment;
  Beta1Mode beta1_mode = Beta1Mode::PerImageAngle;
};

using Environment = std::variant<Unbounded, Deep, Shallow>;

/// Throws std::invalid_argument if the environment parameters are
/// inconsistent (non-positive h, h >= H, bad sediment, ...).
void validate(const Environment& env);

const char* environment_name(const Environment& env);

/// Truncation control for the shallow-ocean image series.
struct SeriesControl {
  double eps_rel = 1e-10;  // relative tail tolerance, > 0
  int chi_max = 200;       // hard cap on the image order, >= 0
};

void validate(const SeriesControl& series);

struct PointSet {
  std::vector<Point3> points;
  std::string label;

  std::size_t size() const { return points.size(); }
};

}  // namespace pikfnn
