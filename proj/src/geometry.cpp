#include "pikfnn/geometry.hpp"

#include <cmath>
#include <numbers>

namespace pikfnn {

PointSet sonar_array(const ArraySpec& spec) {
  if (spec.n_lines < 1 || spec.n_hydrophones < 1)
    throw std::invalid_argument("sonar_array: counts must be >= 1");
  if (!(spec.line_spacing_m > 0.0) || !(spec.hydrophone_spacing_m > 0.0))
    throw std::invalid_argument("sonar_array: spacings must be > 0");

  PointSet set;
  set.label = "sonar-array";
  set.points.reserve(static_cast<std::size_t>(spec.n_lines) * spec.n_hydrophones);
  const double y_mid = (spec.n_lines - 1) / 2.0;
  const double z_mid = (spec.n_hydrophones - 1) / 2.0;
  for (int iy = 0; iy < spec.n_lines; ++iy) {
    const double y = (iy - y_mid) * spec.line_spacing_m;
    for (int iz = 0; iz < spec.n_hydrophones; ++iz) {
      const double z = (iz - z_mid) * spec.hydrophone_spacing_m;
      set.points.push_back({spec.standoff_x_m, y, z});
    }
  }
  return set;
}

PointSet fibonacci_sphere(int n, double radius, const Point3& center) {
  if (n < 1) throw std::invalid_argument("fibonacci_sphere: n must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("fibonacci_sphere: radius must be > 0");

  PointSet set;
  set.label = "fibonacci-sphere";
  set.points.reserve(static_cast<std::size_t>(n));
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(1.0 - z * z);
    const double theta = golden_angle * i;
    set.points.push_back({center.x + radius * (rho * std::cos(theta)),
                          center.y + radius * (rho * std::sin(theta)),
                          center.z + radius * z});
  }
  return set;
}

PointSet rect_grid(double x_min, double x_max, double z_min, double z_max, int n_x,
                   int n_z, double y) {
  if (!(x_max > x_min) || !(z_max > z_min))
    throw std::invalid_argument("rect_grid: max must exceed min");
  if (n_x < 2 || n_z < 2) throw std::invalid_argument("rect_grid: counts must be >= 2");

  PointSet set;
  set.label = "rect-grid";
  set.points.reserve(static_cast<std::size_t>(n_x) * n_z);
  const double dx = (x_max - x_min) / (n_x - 1);
  const double dz = (z_max - z_min) / (n_z - 1);
  for (int ix = 0; ix < n_x; ++ix) {
    const double x = x_min + ix * dx;
    for (int iz = 0; iz < n_z; ++iz) {
      set.points.push_back({x, y, z_min + iz * dz});
    }
  }
  return set;
}

}  // namespace pikfnn
