#pragma once

#include "pikfnn/types.hpp"

namespace pikfnn {

/// Planar sonar detection array in the x = standoff plane: n_lines vertical
/// hydrophone strings spread along y, n_hydrophones per string spread along z,
/// both sets centred on the axis of the structure.
struct ArraySpec {
  double standoff_x_m = 3.0;
  int n_lines = 9;
  double line_spacing_m = 0.5;
  int n_hydrophones = 17;
  double hydrophone_spacing_m = 0.5;
};

/// Row-major ordering: y (line) outer, z (hydrophone) inner.
PointSet sonar_array(const ArraySpec& spec);

/// Golden-angle Fibonacci lattice on a sphere; deterministic, every point at
/// exactly `radius` from `center`.
PointSet fibonacci_sphere(int n, double radius, const Point3& center);

/// Uniform rectangular lattice in the y = const plane.
/// Row-major ordering: x outer, z inner.
PointSet rect_grid(double x_min, double x_max, double z_min, double z_max, int n_x,
                   int n_z, double y);

}  // namespace pikfnn
