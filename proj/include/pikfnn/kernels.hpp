#pragma once

#include <cmath>
#include <complex>

#include "pikfnn/types.hpp"

namespace pikfnn {

/// Free-field Green's function e^{ikR}/R with R = |x - s|.
/// Outgoing-wave sign convention (+ik) under the e^{-i omega t} time factor.
Complex kernel_unbounded(const Point3& x, const Point3& s, const WaveContext& ctx);

/// Half-space kernel: free-field term minus the image of s mirrored across
/// the pressure-release surface z = +h. Vanishes identically on z = h.
Complex kernel_deep(const Point3& x, const Point3& s, const WaveContext& ctx,
                    double surface_distance_m);

/// Result of a truncated image-series evaluation.
struct SeriesEval {
  Complex value{0.0, 0.0};
  int orders_used = 0;     // highest image order chi evaluated
  bool converged = false;  // tail tolerance met before the chi_max cap
};

/// Waveguide kernel: image series over surface (-1) and sediment (beta1)
/// reflections, truncated adaptively. Adds image groups until the largest
/// term modulus of a group drops below eps_rel * |accumulated sum|, capped
/// at chi_max.
SeriesEval kernel_shallow_ex(const Point3& x, const Point3& s, const WaveContext& ctx,
                             const Shallow& env, const SeriesControl& series);
Complex kernel_shallow(const Point3& x, const Point3& s, const WaveContext& ctx,
                       const Shallow& env, const SeriesControl& series);

/// Same series with a caller-supplied constant sediment coefficient
/// (e.g. 0 for a transparent bottom, +1 for a rigid one). With beta1 = 0
/// the series degenerates to kernel_deep term for term.
SeriesEval kernel_shallow_with_beta1(const Point3& x, const Point3& s,
                                     const WaveContext& ctx, double surface_distance_m,
                                     double depth_m, Complex beta1,
                                     const SeriesControl& series);

/// Plane-wave reflection coefficient of the seawater/sediment interface,
/// incidence angle theta in [0, pi/2). Past the critical angle the root is
/// taken as +i*sqrt(|.|), so |beta1| = 1.
Complex reflection_coefficient(double theta, const WaveContext& ctx, const Sediment& sed);

/// Environment dispatch used by matrix assembly and field evaluation.
/// For shallow environments *status (if non-null) receives the series
/// truncation outcome.
Complex kernel_eval(const Environment& env, const Point3& x, const Point3& s,
                    const WaveContext& ctx, const SeriesControl& series,
                    SeriesEval* status = nullptr);

/// Relative finite-difference Helmholtz residual |lap(psi) + k^2 psi| /
/// (k^2 |psi|) with second-order central differences of width `step`.
/// The field callable must be evaluable on the 7-point stencil around x.
template <class FieldFn>
double helmholtz_residual(FieldFn&& field, const Point3& x, const WaveContext& ctx,
                          double step) {
  if (!(step > 0.0)) throw std::invalid_argument("helmholtz_residual: step must be > 0");
  const Complex center = field(x);
  Complex lap{0.0, 0.0};
  const Point3 offsets[3] = {{step, 0, 0}, {0, step, 0}, {0, 0, step}};
  for (const Point3& e : offsets) {
    lap += field(x + e) - 2.0 * center + field(x - e);
  }
  lap /= step * step;
  const double k2 = ctx.wavenumber * ctx.wavenumber;
  return std::abs(lap + k2 * center) / (k2 * std::abs(center));
}

}  // namespace pikfnn
