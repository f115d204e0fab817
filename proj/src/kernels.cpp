#include "pikfnn/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pikfnn {

namespace {

// Shared monopole term e^{ikR}/R. All kernels go through this one helper so
// that degenerate cases (shallow -> deep -> unbounded) reproduce each other
// bit for bit.
inline Complex monopole(double k, double R) {
  return std::polar(1.0 / R, k * R);
}

[[noreturn]] void throw_singular(double R) {
  std::ostringstream os;
  os << "kernel evaluated at a coincident source/image point (distance " << R << " m)";
  throw SingularEvaluation(os.str());
}

inline double checked_distance(double hxy2, double v) {
  const double R = std::sqrt(hxy2 + v * v);
  if (R < kSingularDistance) throw_singular(R);
  return R;
}

// Integer power by repeated squaring; z^0 == 1 exactly.
inline Complex cpow_int(Complex z, int n) {
  Complex result{1.0, 0.0};
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

// Sediment coefficient policies for the image series. Both receive the
// image ray's direction sine/cosine (hxy/R, |v|/R), which spares the series
// an atan2 and a sincos per term on the angle-dependent path.

struct ConstantBeta1 {
  Complex value;
  bool always_zero() const { return value == Complex{0.0, 0.0}; }
  Complex eval(double, double) const { return value; }
};

struct PerAngleBeta1 {
  double rho_ratio;    // rho1 / rho0
  double c_ratio_sq;   // (c0 / c1)^2
  bool always_zero() const { return false; }
  Complex eval(double sin_theta, double cos_theta) const {
    const double g = c_ratio_sq - sin_theta * sin_theta;
    const Complex root =
        g >= 0.0 ? Complex{std::sqrt(g), 0.0} : Complex{0.0, std::sqrt(-g)};
    const double a = rho_ratio * cos_theta;
    return (a - root) / (a + root);
  }
};

// Incidence angles are clamped just below grazing, matching the clamp of
// theta to [0, pi/2 - 1e-9] in angle form.
constexpr double kMinRayCos = 1e-9;

// One image group of the waveguide series. The vertical offsets are written
// so that the surface-cancelling partners (R1,R3) and (R2,R4) evaluate to
// bitwise-identical distances on z = h, which makes the pressure-release
// condition hold exactly at every truncation order.
template <class Beta1Policy>
SeriesEval shallow_series(const Point3& x, const Point3& s, double k, double h,
                          double H, const Beta1Policy& beta1,
                          const SeriesControl& series) {
  const double dx = x.x - s.x;
  const double dy = x.y - s.y;
  const double hxy2 = dx * dx + dy * dy;
  const double hxy = std::sqrt(hxy2);
  const double two_h = 2.0 * h;
  const double z = x.z;
  const double sz = s.z;

  SeriesEval out;
  Complex acc{0.0, 0.0};
  for (int chi = 0; chi <= series.chi_max; ++chi) {
    const double tch = 2.0 * chi * H;
    const double a2 = tch + 2.0 * H;  // 2(chi+1)H
    const double v1 = (tch + z) - sz;
    const double v3 = (tch + (two_h - z)) - sz;
    const double v2 = (a2 - (two_h - z)) + sz;
    const double v4 = (a2 - z) + sz;
    const double sgn = (chi & 1) ? -1.0 : 1.0;  // beta2^chi with beta2 = -1

    // term index: vertical offset, beta1 power, sign of beta2 power
    struct Term {
      double v;
      int beta1_power;
      double sign;
    };
    const Term terms[4] = {{v1, chi, sgn},
                           {v3, chi, -sgn},
                           {v2, chi + 1, sgn},
                           {v4, chi + 1, -sgn}};

    Complex group{0.0, 0.0};
    Complex pair{0.0, 0.0};
    double group_max_sq = 0.0;
    for (int t = 0; t < 4; ++t) {
      const Term& term = terms[t];
      Complex contrib{0.0, 0.0};
      if (term.beta1_power == 0 || !beta1.always_zero()) {
        const double R = checked_distance(hxy2, term.v);
        Complex coef{term.sign, 0.0};
        if (term.beta1_power > 0) {
          double cos_theta = std::abs(term.v) / R;
          double sin_theta = hxy / R;
          if (cos_theta < kMinRayCos) cos_theta = kMinRayCos;
          coef = term.sign *
                 cpow_int(beta1.eval(sin_theta, cos_theta), term.beta1_power);
        }
        if (coef != Complex{0.0, 0.0}) {
          contrib = coef * monopole(k, R);
          group_max_sq = std::max(group_max_sq, std::norm(contrib));
        }
      }
      // accumulate as (t1 + t3) + (t2 + t4): the cancelling partners meet first
      if (t & 1) {
        group += pair + contrib;
      } else {
        pair = contrib;
      }
    }
    acc += group;
    out.orders_used = chi;
    // 4x: a group holds four terms, so this keeps the whole remaining tail
    // below eps_rel * |sum| for geometric decay ratios up to ~1/2
    if (4.0 * std::sqrt(group_max_sq) <= series.eps_rel * std::abs(acc)) {
      out.converged = true;
      break;
    }
  }
  out.value = acc;
  return out;
}

}  // namespace

double norm(const Point3& p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }

double distance(const Point3& a, const Point3& b) { return norm(a - b); }

WaveContext make_wave_context(double frequency_hz, double sound_speed_ms,
                              double density_kgm3) {
  if (!(frequency_hz > 0.0)) throw std::invalid_argument("frequency must be > 0");
  if (!(sound_speed_ms > 0.0)) throw std::invalid_argument("sound speed must be > 0");
  if (!(density_kgm3 > 0.0)) throw std::invalid_argument("density must be > 0");
  WaveContext ctx;
  ctx.frequency_hz = frequency_hz;
  ctx.sound_speed_ms = sound_speed_ms;
  ctx.density_kgm3 = density_kgm3;
  ctx.wavenumber = 2.0 * std::numbers::pi * frequency_hz / sound_speed_ms;
  return ctx;
}

void validate(const Environment& env) {
  std::visit(
      [](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Deep>) {
          if (!(e.surface_distance_m > 0.0))
            throw std::invalid_argument("deep environment: surface distance h must be > 0");
        } else if constexpr (std::is_same_v<T, Shallow>) {
          if (!(e.surface_distance_m > 0.0))
            throw std::invalid_argument("shallow environment: surface distance h must be > 0");
          if (!(e.depth_m > e.surface_distance_m))
            throw std::invalid_argument("shallow environment: requires 0 < h < H");
          if (!(e.sediment.density_kgm3 > 0.0) || !(e.sediment.sound_speed_ms > 0.0))
            throw std::invalid_argument("sediment density and sound speed must be > 0");
        }
      },
      env);
}

const char* environment_name(const Environment& env) {
  if (std::holds_alternative<Unbounded>(env)) return "unbounded";
  if (std::holds_alternative<Deep>(env)) return "deep";
  return "shallow";
}

void validate(const SeriesControl& series) {
  if (!(series.eps_rel > 0.0)) throw std::invalid_argument("series eps_rel must be > 0");
  if (series.chi_max < 0) throw std::invalid_argument("series chi_max must be >= 0");
}

Complex kernel_unbounded(const Point3& x, const Point3& s, const WaveContext& ctx) {
  const double dx = x.x - s.x;
  const double dy = x.y - s.y;
  const double dz = x.z - s.z;
  const double R = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (R < kSingularDistance) throw_singular(R);
  return monopole(ctx.wavenumber, R);
}

Complex kernel_deep(const Point3& x, const Point3& s, const WaveContext& ctx,
                    double surface_distance_m) {
  const double dx = x.x - s.x;
  const double dy = x.y - s.y;
  const double hxy2 = dx * dx + dy * dy;
  // Vertical offsets in the same form the shallow series uses at chi = 0,
  // so the beta1 = 0 degeneration is exact.
  const double va = x.z - s.z;
  const double vb = (2.0 * surface_distance_m - x.z) - s.z;
  const double Ra = checked_distance(hxy2, va);
  const double Rb = checked_distance(hxy2, vb);
  return monopole(ctx.wavenumber, Ra) - monopole(ctx.wavenumber, Rb);
}

Complex reflection_coefficient(double theta, const WaveContext& ctx, const Sediment& sed) {
  if (!(theta >= 0.0) || theta >= std::numbers::pi / 2.0)
    throw std::domain_error("reflection_coefficient: incidence angle outside [0, pi/2)");
  if (!(sed.density_kgm3 > 0.0) || !(sed.sound_speed_ms > 0.0))
    throw std::invalid_argument("sediment density and sound speed must be > 0");
  const double ratio = ctx.sound_speed_ms / sed.sound_speed_ms;
  const double st = std::sin(theta);
  const double g = ratio * ratio - st * st;
  // Past critical incidence the root turns imaginary; +i branch keeps |beta1| = 1.
  const Complex root = g >= 0.0 ? Complex{std::sqrt(g), 0.0} : Complex{0.0, std::sqrt(-g)};
  const double a = sed.density_kgm3 * std::cos(theta) / ctx.density_kgm3;
  return (a - root) / (a + root);
}

SeriesEval kernel_shallow_ex(const Point3& x, const Point3& s, const WaveContext& ctx,
                             const Shallow& env, const SeriesControl& series) {
  validate(Environment{env});
  validate(series);
  if (env.beta1_mode == Beta1Mode::PerImageAngle) {
    const double ratio = ctx.sound_speed_ms / env.sediment.sound_speed_ms;
    const PerAngleBeta1 beta1{env.sediment.density_kgm3 / ctx.density_kgm3,
                              ratio * ratio};
    return shallow_series(x, s, ctx.wavenumber, env.surface_distance_m, env.depth_m,
                          beta1, series);
  }
  const ConstantBeta1 beta1{reflection_coefficient(0.0, ctx, env.sediment)};
  return shallow_series(x, s, ctx.wavenumber, env.surface_distance_m, env.depth_m,
                        beta1, series);
}

Complex kernel_shallow(const Point3& x, const Point3& s, const WaveContext& ctx,
                       const Shallow& env, const SeriesControl& series) {
  return kernel_shallow_ex(x, s, ctx, env, series).value;
}

SeriesEval kernel_shallow_with_beta1(const Point3& x, const Point3& s,
                                     const WaveContext& ctx, double surface_distance_m,
                                     double depth_m, Complex beta1,
                                     const SeriesControl& series) {
  validate(series);
  if (!(surface_distance_m > 0.0) || !(depth_m > surface_distance_m))
    throw std::invalid_argument("waveguide geometry requires 0 < h < H");
  return shallow_series(x, s, ctx.wavenumber, surface_distance_m, depth_m,
                        ConstantBeta1{beta1}, series);
}

Complex kernel_eval(const Environment& env, const Point3& x, const Point3& s,
                    const WaveContext& ctx, const SeriesControl& series,
                    SeriesEval* status) {
  return std::visit(
      [&](const auto& e) -> Complex {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Unbounded>) {
          const Complex v = kernel_unbounded(x, s, ctx);
          if (status) *status = SeriesEval{v, 0, true};
          return v;
        } else if constexpr (std::is_same_v<T, Deep>) {
          const Complex v = kernel_deep(x, s, ctx, e.surface_distance_m);
          if (status) *status = SeriesEval{v, 0, true};
          return v;
        } else {
          const SeriesEval ev = kernel_shallow_ex(x, s, ctx, e, series);
          if (status) *status = ev;
          return ev.value;
        }
      },
      env);
}

}  // namespace pikfnn
