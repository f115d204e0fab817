#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pikfnn/kernels.hpp"

using namespace pikfnn;

namespace {

WaveContext ctx_k(double k) {
  // direct construction: kernel tests drive the wavenumber directly
  WaveContext ctx;
  ctx.frequency_hz = k * 1500.0 / (2.0 * std::numbers::pi);
  ctx.sound_speed_ms = 1500.0;
  ctx.density_kgm3 = 1025.0;
  ctx.wavenumber = k;
  return ctx;
}

const WaveContext kSeawater = make_wave_context(500.0, 1500.0, 1025.0);
const Sediment kPaperSediment{2600.0, 1620.0};

double rel_diff(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * ((gen() >> 11) * 0x1.0p-53);
  }
  Point3 point(double lo, double hi) {
    return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
  }
};

Shallow paper_shallow(Beta1Mode mode = Beta1Mode::PerImageAngle) {
  Shallow s;
  s.surface_distance_m = 10.0;
  s.depth_m = 20.0;
  s.sediment = kPaperSediment;
  s.beta1_mode = mode;
  return s;
}

}  // namespace

TEST_CASE("unbounded kernel closed-form values") {
  const Point3 origin{0, 0, 0};

  SUBCASE("k = 0 gives 1/R") {
    const Complex v = kernel_unbounded({1, 0, 0}, origin, ctx_k(0.0));
    CHECK(v.real() == 1.0);
    CHECK(v.imag() == 0.0);
  }
  SUBCASE("k = 1 at unit distance") {
    const Complex v = kernel_unbounded({1, 0, 0}, origin, ctx_k(1.0));
    CHECK(std::abs(v.real() - 0.5403023058681398) <= 1e-15);
    CHECK(std::abs(v.imag() - 0.8414709848078965) <= 1e-15);
  }
  SUBCASE("3-4-5 triangle, k = 2") {
    const Complex v = kernel_unbounded({3, 4, 0}, origin, ctx_k(2.0));
    const Complex expected = std::exp(Complex{0.0, 10.0}) / 5.0;
    CHECK(std::abs(v - expected) <= 1e-15);
    CHECK(std::abs(v.real() - -0.1678143058152905) <= 1e-15);
    CHECK(std::abs(v.imag() - -0.10880422217787396) <= 1e-15);
  }
  SUBCASE("coincident points are singular") {
    CHECK_THROWS_AS(kernel_unbounded(origin, origin, ctx_k(1.0)), SingularEvaluation);
    CHECK_THROWS_AS(kernel_unbounded({1e-13, 0, 0}, origin, ctx_k(1.0)),
                    SingularEvaluation);
  }
}

TEST_CASE("unbounded kernel reciprocity and decay") {
  Rng rng(42);
  for (int i = 0; i < 100; ++i) {
    const Point3 x = rng.point(-5, 5);
    const Point3 s = rng.point(-5, 5);
    if (distance(x, s) < 0.1) continue;
    const double k = rng.uniform(0.1, 20.0);
    const Complex a = kernel_unbounded(x, s, ctx_k(k));
    const Complex b = kernel_unbounded(s, x, ctx_k(k));
    CHECK(a.real() == b.real());
    CHECK(a.imag() == b.imag());
    // |psi| * R = 1 up to the rounding of abs(polar(...)); 2 ulp
    CHECK(std::abs(std::abs(a) * distance(x, s) - 1.0) <= 4.5e-16);
  }
}

TEST_CASE("deep kernel") {
  const double h = 20.0;

  SUBCASE("vanishes exactly on the pressure-release surface") {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
      Point3 s = rng.point(-4, 4);
      s.z = rng.uniform(-15, h - 0.5);
      Point3 x = rng.point(-30, 30);
      x.z = h;
      if (distance(x, s) < 0.5) continue;
      const Complex v = kernel_deep(x, s, ctx_k(rng.uniform(0.1, 10.0)), h);
      CHECK(v.real() == 0.0);
      CHECK(v.imag() == 0.0);
    }
  }
  SUBCASE("distant surface reduces to the unbounded kernel") {
    const Point3 x{1.0, 0.5, -0.3};
    const Point3 s{0.2, 0.0, 0.1};
    const Complex free = kernel_unbounded(x, s, ctx_k(2.0));
    const Complex half = kernel_deep(x, s, ctx_k(2.0), 1e9);
    CHECK(rel_diff(half, free) <= 1e-8);
  }
  SUBCASE("independent scalar evaluation") {
    const Complex v = kernel_deep({3, 0, 0}, {0, 0, 0}, ctx_k(1.0), h);
    const double rb = std::sqrt(9.0 + 1600.0);
    const Complex expected =
        std::exp(Complex{0.0, 3.0}) / 3.0 - std::exp(Complex{0.0, rb}) / rb;
    CHECK(std::abs(v - expected) <= 1e-15);
    CHECK(rel_diff(v, Complex{-0.31139311123205693, 0.030445401139374717}) <= 1e-12);
  }
  SUBCASE("reciprocity") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
      Point3 x = rng.point(-5, 5);
      Point3 s = rng.point(-5, 5);
      x.z = rng.uniform(-10, h - 0.1);
      s.z = rng.uniform(-10, h - 0.1);
      if (distance(x, s) < 0.1) continue;
      const double k = rng.uniform(0.1, 10.0);
      const Complex a = kernel_deep(x, s, ctx_k(k), h);
      const Complex b = kernel_deep(s, x, ctx_k(k), h);
      CHECK(rel_diff(a, b) <= 1e-12);
    }
  }
  SUBCASE("singular at the mirror image") {
    const Point3 s{1, 1, 3};
    const Point3 image{1, 1, 2 * h - 3};
    CHECK_THROWS_AS(kernel_deep(image, s, ctx_k(1.0), h), SingularEvaluation);
  }
}

TEST_CASE("reflection coefficient") {
  SUBCASE("matched impedance reflects nothing") {
    const Sediment matched{1025.0, 1500.0};
    const Complex b = reflection_coefficient(0.0, kSeawater, matched);
    CHECK(b.real() == 0.0);
    CHECK(b.imag() == 0.0);
  }
  SUBCASE("rigid bottom limit") {
    const Sediment rigid{1.025e15, 1500.0};
    CHECK(std::abs(reflection_coefficient(0.0, kSeawater, rigid) - 1.0) <= 1e-10);
  }
  SUBCASE("reference sediment at normal incidence") {
    const Complex b = reflection_coefficient(0.0, kSeawater, kPaperSediment);
    CHECK(std::abs(b.real() - 0.46517088442473253) <= 1e-13);
    CHECK(b.imag() == 0.0);
  }
  SUBCASE("post-critical incidence is unimodular") {
    // critical angle asin(1500/1620) ~ 67.8 deg
    for (const double theta : {1.2, 1.4, 1.55}) {
      const Complex b = reflection_coefficient(theta, kSeawater, kPaperSediment);
      CHECK(std::abs(std::abs(b) - 1.0) <= 1e-12);
      CHECK(b.imag() != 0.0);
    }
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(reflection_coefficient(-0.1, kSeawater, kPaperSediment),
                    std::domain_error);
    CHECK_THROWS_AS(
        reflection_coefficient(std::numbers::pi / 2.0, kSeawater, kPaperSediment),
        std::domain_error);
    CHECK(std::abs(reflection_coefficient(std::numbers::pi / 2.0 - 1e-9, kSeawater,
                                          kPaperSediment)) <= 1.0 + 1e-12);
  }
  SUBCASE("modulus never exceeds one") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const Sediment sed{rng.uniform(100, 5000), rng.uniform(200, 4000)};
      const double theta = rng.uniform(0.0, std::numbers::pi / 2.0 - 1e-6);
      CHECK(std::abs(reflection_coefficient(theta, kSeawater, sed)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("shallow kernel degenerations") {
  const WaveContext ctx = ctx_k(2.0);
  const SeriesControl series;

  SUBCASE("beta1 = 0 reproduces the deep kernel bitwise") {
    Rng rng(19);
    for (int i = 0; i < 60; ++i) {
      Point3 x = rng.point(-8, 8);
      Point3 s = rng.point(-2, 2);
      x.z = rng.uniform(-9, 9.9);
      s.z = rng.uniform(-9, 9.9);
      if (distance(x, s) < 0.2) continue;
      const SeriesEval ev =
          kernel_shallow_with_beta1(x, s, ctx, 10.0, 20.0, Complex{0.0, 0.0}, series);
      const Complex deep = kernel_deep(x, s, ctx, 10.0);
      CHECK(ev.value.real() == deep.real());
      CHECK(ev.value.imag() == deep.imag());
      CHECK(ev.converged);
    }
  }
  SUBCASE("matched sediment at normal incidence degenerates too") {
    Shallow env = paper_shallow(Beta1Mode::NormalIncidence);
    env.sediment = {1025.0, 1500.0};
    const Point3 x{4.0, -1.0, 2.0};
    const Point3 s{0.1, 0.2, -0.3};
    const Complex v = kernel_shallow(x, s, ctx, env, series);
    const Complex deep = kernel_deep(x, s, ctx, 10.0);
    CHECK(v.real() == deep.real());
    CHECK(v.imag() == deep.imag());
  }
}

TEST_CASE("shallow kernel surface condition is exact at every truncation order") {
  const WaveContext ctx = ctx_k(2.0944);
  Rng rng(23);
  for (const int cap : {0, 1, 2, 7, 40}) {
    SeriesControl series;
    series.eps_rel = 1e-300;  // force the cap
    series.chi_max = cap;
    for (int i = 0; i < 50; ++i) {
      Point3 s = rng.point(-2, 2);
      s.z = rng.uniform(-9, 9);
      Point3 x{rng.uniform(-30, 30), rng.uniform(-30, 30), 10.0};
      if (distance(x, s) < 1.0) continue;
      for (const Beta1Mode mode : {Beta1Mode::PerImageAngle, Beta1Mode::NormalIncidence}) {
        const Complex v = kernel_shallow(x, s, ctx, paper_shallow(mode), series);
        CHECK(v.real() == 0.0);
        CHECK(v.imag() == 0.0);
      }
    }
  }
}

TEST_CASE("shallow series truncation") {
  const WaveContext ctx = make_wave_context(500.0, 1500.0, 1025.0);
  const Shallow env = paper_shallow();
  const Point3 x{10, 0, 0};
  const Point3 s{0, 0, 0.3};

  SeriesControl exhaustive;
  exhaustive.eps_rel = 1e-300;
  exhaustive.chi_max = 500;
  const Complex oracle = kernel_shallow(x, s, ctx, env, exhaustive);

  SUBCASE("adaptive truncation is stable and accurate") {
    const SeriesEval ev = kernel_shallow_ex(x, s, ctx, env, SeriesControl{});
    CHECK(ev.converged);
    CHECK(ev.orders_used < 200);

    SeriesControl plus5;
    plus5.eps_rel = 1e-300;
    plus5.chi_max = ev.orders_used + 5;
    const Complex refined = kernel_shallow(x, s, ctx, env, plus5);
    CHECK(rel_diff(ev.value, refined) < 1e-10);
    CHECK(rel_diff(ev.value, oracle) < 1e-10);
  }
  SUBCASE("truncation error bounded by eps_rel once converged") {
    for (const double eps : {1e-6, 1e-8, 1e-10}) {
      SeriesControl series;
      series.eps_rel = eps;
      const SeriesEval ev = kernel_shallow_ex(x, s, ctx, env, series);
      REQUIRE(ev.converged);
      CHECK(std::abs(ev.value - oracle) <= eps * std::abs(ev.value));
    }
  }
  SUBCASE("cap exhaustion reports non-convergence") {
    SeriesControl tight;
    tight.eps_rel = 1e-10;
    tight.chi_max = 3;
    const SeriesEval ev = kernel_shallow_ex(x, s, ctx, env, tight);
    CHECK_FALSE(ev.converged);
    CHECK(ev.orders_used == 3);
  }
  SUBCASE("normal-incidence mode is reciprocal") {
    Rng rng(31);
    SeriesControl tightened;
    tightened.eps_rel = 1e-15;
    tightened.chi_max = 400;
    const Shallow nenv = paper_shallow(Beta1Mode::NormalIncidence);
    for (int i = 0; i < 40; ++i) {
      Point3 a = rng.point(-6, 6);
      Point3 b = rng.point(-6, 6);
      a.z = rng.uniform(-9.5, 9.5);
      b.z = rng.uniform(-9.5, 9.5);
      if (distance(a, b) < 0.3) continue;
      const Complex ab = kernel_shallow(a, b, ctx, nenv, tightened);
      const Complex ba = kernel_shallow(b, a, ctx, nenv, tightened);
      CHECK(rel_diff(ab, ba) <= 1e-12);
    }
  }
  SUBCASE("group moduli obey the geometric tail bound") {
    const Shallow nenv = paper_shallow(Beta1Mode::NormalIncidence);
    const double beta1 = std::abs(reflection_coefficient(0.0, ctx, nenv.sediment));
    SeriesControl upto;
    upto.eps_rel = 1e-300;
    Complex prev{0.0, 0.0};
    for (int chi = 0; chi <= 15; ++chi) {
      upto.chi_max = chi;
      const Complex sum = kernel_shallow(x, s, ctx, nenv, upto);
      const double group = std::abs(sum - prev);
      prev = sum;
      if (chi == 0) continue;
      // image distances straight from the series definition
      const double hxy2 = 100.0;
      const double H = nenv.depth_m, h = nenv.surface_distance_m;
      const double r1 = std::sqrt(hxy2 + std::pow(2 * chi * H + x.z - s.z, 2));
      const double r2 =
          std::sqrt(hxy2 + std::pow(2 * chi * H + 2 * (H - h) + x.z + s.z, 2));
      const double r3 = std::sqrt(hxy2 + std::pow(2 * chi * H + 2 * h - x.z - s.z, 2));
      const double r4 = std::sqrt(hxy2 + std::pow(2 * (chi + 1) * H - x.z + s.z, 2));
      const double min_r = std::min(std::min(r1, r2), std::min(r3, r4));
      CHECK(group <= std::pow(beta1, chi) * 4.0 / min_r * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("finite-difference Helmholtz residual") {
  const Point3 origin{0, 0, 0};

  SUBCASE("free-field kernel is an exact solution") {
    const auto field = [&](const Point3& p) {
      return kernel_unbounded(p, origin, ctx_k(1.0));
    };
    const double r3 = helmholtz_residual(field, {2, 0, 0}, ctx_k(1.0), 1e-3);
    const double r2 = helmholtz_residual(field, {2, 0, 0}, ctx_k(1.0), 1e-2);
    CHECK(r3 <= 1e-4);
    CHECK(r2 / r3 > 50.0);  // second-order convergence, ratio ~ 100
    CHECK(r2 / r3 < 200.0);
  }
  SUBCASE("half-space kernel near the surface") {
    const auto field = [&](const Point3& p) {
      return kernel_deep(p, {0, 0, 5}, ctx_k(2.0), 20.0);
    };
    CHECK(helmholtz_residual(field, {3, 1, 19.5}, ctx_k(2.0), 1e-3) <= 1e-4);
  }
  SUBCASE("waveguide kernel with pinned truncation") {
    SeriesControl series;
    series.eps_rel = 1e-14;
    series.chi_max = 300;
    const Shallow env = paper_shallow();
    const WaveContext ctx = make_wave_context(500.0, 1500.0, 1025.0);
    const auto field = [&](const Point3& p) {
      return kernel_shallow(p, {0, 0, 0.5}, ctx, env, series);
    };
    CHECK(helmholtz_residual(field, {6, 1, 2}, ctx, 1e-3) <= 1e-4);
  }
  SUBCASE("halving the step reduces the residual at least 3x across kernels") {
    // the waveguide kernel is an exact solution for a constant sediment
    // coefficient; the per-image-angle variant carries a small O((1/kR)^2)
    // model error that does not shrink with the step (checked separately)
    Rng rng(57);
    SeriesControl series;
    series.eps_rel = 1e-14;
    series.chi_max = 300;
    const Shallow shallow_env = paper_shallow(Beta1Mode::NormalIncidence);
    int tested = 0;
    while (tested < 100) {
      // k >= 3 keeps the O(step^2) truncation term well above the rounding
      // floor of the second difference at step 1e-3
      const double k = rng.uniform(3.0, 10.0);
      const WaveContext ctx = ctx_k(k);
      const Point3 s{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      Point3 x = s + Point3{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
      const int which = tested % 3;
      if (which == 2) x.z = rng.uniform(-8, 8);
      const auto field = [&](const Point3& p) -> Complex {
        if (which == 0) return kernel_unbounded(p, s, ctx);
        if (which == 1) return kernel_deep(p, s, ctx, 20.0);
        return kernel_shallow(p, s, ctx, shallow_env, series);
      };
      if (distance(x, s) < 0.7 || distance(x, s) > 4.0) continue;
      const Complex value = field(x);
      // skip draws near field zeros, where the relative residual degenerates
      if (std::abs(value) * distance(x, s) < 0.3) continue;
      const double r_half = helmholtz_residual(field, x, ctx, 1e-3);
      const double r_full = helmholtz_residual(field, x, ctx, 2e-3);
      CHECK(r_half <= 1e-3);
      CHECK(r_full / r_half >= 3.0);
      ++tested;
    }
  }
  SUBCASE("per-image-angle residual stays within the coarse bound") {
    Rng rng(91);
    SeriesControl series;
    series.eps_rel = 1e-14;
    series.chi_max = 300;
    const Shallow env = paper_shallow(Beta1Mode::PerImageAngle);
    int tested = 0;
    while (tested < 30) {
      const double k = rng.uniform(3.0, 10.0);
      const WaveContext ctx = ctx_k(k);
      const Point3 s{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      Point3 x = s + Point3{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
      x.z = rng.uniform(-8, 8);
      if (distance(x, s) < 0.7 || distance(x, s) > 4.0) continue;
      const auto field = [&](const Point3& p) {
        return kernel_shallow(p, s, ctx, env, series);
      };
      if (std::abs(field(x)) * distance(x, s) < 0.3) continue;
      CHECK(helmholtz_residual(field, x, ctx, 1e-3) <= 1e-3);
      ++tested;
    }
  }
  SUBCASE("invalid step") {
    const auto field = [&](const Point3& p) {
      return kernel_unbounded(p, origin, ctx_k(1.0));
    };
    CHECK_THROWS_AS(helmholtz_residual(field, {2, 0, 0}, ctx_k(1.0), 0.0),
                    std::invalid_argument);
  }
}
