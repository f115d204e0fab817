#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pikfnn/geometry.hpp"
#include "pikfnn/optimizer.hpp"
#include "pikfnn/oracles.hpp"

using namespace pikfnn;

namespace {

// Synthetic dense systems exercise the solver without kernel physics.
KernelMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return (rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  KernelMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.entries.resize(rows * cols);
  m.env = Unbounded{};
  m.ctx = make_wave_context(1000, 1500, 1025);
  for (Complex& v : m.entries) v = {u(), u()};
  return m;
}

ComplexVector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return (rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  ComplexVector v(n);
  for (Complex& x : v) x = {u(), u()};
  return v;
}

double residual_loss(const KernelMatrix& m, const ComplexVector& w,
                     const ComplexVector& b) {
  const ComplexVector pred = matvec(m, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::norm(pred[i] - b[i]);
  return acc / static_cast<double>(pred.size());
}

}  // namespace

TEST_CASE("direct least squares") {
  SUBCASE("identity system") {
    KernelMatrix m = random_matrix(2, 2, 0);
    m.entries = {Complex{1, 0}, Complex{0, 0}, Complex{0, 0}, Complex{1, 0}};
    const ComplexVector b{{1, 0}, {0, 1}};
    const ComplexVector w = direct_least_squares(m, b, 1e-12);
    CHECK(std::abs(w[0] - Complex{1, 0}) <= 1e-14);
    CHECK(std::abs(w[1] - Complex{0, 1}) <= 1e-14);
  }
  SUBCASE("duplicated column returns the minimum-norm split") {
    // columns 0 and 1 identical: the minimum-norm solution shares the weight
    KernelMatrix m = random_matrix(6, 3, 3);
    for (std::size_t i = 0; i < m.rows; ++i) m.at(i, 1) = m.at(i, 0);
    const ComplexVector b = random_vector(6, 4);
    const ComplexVector w = direct_least_squares(m, b, 1e-12);
    CHECK(std::abs(w[0] - w[1]) <= 1e-10);

    // residual equals that of the deduplicated system
    KernelMatrix reduced = random_matrix(6, 2, 0);
    for (std::size_t i = 0; i < 6; ++i) {
      reduced.at(i, 0) = m.at(i, 0);
      reduced.at(i, 1) = m.at(i, 2);
    }
    const ComplexVector w_red = direct_least_squares(reduced, b, 1e-12);
    CHECK(residual_loss(m, w, b) ==
          doctest::Approx(residual_loss(reduced, w_red, b)).epsilon(1e-10));
  }
  SUBCASE("residual is orthogonal to the column span") {
    const KernelMatrix m = random_matrix(10, 6, 11);
    const ComplexVector b = random_vector(10, 12);
    const ComplexVector w = direct_least_squares(m, b, 1e-12);
    ComplexVector r = matvec(m, w);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    const ComplexVector proj = adjoint_matvec(m, r);
    double r_norm = 0.0, b_norm = 0.0;
    for (const Complex& v : r) r_norm += std::norm(v);
    for (const Complex& v : b) b_norm += std::norm(v);
    for (const Complex& v : proj) CHECK(std::abs(v) <= 1e-10 * std::sqrt(b_norm));
  }
  SUBCASE("cutoff domain") {
    const KernelMatrix m = random_matrix(3, 3, 5);
    const ComplexVector b = random_vector(3, 6);
    CHECK_THROWS_AS(direct_least_squares(m, b, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(direct_least_squares(m, b, 1.5), std::invalid_argument);
  }
}

TEST_CASE("levenberg-marquardt fit") {
  SolverSettings settings;

  SUBCASE("recovers an exactly representable target") {
    const KernelMatrix m = random_matrix(40, 25, 21);
    const ComplexVector w_true = random_vector(25, 22);
    const ComplexVector b = matvec(m, w_true);
    settings.tol = 1e-12;
    const FitResult fit = lm_fit(m, b, settings);
    CHECK(fit.trace.stop_reason != StopReason::MaxIter);
    for (std::size_t j = 0; j < w_true.size(); ++j)
      CHECK(std::abs(fit.weights[j] - w_true[j]) <= 1e-8 * std::abs(w_true[j]) + 1e-10);
  }
  SUBCASE("agrees with the direct solver on random instances") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const std::size_t rows = 15 + 7 * seed;
      const std::size_t cols = 10 + 3 * seed;
      const KernelMatrix m = random_matrix(rows, cols, 100 + seed);
      const ComplexVector b = random_vector(rows, 200 + seed);
      settings.tol = 1e-14;
      settings.max_iter = 300;
      const FitResult fit = lm_fit(m, b, settings);
      const ComplexVector w_svd = direct_least_squares(m, b, 1e-12);
      const double loss_lm = residual_loss(m, fit.weights, b);
      const double loss_svd = residual_loss(m, w_svd, b);
      CHECK(std::abs(loss_lm - loss_svd) <= 1e-10 * (1.0 + loss_svd));
    }
  }
  SUBCASE("agrees with the direct solver on the reference collocation system") {
    // genuine ill-conditioned instance (condition ~ 3e8, still < 1e10)
    const PointSet sources = fibonacci_sphere(153, 0.5, {0, 0, 0});
    const PointSet array = sonar_array(ArraySpec{});
    const WaveContext ctx = make_wave_context(6000.0, 1500.0, 1025.0);
    const KernelMatrix m = assemble(sources, array, Unbounded{}, ctx, SeriesControl{});
    PulsatingSphere sphere;
    sphere.ctx = ctx;
    ComplexVector b;
    for (const Point3& p : array.points)
      b.push_back(pulsating_sphere_pressure(p, sphere));

    settings.tol = 1e-14;
    settings.max_iter = 400;
    const FitResult fit = lm_fit(m, b, settings);
    const ComplexVector w_svd = direct_least_squares(m, b, 1e-12);
    const double loss_lm = residual_loss(m, fit.weights, b);
    const double loss_svd = residual_loss(m, w_svd, b);
    CHECK(std::abs(loss_lm - loss_svd) <= 1e-10 * (1.0 + loss_svd));
  }
  SUBCASE("trace bookkeeping") {
    const KernelMatrix m = random_matrix(30, 18, 31);
    const ComplexVector b = random_vector(30, 32);
    settings.tol = 1e-13;
    const FitResult fit = lm_fit(m, b, settings);
    REQUIRE_FALSE(fit.trace.iterations.empty());

    // accepted-step losses never increase
    double prev = fit.trace.initial_loss;
    for (const auto& it : fit.trace.iterations) {
      CHECK(it.loss <= prev);
      prev = it.loss;
    }
    // damping follows lambda0 * factor^rejections / factor exactly
    double lambda = settings.lambda0;
    for (const auto& it : fit.trace.iterations) {
      for (int r = 0; r < it.rejections; ++r) lambda *= settings.lambda_factor;
      CHECK(it.lambda == lambda);
      lambda /= settings.lambda_factor;
    }
    // stopping soundness
    const auto& last = fit.trace.iterations.back();
    if (fit.trace.stop_reason == StopReason::ParamTol) CHECK(last.max_step < settings.tol);
    if (fit.trace.stop_reason == StopReason::LossTol) {
      const double prev_loss = fit.trace.iterations.size() > 1
                                   ? fit.trace.iterations[fit.trace.iterations.size() - 2].loss
                                   : fit.trace.initial_loss;
      CHECK(prev_loss - last.loss < settings.tol);
    }
  }
  SUBCASE("starting at the optimum stops without increasing the loss") {
    const KernelMatrix m = random_matrix(20, 12, 41);
    const ComplexVector b = random_vector(20, 42);
    const ComplexVector w_opt = direct_least_squares(m, b, 1e-12);
    settings.tol = 1e-9;
    const FitResult fit = lm_fit(m, b, settings, w_opt);
    CHECK(fit.trace.stop_reason != StopReason::MaxIter);
    CHECK(fit.trace.final_loss() <= residual_loss(m, w_opt, b) * (1.0 + 1e-12));
  }
  SUBCASE("deterministic: identical inputs give identical traces and weights") {
    const KernelMatrix m = random_matrix(25, 16, 51);
    const ComplexVector b = random_vector(25, 52);
    const FitResult a = lm_fit(m, b, settings);
    const FitResult c = lm_fit(m, b, settings);
    REQUIRE(a.trace.iterations.size() == c.trace.iterations.size());
    for (std::size_t i = 0; i < a.trace.iterations.size(); ++i) {
      CHECK(a.trace.iterations[i].loss == c.trace.iterations[i].loss);
      CHECK(a.trace.iterations[i].lambda == c.trace.iterations[i].lambda);
      CHECK(a.trace.iterations[i].max_step == c.trace.iterations[i].max_step);
    }
    for (std::size_t j = 0; j < a.weights.size(); ++j) {
      CHECK(a.weights[j].real() == c.weights[j].real());
      CHECK(a.weights[j].imag() == c.weights[j].imag());
    }
  }
  SUBCASE("default weights are zero; explicit initial weights are honoured") {
    const KernelMatrix m = random_matrix(10, 5, 61);
    const ComplexVector b(10, Complex{0, 0});
    // zero targets from zero weights: initial loss must be exactly zero
    const FitResult fit = lm_fit(m, b, settings);
    CHECK(fit.trace.initial_loss == 0.0);
  }
  SUBCASE("input validation") {
    const KernelMatrix m = random_matrix(6, 4, 71);
    const ComplexVector b = random_vector(5, 72);
    CHECK_THROWS_AS(lm_fit(m, b, settings), std::invalid_argument);
    SolverSettings bad = settings;
    bad.lambda_factor = 1.0;
    CHECK_THROWS_AS(lm_fit(m, random_vector(6, 73), bad), std::invalid_argument);
    const ComplexVector wrong_init(3, Complex{0, 0});
    CHECK_THROWS_AS(lm_fit(m, random_vector(6, 74), settings, wrong_init),
                    std::invalid_argument);
  }
  SUBCASE("non-finite targets are reported with the iteration") {
    KernelMatrix m = random_matrix(5, 3, 81);
    ComplexVector b = random_vector(5, 82);
    b[2] = {std::numeric_limits<double>::infinity(), 0.0};
    CHECK_THROWS_WITH_AS(lm_fit(m, b, settings),
                         doctest::Contains("non-finite loss at iteration 0"),
                         std::runtime_error);
  }
  SUBCASE("unsolvable normal equations fail at maximal damping") {
    // entries near the overflow scale keep the residual finite but push the
    // Gram diagonal to infinity, so every factorisation attempt is rejected
    // until the damping ceiling is hit
    KernelMatrix m = random_matrix(5, 3, 91);
    for (Complex& v : m.entries) v *= 1e200;
    ComplexVector b(5, Complex{1.0, 0.0});
    CHECK_THROWS_WITH_AS(lm_fit(m, b, settings), doctest::Contains("maximal damping"),
                         std::runtime_error);
  }
}
