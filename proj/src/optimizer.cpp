#include "pikfnn/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace pikfnn {

namespace {

// In-place LL^H factorisation of a Hermitian positive definite matrix
// (row-major, full storage). Returns false on a non-positive pivot.
bool cholesky_llh(ComplexVector& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j].real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(a[j * n + k]);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = Complex{ljj, 0.0};
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k)
        s -= a[i * n + k] * std::conj(a[j * n + k]);
      a[i * n + j] = s / ljj;
    }
  }
  return true;
}

// Solve L L^H x = b with the factor produced above.
ComplexVector cholesky_solve(const ComplexVector& l, std::size_t n, ComplexVector b) {
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
    b[i] = s / l[i * n + i].real();
  }
  for (std::size_t ii = n; ii-- > 0;) {
    Complex s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l[k * n + ii]) * b[k];
    b[ii] = s / l[ii * n + ii].real();
  }
  return b;
}

double max_component_step(const ComplexVector& delta) {
  double m = 0.0;
  for (const Complex& d : delta)
    m = std::max(m, std::max(std::abs(d.real()), std::abs(d.imag())));
  return m;
}

constexpr double kLambdaCeiling = 1e32;

}  // namespace

void validate(const SolverSettings& s) {
  if (!(s.tol > 0.0)) throw std::invalid_argument("solver tol must be > 0");
  if (s.max_iter < 1) throw std::invalid_argument("solver max_iter must be >= 1");
  if (!(s.lambda0 > 0.0)) throw std::invalid_argument("solver lambda0 must be > 0");
  if (!(s.lambda_factor > 1.0))
    throw std::invalid_argument("solver lambda_factor must be > 1");
  if (!(s.svd_cutoff > 0.0) || !(s.svd_cutoff < 1.0))
    throw std::invalid_argument("solver svd_cutoff must be in (0, 1)");
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::ParamTol: return "ParamTol";
    case StopReason::LossTol: return "LossTol";
    case StopReason::MaxIter: return "MaxIter";
  }
  return "unknown";
}

FitResult lm_fit(const KernelMatrix& matrix, std::span<const Complex> targets,
                 const SolverSettings& settings,
                 const std::optional<ComplexVector>& initial_weights) {
  validate(settings);
  if (targets.size() != matrix.rows)
    throw std::invalid_argument("lm_fit: target length does not match matrix rows");
  const std::size_t m = matrix.cols;

  ComplexVector w(m, Complex{0.0, 0.0});
  if (initial_weights) {
    if (initial_weights->size() != m)
      throw std::invalid_argument("lm_fit: initial weight length mismatch");
    w = *initial_weights;
  }

  const ComplexVector g_matrix = gram(matrix);

  auto residual_of = [&](const ComplexVector& weights) {
    ComplexVector r = matvec(matrix, weights);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= targets[i];
    return r;
  };
  auto loss_of = [&](const ComplexVector& r, int iteration) {
    double acc = 0.0;
    for (const Complex& c : r) acc += std::norm(c);
    const double value = acc / static_cast<double>(r.size());
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "lm_fit: non-finite loss at iteration " << iteration;
      throw std::runtime_error(os.str());
    }
    return value;
  };

  ComplexVector r = residual_of(w);
  double current_loss = loss_of(r, 0);

  FitResult result;
  result.trace.initial_loss = current_loss;
  result.trace.stop_reason = StopReason::MaxIter;

  double lambda = settings.lambda0;
  for (int iter = 1; iter <= settings.max_iter; ++iter) {
    const ComplexVector gradient = adjoint_matvec(matrix, r);
    int rejections = 0;
    bool stopped = false;

    for (;;) {
      // damped normal equations (G + lambda I) delta = -gradient
      ComplexVector h = g_matrix;
      for (std::size_t j = 0; j < m; ++j) h[j * m + j] += lambda;
      if (!cholesky_llh(h, m)) {
        lambda *= settings.lambda_factor;
        ++rejections;
        if (lambda > kLambdaCeiling)
          throw std::runtime_error(
              "lm_fit: normal-equation solve failed at maximal damping");
        continue;
      }
      ComplexVector neg_g(m);
      for (std::size_t j = 0; j < m; ++j) neg_g[j] = -gradient[j];
      const ComplexVector delta = cholesky_solve(h, m, std::move(neg_g));
      const double step = max_component_step(delta);

      ComplexVector w_trial = w;
      for (std::size_t j = 0; j < m; ++j) w_trial[j] += delta[j];
      ComplexVector r_trial = residual_of(w_trial);
      const double loss_trial = loss_of(r_trial, iter);

      if (loss_trial <= current_loss) {
        const double decrement = current_loss - loss_trial;
        const double lambda_used = lambda;
        w = std::move(w_trial);
        r = std::move(r_trial);
        current_loss = loss_trial;
        lambda /= settings.lambda_factor;
        result.trace.iterations.push_back({current_loss, lambda_used, step, rejections});
        if (step < settings.tol) {
          result.trace.stop_reason = StopReason::ParamTol;
          stopped = true;
        } else if (decrement < settings.tol) {
          result.trace.stop_reason = StopReason::LossTol;
          stopped = true;
        }
        break;
      }

      // rejected: a vanishing proposed step means the iterate cannot move
      // and the parameter rule has converged; otherwise raise the damping
      if (step < settings.tol) {
        result.trace.iterations.push_back({current_loss, lambda, step, rejections});
        result.trace.stop_reason = StopReason::ParamTol;
        stopped = true;
        break;
      }
      lambda *= settings.lambda_factor;
      ++rejections;
      if (lambda > kLambdaCeiling)
        throw std::runtime_error(
            "lm_fit: normal-equation solve failed at maximal damping");
    }
    if (stopped) break;
  }

  result.weights = std::move(w);
  return result;
}

ComplexVector direct_least_squares(const KernelMatrix& matrix,
                                   std::span<const Complex> targets, double svd_cutoff) {
  if (targets.size() != matrix.rows)
    throw std::invalid_argument("direct_least_squares: target length mismatch");
  if (!(svd_cutoff > 0.0) || !(svd_cutoff < 1.0))
    throw std::invalid_argument("direct_least_squares: cutoff must be in (0, 1)");

  Eigen::MatrixXcd a(matrix.rows, matrix.cols);
  for (std::size_t i = 0; i < matrix.rows; ++i)
    for (std::size_t j = 0; j < matrix.cols; ++j) a(i, j) = matrix.at(i, j);
  Eigen::VectorXcd b(matrix.rows);
  for (std::size_t i = 0; i < matrix.rows; ++i) b(i) = targets[i];

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("direct_least_squares: decomposition failed");
  const auto& sigma = svd.singularValues();
  const double threshold = svd_cutoff * (sigma.size() > 0 ? sigma(0) : 0.0);

  Eigen::VectorXcd utb = svd.matrixU().adjoint() * b;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    utb(i) = sigma(i) >= threshold && sigma(i) > 0.0 ? utb(i) / sigma(i) : Complex{0.0, 0.0};
  Eigen::VectorXcd x = svd.matrixV() * utb;

  return ComplexVector(x.data(), x.data() + x.size());
}

}  // namespace pikfnn
