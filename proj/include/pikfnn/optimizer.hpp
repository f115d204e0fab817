#pragma once

#include <optional>
#include <span>

#include "pikfnn/model.hpp"
#include "pikfnn/types.hpp"

namespace pikfnn {

struct SolverSettings {
  double tol = 1e-6;          // shared stopping tolerance of both rules
  int max_iter = 500;
  double lambda0 = 1e-3;      // initial damping
  double lambda_factor = 10.0;  // damping up/down multiplier, > 1
  double svd_cutoff = 1e-12;  // relative singular-value threshold (direct solver)
};

void validate(const SolverSettings& settings);

enum class StopReason { ParamTol, LossTol, MaxIter };

const char* stop_reason_name(StopReason r);

/// Per-iteration record of the fit. `lambda` is the damping the accepted
/// step was solved with; `rejections` counts trial steps discarded (each of
/// which multiplied the damping by lambda_factor) before this acceptance.
struct FitTrace {
  struct Iteration {
    double loss = 0.0;
    double lambda = 0.0;
    double max_step = 0.0;  // max over the 2M real weight components
    int rejections = 0;
  };
  double initial_loss = 0.0;
  std::vector<Iteration> iterations;
  StopReason stop_reason = StopReason::MaxIter;

  std::size_t iteration_count() const { return iterations.size(); }
  double final_loss() const {
    return iterations.empty() ? initial_loss : iterations.back().loss;
  }
};

struct FitResult {
  ComplexVector weights;
  FitTrace trace;
};

/// Levenberg-Marquardt minimisation of the mean squared pressure error over
/// the complex output weights (treated as 2M real parameters, real and
/// imaginary parts interleaved). The model is linear in the weights, so the
/// Jacobian is constant and each step solves the damped normal equations
/// (A^H A + lambda I) delta = -A^H r: iterated ridge regression. Stops when
/// the max real-component step or the loss decrement falls below tol,
/// whichever happens first, or at max_iter.
FitResult lm_fit(const KernelMatrix& matrix, std::span<const Complex> targets,
                 const SolverSettings& settings,
                 const std::optional<ComplexVector>& initial_weights = std::nullopt);

/// Independent direct solver used as the correctness oracle for lm_fit:
/// minimum-norm least squares via singular value decomposition, discarding
/// singular values below svd_cutoff * sigma_max.
ComplexVector direct_least_squares(const KernelMatrix& matrix,
                                   std::span<const Complex> targets, double svd_cutoff);

}  // namespace pikfnn
