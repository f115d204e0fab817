#include "pikfnn/metrics.hpp"

#include <cmath>
#include <limits>

namespace pikfnn {

double l2_relative_error(std::span<const Complex> predicted,
                         std::span<const Complex> truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("l2_relative_error: length mismatch");
  if (truth.empty()) throw std::invalid_argument("l2_relative_error: empty vectors");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += std::norm(predicted[i] - truth[i]);
    den += std::norm(truth[i]);
  }
  if (den == 0.0)
    throw std::domain_error("l2_relative_error: undefined for all-zero truth");
  return std::sqrt(num / den);
}

SplValue spl(Complex pressure, const LevelReference& ref) {
  if (!(ref.p_ref_pa > 0.0))
    throw std::invalid_argument("spl: reference pressure must be > 0");
  const double mag = std::abs(pressure);
  if (mag == 0.0) return {-std::numeric_limits<double>::infinity(), false};
  return {20.0 * std::log10(mag / ref.p_ref_pa), true};
}

}  // namespace pikfnn
