#pragma once

#include <span>

#include "pikfnn/types.hpp"

namespace pikfnn {

/// L2 relative error sqrt(sum |p_i - t_i|^2 / sum |t_i|^2) over a test set.
/// Throws if the lengths differ, are zero, or the truth vector is all-zero.
double l2_relative_error(std::span<const Complex> predicted, std::span<const Complex> truth);

struct LevelReference {
  double p_ref_pa = 1e-6;  // standard underwater reference, 1 uPa
};

struct SplValue {
  double db = 0.0;
  bool defined = false;  // false for zero-magnitude pressure (db = -inf)
};

/// Sound pressure level 20*log10(|p| / p_ref) in dB.
SplValue spl(Complex pressure, const LevelReference& ref);

}  // namespace pikfnn
