#pragma once

#include <span>

#include "pikfnn/types.hpp"

namespace pikfnn {

/// Kernel (collocation) matrix: entry(i, j) = Psi_env(sample_i, source_j).
struct KernelMatrix {
  std::size_t rows = 0;  // samples
  std::size_t cols = 0;  // sources
  ComplexVector entries;  // row-major
  Environment env;
  WaveContext ctx;
  SeriesControl series;
  long nonconverged = 0;  // shallow entries that hit the chi_max cap

  Complex& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const Complex& at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

enum class Provenance { Analytic, FemImport, Synthetic };

const char* provenance_name(Provenance p);

/// Boundary training data: N points with measured complex pressures.
struct SampleSet {
  PointSet points;
  ComplexVector pressures;
  Provenance provenance = Provenance::FemImport;

  std::size_t size() const { return pressures.size(); }
};

void validate(const SampleSet& samples);

/// The fitted single-hidden-layer network: fixed kernel sources plus complex
/// output weights. Immutable after the fit; safe to share across threads.
struct TrainedNetwork {
  Environment env;
  WaveContext ctx;
  SeriesControl series;
  PointSet sources;
  ComplexVector weights;  // Pa*m, one per source
};

/// Assemble the rows-by-cols kernel matrix. The OpenMP variant writes each
/// entry independently, so its result is bitwise identical to the serial
/// reference for any thread count.
KernelMatrix assemble(const PointSet& sources, const PointSet& samples,
                      const Environment& env, const WaveContext& ctx,
                      const SeriesControl& series);
KernelMatrix assemble_serial(const PointSet& sources, const PointSet& samples,
                             const Environment& env, const WaveContext& ctx,
                             const SeriesControl& series);

/// Weighted kernel sum p(x) = sum_j w_j Psi(x, s_j) at each point.
ComplexVector field_at_points(const TrainedNetwork& net, const PointSet& points);
ComplexVector field_at_points_serial(const TrainedNetwork& net, const PointSet& points);

inline ComplexVector predict(const TrainedNetwork& net, const PointSet& points) {
  return field_at_points(net, points);
}

/// Mean squared error (1/N) sum |p_i - t_i|^2 in Pa^2.
double loss(std::span<const Complex> predicted, std::span<const Complex> target);

// Dense helpers used by the optimizer; deterministic under OpenMP (each
// output element is accumulated by a single thread in index order).

/// y = A * w  (length rows)
ComplexVector matvec(const KernelMatrix& m, std::span<const Complex> w);
ComplexVector matvec_serial(const KernelMatrix& m, std::span<const Complex> w);

/// y = A^H * v  (length cols)
ComplexVector adjoint_matvec(const KernelMatrix& m, std::span<const Complex> v);
ComplexVector adjoint_matvec_serial(const KernelMatrix& m, std::span<const Complex> v);

/// G = A^H * A, cols-by-cols Hermitian, row-major full storage.
ComplexVector gram(const KernelMatrix& m);
ComplexVector gram_serial(const KernelMatrix& m);

}  // namespace pikfnn
