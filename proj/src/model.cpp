#include "pikfnn/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>

#include "pikfnn/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pikfnn {

namespace {

struct RowResult {
  long nonconverged = 0;
  std::optional<std::pair<std::size_t, std::size_t>> singular;  // first bad (i, j)
};

// One matrix row; exceptions are mapped to the failing column index so the
// parallel caller can report the offending pair deterministically.
RowResult assemble_row(Complex* row, std::size_t i, const PointSet& sources,
                       const Point3& sample, const Environment& env,
                       const WaveContext& ctx, const SeriesControl& series) {
  RowResult result;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    try {
      SeriesEval status;
      row[j] = kernel_eval(env, sample, sources.points[j], ctx, series, &status);
      if (!status.converged) ++result.nonconverged;
    } catch (const SingularEvaluation&) {
      result.singular = {i, j};
      return result;
    }
  }
  return result;
}

[[noreturn]] void throw_singular_entry(std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << "assemble: sample " << i << " coincides with source " << j
     << " (or one of its images)";
  throw SingularEvaluation(os.str());
}

Complex row_dot(const Complex* row, std::span<const Complex> w, std::size_t n) {
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) acc += row[j] * w[j];
  return acc;
}

Complex field_at(const TrainedNetwork& net, const Point3& x) {
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < net.sources.size(); ++j)
    acc += net.weights[j] * kernel_eval(net.env, x, net.sources.points[j], net.ctx,
                                        net.series);
  return acc;
}

Complex adjoint_entry(const KernelMatrix& m, std::span<const Complex> v, std::size_t j) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < m.rows; ++i) acc += std::conj(m.at(i, j)) * v[i];
  return acc;
}

Complex gram_entry(const KernelMatrix& m, std::size_t j, std::size_t l) {
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < m.rows; ++i) acc += std::conj(m.at(i, j)) * m.at(i, l);
  return acc;
}

KernelMatrix make_matrix_shell(const PointSet& sources, const PointSet& samples,
                               const Environment& env, const WaveContext& ctx,
                               const SeriesControl& series) {
  validate(env);
  validate(series);
  if (sources.size() == 0 || samples.size() == 0)
    throw std::invalid_argument("assemble: empty source or sample set");
  KernelMatrix m;
  m.rows = samples.size();
  m.cols = sources.size();
  m.entries.resize(m.rows * m.cols);
  m.env = env;
  m.ctx = ctx;
  m.series = series;
  return m;
}

}  // namespace

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Analytic: return "analytic";
    case Provenance::FemImport: return "fem-import";
    case Provenance::Synthetic: return "synthetic";
  }
  return "unknown";
}

void validate(const SampleSet& samples) {
  if (samples.points.size() != samples.pressures.size())
    throw std::invalid_argument("sample set: point/pressure count mismatch");
  if (samples.pressures.empty()) throw std::invalid_argument("sample set: empty");
  for (const Complex& p : samples.pressures) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
      throw std::invalid_argument("sample set: non-finite pressure");
  }
}

KernelMatrix assemble_serial(const PointSet& sources, const PointSet& samples,
                             const Environment& env, const WaveContext& ctx,
                             const SeriesControl& series) {
  KernelMatrix m = make_matrix_shell(sources, samples, env, ctx, series);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const RowResult r = assemble_row(&m.at(i, 0), i, sources, samples.points[i], env,
                                     ctx, series);
    if (r.singular) throw_singular_entry(r.singular->first, r.singular->second);
    m.nonconverged += r.nonconverged;
  }
  return m;
}

KernelMatrix assemble(const PointSet& sources, const PointSet& samples,
                      const Environment& env, const WaveContext& ctx,
                      const SeriesControl& series) {
  KernelMatrix m = make_matrix_shell(sources, samples, env, ctx, series);
  std::atomic<long> nonconverged{0};
  std::vector<std::pair<std::size_t, std::size_t>> failures;

#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(m.rows); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const RowResult r =
        assemble_row(&m.at(i, 0), i, sources, samples.points[i], env, ctx, series);
    if (r.singular) {
#pragma omp critical
      failures.push_back(*r.singular);
    }
    nonconverged += r.nonconverged;
  }
  if (!failures.empty()) {
    const auto worst = *std::min_element(failures.begin(), failures.end());
    throw_singular_entry(worst.first, worst.second);
  }
  m.nonconverged = nonconverged.load();
  return m;
}

ComplexVector field_at_points_serial(const TrainedNetwork& net, const PointSet& points) {
  if (net.weights.size() != net.sources.size())
    throw std::invalid_argument("network weights/sources size mismatch");
  ComplexVector out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    out[i] = field_at(net, points.points[i]);
  return out;
}

ComplexVector field_at_points(const TrainedNetwork& net, const PointSet& points) {
  if (net.weights.size() != net.sources.size())
    throw std::invalid_argument("network weights/sources size mismatch");
  ComplexVector out(points.size());
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
  for (long long ii = 0; ii < static_cast<long long>(points.size()); ++ii) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      out[static_cast<std::size_t>(ii)] = field_at(net, points.points[ii]);
    } catch (const SingularEvaluation&) {
      failed.store(true);
    }
  }
  if (failed.load())
    throw SingularEvaluation("field evaluation hit a source or image point");
  return out;
}

double loss(std::span<const Complex> predicted, std::span<const Complex> target) {
  if (predicted.size() != target.size())
    throw std::invalid_argument("loss: length mismatch");
  if (predicted.empty()) throw std::invalid_argument("loss: empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    acc += std::norm(predicted[i] - target[i]);
  return acc / static_cast<double>(predicted.size());
}

ComplexVector matvec_serial(const KernelMatrix& m, std::span<const Complex> w) {
  if (w.size() != m.cols) throw std::invalid_argument("matvec: weight length mismatch");
  ComplexVector out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) out[i] = row_dot(&m.at(i, 0), w, m.cols);
  return out;
}

ComplexVector matvec(const KernelMatrix& m, std::span<const Complex> w) {
  if (w.size() != m.cols) throw std::invalid_argument("matvec: weight length mismatch");
  ComplexVector out(m.rows);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(m.rows); ++i)
    out[i] = row_dot(&m.at(i, 0), w, m.cols);
  return out;
}

ComplexVector adjoint_matvec_serial(const KernelMatrix& m, std::span<const Complex> v) {
  if (v.size() != m.rows)
    throw std::invalid_argument("adjoint_matvec: vector length mismatch");
  ComplexVector out(m.cols);
  for (std::size_t j = 0; j < m.cols; ++j) out[j] = adjoint_entry(m, v, j);
  return out;
}

ComplexVector adjoint_matvec(const KernelMatrix& m, std::span<const Complex> v) {
  if (v.size() != m.rows)
    throw std::invalid_argument("adjoint_matvec: vector length mismatch");
  ComplexVector out(m.cols);
#pragma omp parallel for schedule(static)
  for (long long j = 0; j < static_cast<long long>(m.cols); ++j)
    out[j] = adjoint_entry(m, v, j);
  return out;
}

ComplexVector gram_serial(const KernelMatrix& m) {
  ComplexVector g(m.cols * m.cols);
  for (std::size_t j = 0; j < m.cols; ++j)
    for (std::size_t l = 0; l < m.cols; ++l) g[j * m.cols + l] = gram_entry(m, j, l);
  return g;
}

ComplexVector gram(const KernelMatrix& m) {
  ComplexVector g(m.cols * m.cols);
#pragma omp parallel for schedule(static)
  for (long long j = 0; j < static_cast<long long>(m.cols); ++j)
    for (std::size_t l = 0; l < m.cols; ++l)
      g[static_cast<std::size_t>(j) * m.cols + l] =
          gram_entry(m, static_cast<std::size_t>(j), l);
  return g;
}

}  // namespace pikfnn
