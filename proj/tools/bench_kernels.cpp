// Times the OpenMP kernels against their serial reference implementations:
// kernel-matrix assembly, far-field evaluation and the Gram product, at the
// sizes the fit and predict paths actually use.

#include <chrono>
#include <cstdio>
#include <functional>

#include "pikfnn/geometry.hpp"
#include "pikfnn/model.hpp"
#include "pikfnn/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace pikfnn;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-34s %10.2f ms %10.2f ms %7.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; both columns run the same serial code\n");
#endif
  std::printf("%-34s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");

  const PointSet sources = fibonacci_sphere(153, 0.5, {0, 0, 0});
  const PointSet array = sonar_array(ArraySpec{});
  const PointSet grid = grid_points(GridSpec{});
  const WaveContext ctx = make_wave_context(6000.0, 1500.0, 1025.0);
  const SeriesControl series;

  const Environment unbounded = Unbounded{};
  Shallow shallow;
  shallow.surface_distance_m = 10.0;
  shallow.depth_m = 20.0;
  shallow.sediment = {2600.0, 1620.0};
  const WaveContext ctx_shallow = make_wave_context(500.0, 1500.0, 1025.0);
  const Environment shallow_env = shallow;

  report("assemble 153x153 unbounded",
         time_ms([&] { assemble_serial(sources, array, unbounded, ctx, series); }, 5),
         time_ms([&] { assemble(sources, array, unbounded, ctx, series); }, 5));

  report("assemble 153x153 shallow series",
         time_ms([&] { assemble_serial(sources, array, shallow_env, ctx_shallow, series); }, 3),
         time_ms([&] { assemble(sources, array, shallow_env, ctx_shallow, series); }, 3));

  TrainedNetwork net{unbounded, ctx, series, sources,
                     ComplexVector(sources.size(), Complex{1.0, 0.5})};
  report("field 1911x153 unbounded",
         time_ms([&] { field_at_points_serial(net, grid); }, 3),
         time_ms([&] { field_at_points(net, grid); }, 3));

  TrainedNetwork net_shallow{shallow_env, ctx_shallow, series, sources,
                             ComplexVector(sources.size(), Complex{1.0, 0.5})};
  report("field 1911x153 shallow series",
         time_ms([&] { field_at_points_serial(net_shallow, grid); }, 2),
         time_ms([&] { field_at_points(net_shallow, grid); }, 2));

  const KernelMatrix matrix = assemble(sources, array, unbounded, ctx, series);
  report("gram 153x153",
         time_ms([&] { gram_serial(matrix); }, 10),
         time_ms([&] { gram(matrix); }, 10));

  return 0;
}
