#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "pikfnn/geometry.hpp"
#include "pikfnn/metrics.hpp"
#include "pikfnn/model.hpp"
#include "pikfnn/optimizer.hpp"
#include "pikfnn/oracles.hpp"
#include "pikfnn/types.hpp"

namespace pikfnn {

struct GridSpec {
  double x_min_m = 10.0;
  double x_max_m = 100.0;
  double z_min_m = -10.0;
  double z_max_m = 10.0;
  int n_x = 91;
  int n_z = 21;
  double y_m = 0.0;
};

PointSet grid_points(const GridSpec& grid);

/// Flat key = value experiment configuration. Defaults reproduce the
/// unbounded-ocean pulsating-sphere setup.
struct RunConfig {
  // environment
  std::string environment_variant = "unbounded";  // unbounded | deep | shallow
  double environment_h_m = 20.0;
  double environment_H_m = 20.0;
  std::string environment_beta1_mode = "per-image-angle";  // | normal-incidence
  double sediment_rho1_kgm3 = 2600.0;
  double sediment_c1_ms = 1620.0;
  bool environment_explicit = false;  // any environment.*/sediment.* key present

  // medium
  double medium_c0_ms = 1500.0;
  double medium_rho0_kgm3 = 1025.0;

  // excitation
  double frequency_hz = 1000.0;
  double sweep_start_hz = 0.0;
  double sweep_stop_hz = 0.0;
  double sweep_step_hz = 0.0;
  bool has_sweep = false;

  ArraySpec array;

  // source sphere
  int sources_count = 153;
  double sources_radius_m = 0.5;
  Point3 sources_center{0.0, 0.0, 0.0};

  SolverSettings solver;
  SeriesControl series;
  GridSpec grid;

  Point3 probe{10.0, 0.0, 0.0};

  // pulsating-sphere oracle
  double sphere_radius_m = 1.0;
  double sphere_v0_ms = 1e-4;

  // synthetic source cloud
  int cloud_count = 5;
  double cloud_envelope_m = 0.2;

  // output
  double output_spl_ref_pa = 1e-6;
  std::string output_dir = ".";
};

/// Parse a config file; unknown keys and malformed values are hard errors
/// naming the offending line.
RunConfig parse_config_file(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

Environment environment_from(const RunConfig& config);
WaveContext wave_context_from(const RunConfig& config, double frequency_hz);
bool environments_equal(const Environment& a, const Environment& b);

// ---- file formats -------------------------------------------------------

/// Writes content to path atomically (write to a sibling temp file, then
/// rename over the target).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Sample CSV: header `x_m,y_m,z_m,re_pa,im_pa`, one point per row, 17
/// significant digits; round-trips doubles exactly.
void save_samples(const std::filesystem::path& path, const SampleSet& samples);
SampleSet load_samples(const std::filesystem::path& path);

/// Points CSV: header `x_m,y_m,z_m`.
void save_points(const std::filesystem::path& path, const PointSet& points);
PointSet load_points(const std::filesystem::path& path);

/// Single-file self-describing network artifact, format tag `pikfnn-net/1`.
void save_network(const std::filesystem::path& path, const TrainedNetwork& net);
TrainedNetwork load_network(const std::filesystem::path& path);

// ---- commands -----------------------------------------------------------

struct FitOutcome {
  TrainedNetwork network;
  FitTrace trace;
  long series_warnings = 0;  // non-converged shallow-series matrix entries
};

/// Assemble the kernel matrix for `samples` against the configured source
/// sphere and fit the output weights.
FitOutcome fit_command(const RunConfig& config, const SampleSet& samples);

/// Write net.pikfnn, fit_trace.csv and fit_summary.csv into `dir`.
void write_fit_outputs(const std::filesystem::path& dir, const FitOutcome& outcome);

struct FieldResult {
  PointSet points;
  ComplexVector pressures;
  std::vector<SplValue> levels;
};

/// Evaluate a trained network at arbitrary points (per-point table) or on
/// the configured grid (adds the SPL matrix companion file).
FieldResult predict_command(const TrainedNetwork& net, const RunConfig& config,
                            const PointSet& points);
void write_field_table(const std::filesystem::path& path, const FieldResult& field);
void write_spl_grid(const std::filesystem::path& path, const FieldResult& field,
                    const GridSpec& grid);

/// Where sweep training data comes from. Analytic uses the pulsating-sphere
/// solution (unbounded only); Synthetic superposes a seeded monopole cloud;
/// Template loads `pattern` with "{freq}" substituted per frequency.
enum class SampleSource { Analytic, Synthetic, Template };

struct SweepOptions {
  SampleSource source = SampleSource::Analytic;
  std::string template_pattern;
  std::uint64_t seed = 12345;
};

struct SweepRow {
  double frequency_hz = 0.0;
  Complex pressure{0.0, 0.0};
  SplValue level;
  bool ok = false;
  std::string message;  // failure diagnostic (stderr-bound; not written to files)
};

std::vector<double> sweep_frequencies(const RunConfig& config);
std::vector<SweepRow> sweep_command(const RunConfig& config, const SweepOptions& options);
void write_sweep_table(const std::filesystem::path& path,
                       const std::vector<SweepRow>& rows);

/// Tolerance and sample-count convergence protocol against the analytic
/// pulsating-sphere solution, with trend/threshold checks.
struct VerifyCell {
  std::string section;  // "tol" or "samples"
  double parameter = 0.0;
  double lrerr = 0.0;
  std::size_t iterations = 0;
  StopReason stop_reason = StopReason::MaxIter;
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCell> cells;
  std::vector<VerifyCheck> checks;
};

VerifyReport verify_command(const RunConfig& config);
void write_verify_report(const std::filesystem::path& path, const VerifyReport& report);

/// Training pressures for the analytic provider: the closed-form pulsating
/// sphere solution sampled at `points`.
SampleSet analytic_samples(const RunConfig& config, double frequency_hz,
                           const PointSet& points);

/// Training pressures for the synthetic provider at `points`.
SampleSet synthetic_samples(const RunConfig& config, double frequency_hz,
                            const PointSet& points, std::uint64_t seed);

}  // namespace pikfnn
