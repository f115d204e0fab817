// Command-line driver: fit networks to boundary pressure samples, predict
// far-field pressure/SPL tables, run frequency sweeps and the convergence
// verification protocol, and generate point sets and oracle sample files.

#include <cstdint>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "pikfnn/pipeline.hpp"

namespace fs = std::filesystem;
using namespace pikfnn;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 12345;  // used only for synthetic cloud placement
};

RunConfig load_config(const GlobalOptions& global) {
  RunConfig config =
      global.config_path.empty() ? RunConfig{} : parse_config_file(global.config_path);
  if (!global.out_dir.empty()) config.output_dir = global.out_dir;
  return config;
}

fs::path out_path(const RunConfig& config, const std::string& name) {
  fs::create_directories(config.output_dir);
  return fs::path(config.output_dir) / name;
}

PointSet array_or_file(const RunConfig& config, const std::string& points_file) {
  if (points_file.empty()) return sonar_array(config.array);
  return load_points(points_file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Far-field underwater sound prediction from near-field boundary samples"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_path, "Experiment configuration file");
  app.add_option("--out", global.out_dir, "Output directory");
  app.add_option("--seed", global.seed, "Seed for synthetic cloud placement");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a network to a boundary sample file");
  std::string fit_samples;
  fit->add_option("--samples", fit_samples, "Sample CSV (x_m,y_m,z_m,re_pa,im_pa)")
      ->required();

  // predict
  auto* predict_cmd =
      app.add_subcommand("predict", "Evaluate a trained network on points or a grid");
  std::string predict_net, predict_points;
  predict_cmd->add_option("--net", predict_net, "Network artifact (pikfnn-net/1)")
      ->required();
  predict_cmd->add_option("--points", predict_points,
                          "Points CSV; when omitted the configured grid is used");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Fit once per frequency, probe the field");
  std::string sweep_template;
  sweep->add_option("--samples-template", sweep_template,
                    "Per-frequency sample file pattern containing {freq}");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Tolerance / sample-count convergence protocol with trend checks");

  // generators
  auto* gen_array = app.add_subcommand("gen-array", "Write the configured sonar array");
  auto* gen_sources =
      app.add_subcommand("gen-sources", "Write the configured source sphere");
  auto* oracle_sphere = app.add_subcommand(
      "oracle-sphere", "Sample the pulsating-sphere solution at array or file points");
  std::string oracle_points;
  oracle_sphere->add_option("--points", oracle_points, "Points CSV (default: array)");
  auto* synth = app.add_subcommand(
      "synth-field", "Sample a seeded synthetic source cloud at array or file points");
  std::string synth_points;
  synth->add_option("--points", synth_points, "Points CSV (default: array)");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = load_config(global);

    if (*fit) {
      const SampleSet samples = load_samples(fit_samples);
      const FitOutcome outcome = fit_command(config, samples);
      write_fit_outputs(config.output_dir, outcome);
      std::cerr << "fit: " << outcome.trace.iteration_count() << " iterations, stop="
                << stop_reason_name(outcome.trace.stop_reason)
                << ", final_loss=" << outcome.trace.final_loss() << "\n";
      if (outcome.series_warnings > 0)
        std::cerr << "fit: warning: " << outcome.series_warnings
                  << " kernel entries hit the image-series cap before converging\n";
    } else if (*predict_cmd) {
      const TrainedNetwork net = load_network(predict_net);
      if (predict_points.empty()) {
        const FieldResult field = predict_command(net, config, grid_points(config.grid));
        write_field_table(out_path(config, "pressures.csv"), field);
        write_spl_grid(out_path(config, "spl_grid.csv"), field, config.grid);
        std::cerr << "predict: " << field.pressures.size() << " grid points\n";
      } else {
        const FieldResult field =
            predict_command(net, config, load_points(predict_points));
        write_field_table(out_path(config, "pressures.csv"), field);
        std::cerr << "predict: " << field.pressures.size() << " points\n";
      }
    } else if (*sweep) {
      SweepOptions options;
      options.seed = global.seed;
      if (!sweep_template.empty()) {
        options.source = SampleSource::Template;
        options.template_pattern = sweep_template;
      } else if (config.environment_variant == "unbounded") {
        options.source = SampleSource::Analytic;
      } else {
        options.source = SampleSource::Synthetic;
      }
      const std::vector<SweepRow> rows = sweep_command(config, options);
      write_sweep_table(out_path(config, "sweep.csv"), rows);
      int failures = 0;
      for (const SweepRow& row : rows) {
        if (!row.ok) {
          ++failures;
          std::cerr << "sweep: " << row.frequency_hz << " Hz failed: " << row.message
                    << "\n";
        }
      }
      std::cerr << "sweep: " << rows.size() - failures << "/" << rows.size()
                << " frequencies ok\n";
      if (failures > 0) return 1;
    } else if (*verify) {
      const VerifyReport report = verify_command(config);
      write_verify_report(out_path(config, "verify_report.csv"), report);
      for (const VerifyCheck& check : report.checks)
        std::cerr << "verify: " << check.name << ": " << (check.pass ? "pass" : "fail")
                  << " (" << check.detail << ")\n";
    } else if (*gen_array) {
      save_points(out_path(config, "array_points.csv"), sonar_array(config.array));
    } else if (*gen_sources) {
      save_points(out_path(config, "source_points.csv"),
                  fibonacci_sphere(config.sources_count, config.sources_radius_m,
                                   config.sources_center));
    } else if (*oracle_sphere) {
      const PointSet points = array_or_file(config, oracle_points);
      const SampleSet samples = analytic_samples(config, config.frequency_hz, points);
      save_samples(out_path(config, "samples.csv"), samples);
      std::cerr << "oracle-sphere: " << samples.size() << " samples at "
                << config.frequency_hz << " Hz\n";
    } else if (*synth) {
      const PointSet points = array_or_file(config, synth_points);
      const SampleSet samples =
          synthetic_samples(config, config.frequency_hz, points, global.seed);
      save_samples(out_path(config, "samples.csv"), samples);
      std::cerr << "synth-field: " << samples.size() << " samples at "
                << config.frequency_hz << " Hz (seed " << global.seed << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
