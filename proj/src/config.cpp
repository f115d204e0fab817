#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pikfnn/pipeline.hpp"

namespace pikfnn {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << what;
  throw std::runtime_error(os.str());
}

double to_double(const std::string& value, const std::string& origin, int line,
                 const std::string& key) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    fail(origin, line, "key '" + key + "': expected a number, got '" + value + "'");
  return out;
}

int to_int(const std::string& value, const std::string& origin, int line,
           const std::string& key) {
  int out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    fail(origin, line, "key '" + key + "': expected an integer, got '" + value + "'");
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  bool sweep_start_set = false, sweep_stop_set = false;

  using Setter = std::function<void(const std::string&, int)>;
  std::map<std::string, Setter> setters;
  const auto add_double = [&](const std::string& key, double& field) {
    setters[key] = [&field, key, &origin](const std::string& v, int line) {
      field = to_double(v, origin, line, key);
    };
  };
  const auto add_int = [&](const std::string& key, int& field) {
    setters[key] = [&field, key, &origin](const std::string& v, int line) {
      field = to_int(v, origin, line, key);
    };
  };

  setters["environment.variant"] = [&](const std::string& v, int line) {
    if (v != "unbounded" && v != "deep" && v != "shallow")
      fail(origin, line, "environment.variant must be unbounded, deep or shallow");
    cfg.environment_variant = v;
    cfg.environment_explicit = true;
  };
  setters["environment.h_m"] = [&](const std::string& v, int line) {
    cfg.environment_h_m = to_double(v, origin, line, "environment.h_m");
    cfg.environment_explicit = true;
  };
  setters["environment.H_m"] = [&](const std::string& v, int line) {
    cfg.environment_H_m = to_double(v, origin, line, "environment.H_m");
    cfg.environment_explicit = true;
  };
  setters["environment.beta1_mode"] = [&](const std::string& v, int line) {
    if (v != "per-image-angle" && v != "normal-incidence")
      fail(origin, line,
           "environment.beta1_mode must be per-image-angle or normal-incidence");
    cfg.environment_beta1_mode = v;
    cfg.environment_explicit = true;
  };
  setters["sediment.rho1_kgm3"] = [&](const std::string& v, int line) {
    cfg.sediment_rho1_kgm3 = to_double(v, origin, line, "sediment.rho1_kgm3");
    cfg.environment_explicit = true;
  };
  setters["sediment.c1_ms"] = [&](const std::string& v, int line) {
    cfg.sediment_c1_ms = to_double(v, origin, line, "sediment.c1_ms");
    cfg.environment_explicit = true;
  };

  add_double("medium.c0_ms", cfg.medium_c0_ms);
  add_double("medium.rho0_kgm3", cfg.medium_rho0_kgm3);
  add_double("frequency_hz", cfg.frequency_hz);

  setters["sweep.start_hz"] = [&](const std::string& v, int line) {
    cfg.sweep_start_hz = to_double(v, origin, line, "sweep.start_hz");
    sweep_start_set = true;
  };
  setters["sweep.stop_hz"] = [&](const std::string& v, int line) {
    cfg.sweep_stop_hz = to_double(v, origin, line, "sweep.stop_hz");
    sweep_stop_set = true;
  };
  setters["sweep.step_hz"] = [&](const std::string& v, int line) {
    cfg.sweep_step_hz = to_double(v, origin, line, "sweep.step_hz");
  };

  add_double("array.standoff_x_m", cfg.array.standoff_x_m);
  add_int("array.n_lines", cfg.array.n_lines);
  add_double("array.line_spacing_m", cfg.array.line_spacing_m);
  add_int("array.n_hydrophones", cfg.array.n_hydrophones);
  add_double("array.hydrophone_spacing_m", cfg.array.hydrophone_spacing_m);

  add_int("sources.count", cfg.sources_count);
  add_double("sources.radius_m", cfg.sources_radius_m);
  add_double("sources.center_x_m", cfg.sources_center.x);
  add_double("sources.center_y_m", cfg.sources_center.y);
  add_double("sources.center_z_m", cfg.sources_center.z);

  add_double("solver.tol", cfg.solver.tol);
  add_int("solver.max_iter", cfg.solver.max_iter);
  add_double("solver.lambda0", cfg.solver.lambda0);
  add_double("solver.lambda_factor", cfg.solver.lambda_factor);
  add_double("solver.svd_cutoff", cfg.solver.svd_cutoff);

  add_double("series.eps_rel", cfg.series.eps_rel);
  add_int("series.chi_max", cfg.series.chi_max);

  add_double("grid.x_min_m", cfg.grid.x_min_m);
  add_double("grid.x_max_m", cfg.grid.x_max_m);
  add_double("grid.z_min_m", cfg.grid.z_min_m);
  add_double("grid.z_max_m", cfg.grid.z_max_m);
  add_int("grid.n_x", cfg.grid.n_x);
  add_int("grid.n_z", cfg.grid.n_z);
  add_double("grid.y_m", cfg.grid.y_m);

  add_double("probe.x_m", cfg.probe.x);
  add_double("probe.y_m", cfg.probe.y);
  add_double("probe.z_m", cfg.probe.z);

  add_double("sphere.radius_m", cfg.sphere_radius_m);
  add_double("sphere.v0_ms", cfg.sphere_v0_ms);

  add_int("cloud.count", cfg.cloud_count);
  add_double("cloud.envelope_radius_m", cfg.cloud_envelope_m);

  add_double("output.spl_ref_pa", cfg.output_spl_ref_pa);
  setters["output.dir"] = [&](const std::string& v, int) { cfg.output_dir = v; };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto comment = raw.find('#');
    if (comment != std::string::npos) raw.erase(comment);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(origin, line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail(origin, line_no, "unknown key '" + key + "'");
    if (value.empty()) fail(origin, line_no, "key '" + key + "' has no value");
    it->second(value, line_no);
  }

  cfg.has_sweep = sweep_start_set || sweep_stop_set;
  if (cfg.has_sweep) {
    if (!sweep_start_set || !sweep_stop_set)
      throw std::runtime_error(origin + ": sweep requires both sweep.start_hz and sweep.stop_hz");
    if (cfg.sweep_step_hz == 0.0) cfg.sweep_step_hz = 50.0;
    if (!(cfg.sweep_step_hz > 0.0))
      throw std::runtime_error(origin + ": sweep.step_hz must be > 0");
    if (!(cfg.sweep_stop_hz >= cfg.sweep_start_hz))
      throw std::runtime_error(origin + ": sweep.stop_hz must be >= sweep.start_hz");
  }

  // fail fast on inconsistent blocks
  environment_from(cfg);
  wave_context_from(cfg, cfg.frequency_hz);
  validate(cfg.solver);
  validate(cfg.series);
  return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

Environment environment_from(const RunConfig& config) {
  Environment env;
  if (config.environment_variant == "unbounded") {
    env = Unbounded{};
  } else if (config.environment_variant == "deep") {
    env = Deep{config.environment_h_m};
  } else if (config.environment_variant == "shallow") {
    Shallow s;
    s.surface_distance_m = config.environment_h_m;
    s.depth_m = config.environment_H_m;
    s.sediment = {config.sediment_rho1_kgm3, config.sediment_c1_ms};
    s.beta1_mode = config.environment_beta1_mode == "normal-incidence"
                       ? Beta1Mode::NormalIncidence
                       : Beta1Mode::PerImageAngle;
    env = s;
  } else {
    throw std::runtime_error("unknown environment variant: " + config.environment_variant);
  }
  validate(env);
  return env;
}

WaveContext wave_context_from(const RunConfig& config, double frequency_hz) {
  return make_wave_context(frequency_hz, config.medium_c0_ms, config.medium_rho0_kgm3);
}

bool environments_equal(const Environment& a, const Environment& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<Deep>(a)) {
    return std::get<Deep>(a).surface_distance_m == std::get<Deep>(b).surface_distance_m;
  }
  if (std::holds_alternative<Shallow>(a)) {
    const Shallow& x = std::get<Shallow>(a);
    const Shallow& y = std::get<Shallow>(b);
    return x.surface_distance_m == y.surface_distance_m && x.depth_m == y.depth_m &&
           x.sediment.density_kgm3 == y.sediment.density_kgm3 &&
           x.sediment.sound_speed_ms == y.sediment.sound_speed_ms &&
           x.beta1_mode == y.beta1_mode;
  }
  return true;
}

PointSet grid_points(const GridSpec& grid) {
  return rect_grid(grid.x_min_m, grid.x_max_m, grid.z_min_m, grid.z_max_m, grid.n_x,
                   grid.n_z, grid.y_m);
}

}  // namespace pikfnn
