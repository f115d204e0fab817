#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "pikfnn/pipeline.hpp"

namespace pikfnn {

namespace {

constexpr const char* kSampleHeader = "x_m,y_m,z_m,re_pa,im_pa";
constexpr const char* kPointHeader = "x_m,y_m,z_m";
constexpr const char* kNetworkTag = "pikfnn-net/1";

// 17 significant digits: lossless double round trip.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail_at(const std::filesystem::path& path, int line,
                          const std::string& what) {
  std::ostringstream os;
  os << path.string() << ": line " << line << ": " << what;
  throw std::runtime_error(os.str());
}

double parse_field(const std::string& field, const std::filesystem::path& path, int line) {
  double out = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    fail_at(path, line, "non-numeric field '" + field + "'");
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

void check_duplicates(const PointSet& points, const std::filesystem::path& path) {
  constexpr double kMinSeparation = 1e-9;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (distance(points.points[i], points.points[j]) < kMinSeparation) {
        std::ostringstream os;
        os << path.string() << ": duplicate points (rows " << i + 2 << " and " << j + 2
           << ")";
        throw std::runtime_error(os.str());
      }
    }
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  return in;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_samples(const std::filesystem::path& path, const SampleSet& samples) {
  validate(samples);
  std::ostringstream os;
  os << kSampleHeader << "\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Point3& p = samples.points.points[i];
    const Complex& v = samples.pressures[i];
    os << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.z) << ',' << fmt(v.real()) << ','
       << fmt(v.imag()) << "\n";
  }
  write_file_atomic(path, os.str());
}

SampleSet load_samples(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kSampleHeader)
    throw std::runtime_error(path.string() +
                             ": header mismatch, expected '" + kSampleHeader + "'");
  SampleSet samples;
  samples.provenance = Provenance::FemImport;
  samples.points.label = path.filename().string();
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5)
      fail_at(path, line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    const double x = parse_field(fields[0], path, line_no);
    const double y = parse_field(fields[1], path, line_no);
    const double z = parse_field(fields[2], path, line_no);
    const double re = parse_field(fields[3], path, line_no);
    const double im = parse_field(fields[4], path, line_no);
    samples.points.points.push_back({x, y, z});
    samples.pressures.emplace_back(re, im);
  }
  if (samples.pressures.empty())
    throw std::runtime_error(path.string() + ": no sample rows (header only)");
  check_duplicates(samples.points, path);
  validate(samples);
  return samples;
}

void save_points(const std::filesystem::path& path, const PointSet& points) {
  std::ostringstream os;
  os << kPointHeader << "\n";
  for (const Point3& p : points.points)
    os << fmt(p.x) << ',' << fmt(p.y) << ',' << fmt(p.z) << "\n";
  write_file_atomic(path, os.str());
}

PointSet load_points(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kPointHeader)
    throw std::runtime_error(path.string() + ": header mismatch, expected '" +
                             kPointHeader + "'");
  PointSet points;
  points.label = path.filename().string();
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 3)
      fail_at(path, line_no, "expected 3 fields, got " + std::to_string(fields.size()));
    points.points.push_back({parse_field(fields[0], path, line_no),
                             parse_field(fields[1], path, line_no),
                             parse_field(fields[2], path, line_no)});
  }
  if (points.points.empty())
    throw std::runtime_error(path.string() + ": no point rows (header only)");
  return points;
}

void save_network(const std::filesystem::path& path, const TrainedNetwork& net) {
  if (net.weights.size() != net.sources.size())
    throw std::invalid_argument("save_network: weights/sources size mismatch");
  std::ostringstream os;
  os << kNetworkTag << "\n";
  os << "environment.variant = " << environment_name(net.env) << "\n";
  if (const Deep* deep = std::get_if<Deep>(&net.env)) {
    os << "environment.h_m = " << fmt(deep->surface_distance_m) << "\n";
  } else if (const Shallow* shallow = std::get_if<Shallow>(&net.env)) {
    os << "environment.h_m = " << fmt(shallow->surface_distance_m) << "\n";
    os << "environment.H_m = " << fmt(shallow->depth_m) << "\n";
    os << "environment.beta1_mode = "
       << (shallow->beta1_mode == Beta1Mode::NormalIncidence ? "normal-incidence"
                                                             : "per-image-angle")
       << "\n";
    os << "sediment.rho1_kgm3 = " << fmt(shallow->sediment.density_kgm3) << "\n";
    os << "sediment.c1_ms = " << fmt(shallow->sediment.sound_speed_ms) << "\n";
  }
  os << "medium.c0_ms = " << fmt(net.ctx.sound_speed_ms) << "\n";
  os << "medium.rho0_kgm3 = " << fmt(net.ctx.density_kgm3) << "\n";
  os << "frequency_hz = " << fmt(net.ctx.frequency_hz) << "\n";
  os << "series.eps_rel = " << fmt(net.series.eps_rel) << "\n";
  os << "series.chi_max = " << net.series.chi_max << "\n";
  os << "sources.count = " << net.sources.size() << "\n";
  for (const Point3& s : net.sources.points)
    os << "source = " << fmt(s.x) << ' ' << fmt(s.y) << ' ' << fmt(s.z) << "\n";
  for (const Complex& w : net.weights)
    os << "weight = " << fmt(w.real()) << ' ' << fmt(w.imag()) << "\n";
  write_file_atomic(path, os.str());
}

TrainedNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kNetworkTag)
    throw std::runtime_error(path.string() + ": not a " + std::string(kNetworkTag) +
                             " artifact");

  std::map<std::string, std::string> kv;
  std::vector<Point3> sources;
  ComplexVector weights;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail_at(path, line_no, "expected 'key = value'");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!value.empty() && value.front() == ' ') value.erase(value.begin());
    if (key == "source") {
      std::istringstream vs(value);
      Point3 p;
      if (!(vs >> p.x >> p.y >> p.z)) fail_at(path, line_no, "malformed source line");
      sources.push_back(p);
    } else if (key == "weight") {
      std::istringstream vs(value);
      double re = 0.0, im = 0.0;
      if (!(vs >> re >> im)) fail_at(path, line_no, "malformed weight line");
      weights.emplace_back(re, im);
    } else {
      kv[key] = value;
    }
  }

  const auto need = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end())
      throw std::runtime_error(path.string() + ": missing key '" + key + "'");
    return it->second;
  };
  const auto need_double = [&](const std::string& key) {
    return parse_field(need(key), path, 0);
  };

  TrainedNetwork net;
  const std::string variant = need("environment.variant");
  if (variant == "unbounded") {
    net.env = Unbounded{};
  } else if (variant == "deep") {
    net.env = Deep{need_double("environment.h_m")};
  } else if (variant == "shallow") {
    Shallow s;
    s.surface_distance_m = need_double("environment.h_m");
    s.depth_m = need_double("environment.H_m");
    s.sediment = {need_double("sediment.rho1_kgm3"), need_double("sediment.c1_ms")};
    s.beta1_mode = need("environment.beta1_mode") == "normal-incidence"
                       ? Beta1Mode::NormalIncidence
                       : Beta1Mode::PerImageAngle;
    net.env = s;
  } else {
    throw std::runtime_error(path.string() + ": unknown environment '" + variant + "'");
  }
  validate(net.env);

  net.ctx = make_wave_context(need_double("frequency_hz"), need_double("medium.c0_ms"),
                              need_double("medium.rho0_kgm3"));
  net.series.eps_rel = need_double("series.eps_rel");
  net.series.chi_max = static_cast<int>(need_double("series.chi_max"));
  validate(net.series);

  const auto count = static_cast<std::size_t>(need_double("sources.count"));
  if (sources.size() != count || weights.size() != count)
    throw std::runtime_error(path.string() + ": source/weight count mismatch");
  net.sources.points = std::move(sources);
  net.sources.label = "artifact-sources";
  net.weights = std::move(weights);
  return net;
}

}  // namespace pikfnn
