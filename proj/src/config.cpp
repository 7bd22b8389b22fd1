#include "spinprobe/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

namespace spinprobe {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

using json = nlohmann::json;

/// Walks a document, recording problems instead of stopping at the first.
class Checker {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
      if (!keys.count(k)) fail(path + "." + k, "unknown key");
    }
    return true;
  }

  std::optional<double> number(const json& j, const std::string& path,
                               const std::function<bool(double)>& ok = {},
                               const char* requirement = nullptr) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v) || (ok && !ok(v))) {
      fail(path, std::string("must be ") + (requirement ? requirement : "finite") + ", got " + j.dump());
      return std::nullopt;
    }
    return v;
  }

  std::optional<double> positive(const json& j, const std::string& path) {
    return number(j, path, [](double v) { return v > 0.0; }, "positive");
  }

  std::optional<double> non_negative(const json& j, const std::string& path) {
    return number(j, path, [](double v) { return v >= 0.0; }, "non-negative");
  }

  std::optional<int> integer(const json& j, const std::string& path, int lo, int hi) {
    if (!j.is_number_integer()) {
      fail(path, "expected an integer");
      return std::nullopt;
    }
    const auto v = j.get<long long>();
    if (v < lo || v > hi) {
      fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                     std::to_string(v));
      return std::nullopt;
    }
    return static_cast<int>(v);
  }

  std::optional<std::string> string(const json& j, const std::string& path) {
    if (!j.is_string()) {
      fail(path, "expected a string");
      return std::nullopt;
    }
    return j.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& j, const std::string& path, bool positive_only) {
    if (!j.is_array() || j.empty()) {
      fail(path, "expected a non-empty array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool good = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      const auto v = positive_only ? positive(j[i], p) : number(j[i], p);
      if (v) out.push_back(*v);
      else good = false;
    }
    if (!good) return std::nullopt;
    return out;
  }

  std::optional<std::array<double, 3>> vec3(const json& j, const std::string& path, bool positive_only) {
    if (!j.is_array() || j.size() != 3) {
      fail(path, "expected an array of 3 numbers");
      return std::nullopt;
    }
    auto v = numbers(j, path, positive_only);
    if (!v) return std::nullopt;
    return std::array<double, 3>{(*v)[0], (*v)[1], (*v)[2]};
  }

  std::optional<GridSpec> grid(const json& j, const std::string& path) {
    if (j.is_array()) {
      auto v = numbers(j, path, true);
      if (!v) return std::nullopt;
      if (!std::is_sorted(v->begin(), v->end())) {
        fail(path, "grid values must be ascending");
        return std::nullopt;
      }
      GridSpec g;
      g.values = std::move(*v);
      return g;
    }
    if (!object(j, path, {"start", "stop", "points", "spacing"})) return std::nullopt;
    bool good = true;
    std::optional<double> start, stop;
    std::optional<int> points;
    for (const char* k : {"start", "stop", "points"}) {
      if (!j.contains(k)) {
        fail(path + "." + k, "missing required field");
        good = false;
      }
    }
    if (j.contains("start")) start = positive(j["start"], path + ".start");
    if (j.contains("stop")) stop = positive(j["stop"], path + ".stop");
    if (j.contains("points")) points = integer(j["points"], path + ".points", 2, 1000000);
    bool log = false;
    if (j.contains("spacing")) {
      const auto s = string(j["spacing"], path + ".spacing");
      if (s && *s == "log") log = true;
      else if (s && *s != "linear") {
        fail(path + ".spacing", "must be \"linear\" or \"log\"");
        good = false;
      } else if (!s) {
        good = false;
      }
    }
    if (!good || !start || !stop || !points) return std::nullopt;
    if (!(*stop > *start)) {
      fail(path, "stop must exceed start");
      return std::nullopt;
    }
    return log ? GridSpec::logarithmic(*start, *stop, *points) : GridSpec::linear(*start, *stop, *points);
  }

  std::optional<UserPoint> point(const json& j, const std::string& path) {
    if (!object(j, path, {"b_field_mG", "temperature_nK"})) return std::nullopt;
    std::optional<double> b, t;
    if (!j.contains("b_field_mG")) fail(path + ".b_field_mG", "missing required field");
    else b = non_negative(j["b_field_mG"], path + ".b_field_mG");
    if (!j.contains("temperature_nK")) fail(path + ".temperature_nK", "missing required field");
    else t = positive(j["temperature_nK"], path + ".temperature_nK");
    if (!b || !t) return std::nullopt;
    return UserPoint{*b, *t};
  }
};

std::size_t distinct_count(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

void check_span(Checker& ck, const std::string& path, const GridSpec& g, double lo, double hi,
                std::size_t min_points) {
  const auto v = g.expand();
  if (v.size() < min_points) {
    ck.fail(path, "needs at least " + std::to_string(min_points) + " points, has " +
                      std::to_string(v.size()));
  }
  if (v.front() > lo * (1 + 1e-9) || v.back() < hi * (1 - 1e-9)) {
    ck.fail(path, "must span at least [" + json(lo).dump() + ", " + json(hi).dump() + "]");
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : FormatError(join_problems(problems)), problems_(std::move(problems)) {}

GridSpec GridSpec::linear(double start, double stop, int points) {
  GridSpec g;
  g.start = start;
  g.stop = stop;
  g.points = points;
  return g;
}

GridSpec GridSpec::logarithmic(double start, double stop, int points) {
  GridSpec g = linear(start, stop, points);
  g.log_spacing = true;
  return g;
}

std::vector<double> GridSpec::expand() const {
  if (!values.empty()) return values;
  std::vector<double> out(static_cast<std::size_t>(points));
  const double n = static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / n;
    out[static_cast<std::size_t>(i)] =
        log_spacing ? start * std::pow(stop / start, f) : start + (stop - start) * f;
  }
  // Pin the end points exactly.
  out.front() = start;
  out.back() = stop;
  return out;
}

nlohmann::json GridSpec::to_json() const {
  if (!values.empty()) return values;
  return {{"start", start}, {"stop", stop}, {"points", points},
          {"spacing", log_spacing ? "log" : "linear"}};
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "gnuplot") return OutputFormat::gnuplot;
  throw InvalidArgument("unknown format '" + std::string(name) + "' (expected csv, json or gnuplot)");
}

std::string_view to_string(OutputFormat f) noexcept {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::gnuplot: return "gnuplot";
  }
  return "csv";
}

double theta_from_user(Axis axis, double v) {
  switch (axis) {
    case Axis::const_T_vary_B: return v / 1e3;
    case Axis::const_B_vary_T: return v / 1e9;
    case Axis::const_ratio_vary_Etot: return v / 1e6;
    case Axis::const_Etot_vary_ratio: return v;
  }
  return v;
}

double theta_to_user(Axis axis, double v) {
  switch (axis) {
    case Axis::const_T_vary_B: return v * 1e3;
    case Axis::const_B_vary_T: return v * 1e9;
    case Axis::const_ratio_vary_Etot: return v * 1e6;
    case Axis::const_Etot_vary_ratio: return v;
  }
  return v;
}

double fixed_from_user(Axis axis, double v) {
  switch (axis) {
    case Axis::const_T_vary_B: return v / 1e9;
    case Axis::const_B_vary_T: return v / 1e3;
    case Axis::const_ratio_vary_Etot: return v;
    case Axis::const_Etot_vary_ratio: return v / 1e6;
  }
  return v;
}

double fixed_to_user(Axis axis, double v) {
  switch (axis) {
    case Axis::const_T_vary_B: return v * 1e9;
    case Axis::const_B_vary_T: return v * 1e3;
    case Axis::const_ratio_vary_Etot: return v;
    case Axis::const_Etot_vary_ratio: return v * 1e6;
  }
  return v;
}

std::string theta_column(Axis axis) {
  switch (axis) {
    case Axis::const_T_vary_B: return "b_field_mG";
    case Axis::const_B_vary_T: return "temperature_nK";
    case Axis::const_ratio_vary_Etot: return "e_total_uK";
    case Axis::const_Etot_vary_ratio: return "e_ratio";
  }
  return "theta";
}

std::string fixed_name(Axis axis) {
  switch (axis) {
    case Axis::const_T_vary_B: return "temperature_nK";
    case Axis::const_B_vary_T: return "b_field_mG";
    case Axis::const_ratio_vary_Etot: return "e_ratio";
    case Axis::const_Etot_vary_ratio: return "e_total_uK";
  }
  return "fixed";
}

namespace {

GridSpec default_profile_grid(Axis axis) {
  switch (axis) {
    case Axis::const_T_vary_B: return GridSpec::logarithmic(0.5, 100.0, 200);
    case Axis::const_B_vary_T: return GridSpec::logarithmic(20.0, 20000.0, 200);
    case Axis::const_ratio_vary_Etot: return GridSpec::logarithmic(0.1, 10.0, 200);
    case Axis::const_Etot_vary_ratio: return GridSpec::linear(0.1, 2.0, 381);
  }
  return {};
}

std::optional<double> default_fixed_value(Axis axis, const UserPoint& ref, const PhysicalConstants& c) {
  const EnergyPlanePoint e = to_energy_plane(ref.to_bt(), c);
  switch (axis) {
    case Axis::const_T_vary_B: return ref.temperature_nK;
    case Axis::const_B_vary_T:
      if (ref.b_field_mG > 0.0) return ref.b_field_mG;
      return std::nullopt;
    case Axis::const_ratio_vary_Etot:
      if (e.zeeman > 0.0) return e.thermal / e.zeeman;
      return std::nullopt;
    case Axis::const_Etot_vary_ratio: return (e.thermal + e.zeeman) * 1e6;
  }
  return std::nullopt;
}

void parse_constants(Checker& ck, const json& j, PhysicalConstants& c) {
  const std::string path = "$.constants";
  if (!ck.object(j, path, {"bohr_magneton_J_per_T", "boltzmann_J_per_K", "mass_rb_kg", "mass_cs_kg",
                           "g_cs", "g_rb"})) {
    return;
  }
  auto set = [&](const char* key, double& field) {
    if (!j.contains(key)) return;
    if (auto v = ck.positive(j[key], path + "." + key)) field = *v;
  };
  set("bohr_magneton_J_per_T", c.bohr_magneton);
  set("boltzmann_J_per_K", c.boltzmann);
  set("mass_rb_kg", c.mass_rb);
  set("mass_cs_kg", c.mass_cs);
  set("g_cs", c.g_cs);
  set("g_rb", c.g_rb);
  try {
    c.validate();
  } catch (const Error& e) {
    ck.fail(path, e.what());
  }
}

void parse_geometry(Checker& ck, const json& j, CloudGeometry& g) {
  const std::string path = "$.geometry";
  if (!j.is_object()) {
    ck.fail(path, "expected an object");
    return;
  }
  const std::string mode = j.contains("mode") && j["mode"].is_string() ? j["mode"].get<std::string>() : "";
  if (mode == "constant") {
    if (!ck.object(j, path, {"mode", "density_m3"})) return;
    if (!j.contains("density_m3")) {
      ck.fail(path + ".density_m3", "missing required field");
      return;
    }
    if (auto d = ck.positive(j["density_m3"], path + ".density_m3")) g = ConstantOverlap{*d};
  } else if (mode == "gaussian") {
    if (!ck.object(j, path, {"mode", "rb_peak_density_m3", "rb_widths_m", "cs_widths_m", "cs_offset_m"})) {
      return;
    }
    GaussianClouds gc;
    bool good = true;
    for (const char* k : {"rb_peak_density_m3", "rb_widths_m", "cs_widths_m"}) {
      if (!j.contains(k)) {
        ck.fail(path + "." + k, "missing required field");
        good = false;
      }
    }
    if (!good) return;
    auto peak = ck.positive(j["rb_peak_density_m3"], path + ".rb_peak_density_m3");
    auto rb = ck.vec3(j["rb_widths_m"], path + ".rb_widths_m", true);
    auto cs = ck.vec3(j["cs_widths_m"], path + ".cs_widths_m", true);
    std::optional<std::array<double, 3>> off = std::array<double, 3>{};
    if (j.contains("cs_offset_m")) off = ck.vec3(j["cs_offset_m"], path + ".cs_offset_m", false);
    if (!peak || !rb || !cs || !off) return;
    gc.rb_peak_density = *peak;
    gc.rb_widths = *rb;
    gc.cs_widths = *cs;
    gc.cs_center_offset = *off;
    g = gc;
  } else {
    ck.fail(path + ".mode", "must be \"constant\" or \"gaussian\"");
  }
}

void parse_initial(Checker& ck, const json& j, SpinDistribution& out) {
  const std::string path = "$.initial";
  if (j.is_number_integer()) {
    if (auto m = ck.integer(j, path, -3, 3)) out = SpinDistribution::pure(*m);
    return;
  }
  if (!j.is_array() || j.size() != kLevels) {
    ck.fail(path, "expected an m_F integer or an array of 7 populations (m_F = -3 ... +3)");
    return;
  }
  auto v = ck.numbers(j, path, false);
  if (!v) return;
  SpinDistribution d;
  std::copy(v->begin(), v->end(), d.p.begin());
  try {
    d.validate(1e-9);
    out = d;
  } catch (const Error& e) {
    ck.fail(path, e.what());
  }
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  Checker ck;
  RunConfig c;
  if (!ck.object(doc, "$", {"constants", "cross_section_file", "cross_section_scale_m2", "geometry",
                            "initial", "reference", "axes", "profile", "scan", "maxima", "fraction",
                            "fit", "evolve", "group", "delta_rel", "at_time_s", "output"})) {
    throw ConfigError(std::move(ck.problems));
  }

  if (doc.contains("constants")) parse_constants(ck, doc["constants"], c.constants);

  if (doc.contains("cross_section_file")) {
    if (auto s = ck.string(doc["cross_section_file"], "$.cross_section_file")) {
      std::filesystem::path p(*s);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      p = p.lexically_normal();
      if (p.is_relative()) p = std::filesystem::absolute(p);
      try {
        (void)load_cross_sections(p);
        c.cross_section_file = p.string();
      } catch (const Error& e) {
        ck.fail("$.cross_section_file", e.what());
      }
    }
  }
  if (doc.contains("cross_section_scale_m2")) {
    if (auto v = ck.positive(doc["cross_section_scale_m2"], "$.cross_section_scale_m2")) {
      c.cross_section_scale_m2 = *v;
    }
  }
  if (doc.contains("geometry")) parse_geometry(ck, doc["geometry"], c.geometry);
  if (doc.contains("initial")) parse_initial(ck, doc["initial"], c.initial);

  bool have_reference = false;
  if (!doc.contains("reference")) {
    ck.fail("$.reference", "missing required field");
  } else if (auto p = ck.point(doc["reference"], "$.reference")) {
    c.reference = *p;
    have_reference = true;
  }

  if (doc.contains("axes")) {
    const json& a = doc["axes"];
    if (!a.is_array() || a.empty()) {
      ck.fail("$.axes", "expected a non-empty array of axis names");
    } else {
      c.axes.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string p = "$.axes[" + std::to_string(i) + "]";
        if (auto s = ck.string(a[i], p)) {
          try {
            c.axes.push_back(parse_axis(*s));
          } catch (const Error& e) {
            ck.fail(p, e.what());
          }
        }
      }
    }
  }

  if (doc.contains("profile")) {
    const json& j = doc["profile"];
    if (ck.object(j, "$.profile", {"axis", "fixed_value", "grid"})) {
      if (j.contains("axis")) {
        if (auto s = ck.string(j["axis"], "$.profile.axis")) {
          try {
            c.profile.axis = parse_axis(*s);
          } catch (const Error& e) {
            ck.fail("$.profile.axis", e.what());
          }
        }
      }
      if (j.contains("fixed_value")) c.profile.fixed_value = ck.positive(j["fixed_value"], "$.profile.fixed_value");
      if (j.contains("grid")) c.profile.grid = ck.grid(j["grid"], "$.profile.grid");
    }
  }
  if (!c.profile.grid) c.profile.grid = default_profile_grid(c.profile.axis);
  if (!c.profile.fixed_value && have_reference) {
    c.profile.fixed_value = default_fixed_value(c.profile.axis, c.reference, c.constants);
    if (!c.profile.fixed_value) {
      ck.fail("$.profile.fixed_value", "required when the reference field is zero");
    }
  }

  if (doc.contains("scan")) {
    const json& j = doc["scan"];
    if (ck.object(j, "$.scan", {"b_grid_mG", "t_grid_nK"})) {
      if (j.contains("b_grid_mG")) {
        if (auto g = ck.grid(j["b_grid_mG"], "$.scan.b_grid_mG")) c.scan_b_mG = *g;
      }
      if (j.contains("t_grid_nK")) {
        if (auto g = ck.grid(j["t_grid_nK"], "$.scan.t_grid_nK")) c.scan_t_nK = *g;
      }
    }
  }
  if (distinct_count(c.scan_b_mG.expand()) < 10) ck.fail("$.scan.b_grid_mG", "needs at least 10 distinct points");
  if (distinct_count(c.scan_t_nK.expand()) < 10) ck.fail("$.scan.t_grid_nK", "needs at least 10 distinct points");

  if (doc.contains("maxima")) {
    const json& j = doc["maxima"];
    if (ck.object(j, "$.maxima", {"e_total_uK", "ratio_grid"})) {
      if (j.contains("e_total_uK")) {
        if (auto v = ck.numbers(j["e_total_uK"], "$.maxima.e_total_uK", true)) c.maxima.e_total_uK = *v;
      }
      if (j.contains("ratio_grid")) {
        if (auto g = ck.grid(j["ratio_grid"], "$.maxima.ratio_grid")) c.maxima.ratio_grid = *g;
      }
    }
  }
  check_span(ck, "$.maxima.ratio_grid", c.maxima.ratio_grid, 0.1, 2.0, 200);

  if (doc.contains("fraction")) {
    const json& j = doc["fraction"];
    if (ck.object(j, "$.fraction", {"ratio_grid"}) && j.contains("ratio_grid")) {
      if (auto g = ck.grid(j["ratio_grid"], "$.fraction.ratio_grid")) c.fraction_grid = *g;
    }
  }
  if (c.fraction_grid.expand().size() < 100) ck.fail("$.fraction.ratio_grid", "needs at least 100 points");

  if (doc.contains("fit")) {
    const json& j = doc["fit"];
    if (ck.object(j, "$.fit", {"ratio_grid", "max_iterations"})) {
      if (j.contains("ratio_grid")) {
        if (auto g = ck.grid(j["ratio_grid"], "$.fit.ratio_grid")) c.fit.ratio_grid = *g;
      }
      if (j.contains("max_iterations")) {
        if (auto n = ck.integer(j["max_iterations"], "$.fit.max_iterations", 1, 100000)) c.fit.max_iterations = *n;
      }
    }
  }
  check_span(ck, "$.fit.ratio_grid", c.fit.ratio_grid, 0.1, 2.5, 5);

  if (doc.contains("evolve")) {
    const json& j = doc["evolve"];
    if (ck.object(j, "$.evolve", {"times_s"}) && j.contains("times_s")) {
      if (auto v = ck.numbers(j["times_s"], "$.evolve.times_s", false)) {
        const bool ok = std::all_of(v->begin(), v->end(), [](double t) { return t >= 0.0; }) &&
                        std::is_sorted(v->begin(), v->end());
        if (ok) c.evolve_times_s = *v;
        else ck.fail("$.evolve.times_s", "times must be non-negative and ascending");
      }
    }
  }

  if (doc.contains("group")) {
    const json& j = doc["group"];
    if (ck.object(j, "$.group", {"points", "centers_uK", "tolerance"})) {
      if (j.contains("points")) {
        if (!j["points"].is_array()) {
          ck.fail("$.group.points", "expected an array of points");
        } else {
          for (std::size_t i = 0; i < j["points"].size(); ++i) {
            if (auto p = ck.point(j["points"][i], "$.group.points[" + std::to_string(i) + "]")) {
              c.group.points.push_back(*p);
            }
          }
        }
      }
      if (j.contains("centers_uK")) {
        if (auto v = ck.numbers(j["centers_uK"], "$.group.centers_uK", true)) c.group.centers_uK = *v;
      }
      if (j.contains("tolerance")) {
        if (auto v = ck.positive(j["tolerance"], "$.group.tolerance")) c.group.tolerance = *v;
      }
    }
  }
  if (c.group.points.empty() && have_reference) c.group.points.push_back(c.reference);

  if (doc.contains("delta_rel")) {
    if (auto v = ck.number(doc["delta_rel"], "$.delta_rel",
                           [](double d) { return d > 0.0 && d <= 0.1; }, "in (0, 0.1]")) {
      c.delta_rel = *v;
    }
  }
  if (doc.contains("at_time_s") && !doc["at_time_s"].is_null()) {
    c.at_time_s = ck.non_negative(doc["at_time_s"], "$.at_time_s");
  }

  if (doc.contains("output")) {
    const json& j = doc["output"];
    if (ck.object(j, "$.output", {"path", "format"})) {
      if (j.contains("path")) c.output_path = ck.string(j["path"], "$.output.path");
      if (j.contains("format")) {
        if (auto s = ck.string(j["format"], "$.output.format")) {
          try {
            c.output_format = parse_format(*s);
            c.output_format_set = true;
          } catch (const Error& e) {
            ck.fail("$.output.format", e.what());
          }
        }
      }
    }
  }

  if (!ck.problems.empty()) throw ConfigError(std::move(ck.problems));
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

nlohmann::json config_to_json(const RunConfig& c) {
  json doc;
  doc["constants"] = {{"bohr_magneton_J_per_T", c.constants.bohr_magneton},
                      {"boltzmann_J_per_K", c.constants.boltzmann},
                      {"mass_rb_kg", c.constants.mass_rb},
                      {"mass_cs_kg", c.constants.mass_cs},
                      {"g_cs", c.constants.g_cs},
                      {"g_rb", c.constants.g_rb}};
  if (c.cross_section_file) doc["cross_section_file"] = *c.cross_section_file;
  doc["cross_section_scale_m2"] = c.cross_section_scale_m2;
  if (const auto* k = std::get_if<ConstantOverlap>(&c.geometry)) {
    doc["geometry"] = {{"mode", "constant"}, {"density_m3", k->density}};
  } else {
    const auto& g = std::get<GaussianClouds>(c.geometry);
    doc["geometry"] = {{"mode", "gaussian"},
                       {"rb_peak_density_m3", g.rb_peak_density},
                       {"rb_widths_m", g.rb_widths},
                       {"cs_widths_m", g.cs_widths},
                       {"cs_offset_m", g.cs_center_offset}};
  }
  doc["initial"] = c.initial.p;
  doc["reference"] = {{"b_field_mG", c.reference.b_field_mG},
                      {"temperature_nK", c.reference.temperature_nK}};
  json axes = json::array();
  for (Axis a : c.axes) axes.push_back(std::string(to_string(a)));
  doc["axes"] = axes;
  json profile = {{"axis", std::string(to_string(c.profile.axis))}};
  if (c.profile.fixed_value) profile["fixed_value"] = *c.profile.fixed_value;
  if (c.profile.grid) profile["grid"] = c.profile.grid->to_json();
  doc["profile"] = profile;
  doc["scan"] = {{"b_grid_mG", c.scan_b_mG.to_json()}, {"t_grid_nK", c.scan_t_nK.to_json()}};
  doc["maxima"] = {{"e_total_uK", c.maxima.e_total_uK}, {"ratio_grid", c.maxima.ratio_grid.to_json()}};
  doc["fraction"] = {{"ratio_grid", c.fraction_grid.to_json()}};
  doc["fit"] = {{"ratio_grid", c.fit.ratio_grid.to_json()}, {"max_iterations", c.fit.max_iterations}};
  doc["evolve"] = {{"times_s", c.evolve_times_s}};
  json points = json::array();
  for (const auto& p : c.group.points) {
    points.push_back({{"b_field_mG", p.b_field_mG}, {"temperature_nK", p.temperature_nK}});
  }
  doc["group"] = {{"points", points}, {"centers_uK", c.group.centers_uK}, {"tolerance", c.group.tolerance}};
  doc["delta_rel"] = c.delta_rel;
  if (c.at_time_s) doc["at_time_s"] = *c.at_time_s;
  return doc;
}

ProbeModel make_model(const RunConfig& c) {
  ProbeModel m;
  m.constants = c.constants;
  m.cross_sections = c.cross_section_file
                         ? load_cross_sections(*c.cross_section_file)
                         : default_cross_sections(c.cross_section_scale_m2);
  m.geometry = c.geometry;
  m.initial = c.initial;
  return m;
}

}  // namespace spinprobe
