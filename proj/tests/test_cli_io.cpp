#include <doctest.h>

#include <charconv>
#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <locale>
#include <numbers>
#include <sstream>

#include "spinprobe/commands.hpp"

using namespace spinprobe;
using json = nlohmann::json;

namespace {

json minimal() { return {{"reference", {{"b_field_mG", 43}, {"temperature_nK", 435}}}}; }

// Small grids keep the end-to-end runs fast.
json quick() {
  json j = minimal();
  j["maxima"] = {{"e_total_uK", {1.6}}, {"ratio_grid", {{"start", 0.1}, {"stop", 2.0}, {"points", 200}}}};
  j["profile"] = {{"axis", "const_B_vary_T"}, {"grid", {{"start", 50}, {"stop", 2000}, {"points", 40}, {"spacing", "log"}}}};
  j["scan"] = {{"b_grid_mG", {{"start", 10}, {"stop", 80}, {"points", 10}}},
               {"t_grid_nK", {{"start", 200}, {"stop", 1000}, {"points", 10}}}};
  j["group"] = {{"points", {{{"b_field_mG", 43}, {"temperature_nK", 435}}, {{"b_field_mG", 20}, {"temperature_nK", 900}}}}};
  return j;
}

std::vector<std::string> problems_of(const json& doc) {
  try {
    (void)parse_config(doc);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("number formatting is locale independent with 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5) == "-2.5");
  CHECK(format_number(1e-16) == "9.9999999999999998e-17");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  for (const char* name : {"de_DE.UTF-8", "fr_FR.UTF-8"}) {
    if (std::setlocale(LC_ALL, name) != nullptr) {
      CHECK(format_number(0.5) == "0.5");
      std::setlocale(LC_ALL, "C");
    }
  }
  // Round-trips exactly.
  for (double v : {std::numbers::pi, 1.0 / 3.0, 6.02214076e23, 5e-324}) {
    const std::string text = format_number(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
  }
}

TEST_CASE("CSV rendering") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  Table t;
  t.columns = {"x", "label", "flag", "n"};
  t.add_row({0.25, std::string("a,b"), true, std::int64_t{-3}});
  CHECK(render_csv(t) == "x,label,flag,n\n0.25,\"a,b\",true,-3\n");
  CHECK_THROWS_AS(t.add_row({1.0}), InvalidArgument);
  const json j = table_to_json(Table{{"v"}, {{std::numeric_limits<double>::quiet_NaN()}}});
  CHECK(j["rows"][0][0].is_null());
}

TEST_CASE("gnuplot blocks") {
  Table t;
  t.columns = {"b", "t", "v"};
  t.add_row({1.0, 1.0, 0.5});
  t.add_row({1.0, 2.0, 0.6});
  t.add_row({2.0, 1.0, 0.7});
  CHECK(render_gnuplot(t, "b") == "# b t v\n1 1 0.5\n1 2 0.59999999999999998\n\n2 1 0.69999999999999996\n");
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config(minimal());
  CHECK(c.reference.b_field_mG == 43.0);
  CHECK(c.delta_rel == kDefaultDeltaRel);
  CHECK(c.axes.size() == 4);
  CHECK(c.profile.fixed_value.has_value());
  CHECK(c.profile.fixed_value.value() == doctest::Approx(1.157).epsilon(1e-3));
  CHECK(c.group.points.size() == 1);
  CHECK_FALSE(c.at_time_s.has_value());
}

TEST_CASE("validation errors name their fields") {
  json neg = minimal();
  neg["reference"]["temperature_nK"] = -5;
  CHECK(mentions(problems_of(neg), "$.reference.temperature_nK"));

  CHECK(mentions(problems_of(json::object()), "$.reference"));

  json unknown = minimal();
  unknown["colour"] = "blue";
  unknown["reference"]["units"] = "SI";
  const auto p = problems_of(unknown);
  CHECK(mentions(p, "$.colour: unknown key"));
  CHECK(mentions(p, "$.reference.units: unknown key"));

  json many = minimal();
  many["delta_rel"] = 0.5;
  many["geometry"] = {{"mode", "constant"}, {"density_m3", -1}};
  many["initial"] = 7;
  many["axes"] = {"const_T_vary_B", "sideways"};
  many["scan"] = {{"b_grid_mG", {1, 2, 3}}};
  many["fit"] = {{"ratio_grid", {{"start", 0.5}, {"stop", 2.5}, {"points", 100}}}};
  many["profile"] = {{"grid", {{"start", 1}, {"stop", 2}, {"points", 10}, {"spacing", "cubic"}}}};
  const auto all = problems_of(many);
  CHECK(mentions(all, "$.delta_rel"));
  CHECK(mentions(all, "$.geometry.density_m3"));
  CHECK(mentions(all, "$.initial"));
  CHECK(mentions(all, "$.axes[1]"));
  CHECK(mentions(all, "$.scan.b_grid_mG"));
  CHECK(mentions(all, "$.fit.ratio_grid"));
  CHECK(mentions(all, "$.profile.grid.spacing"));

  CHECK(mentions(problems_of(json::array()), "$: expected an object"));
}

TEST_CASE("cross-section file is loaded and checked for coverage") {
  json j = minimal();
  j["cross_section_file"] = "sigma_table.csv";
  const RunConfig c = parse_config(j, TEST_DATA_DIR);
  REQUIRE(c.cross_section_file.has_value());
  CHECK(std::filesystem::path(*c.cross_section_file).is_absolute());
  CHECK_NOTHROW(make_model(c).cross_sections.require_complete());

  const auto tmp = std::filesystem::temp_directory_path() / "spinprobe_incomplete.csv";
  {
    std::ofstream out(tmp);
    out << "m_from,direction,energy_uK,sigma_m2\n0,endo,,1e-16\n";
  }
  j["cross_section_file"] = tmp.string();
  CHECK(mentions(problems_of(j), "$.cross_section_file"));
  std::filesystem::remove(tmp);
}

TEST_CASE("gaussian geometry and populations") {
  json j = minimal();
  j["geometry"] = {{"mode", "gaussian"},
                   {"rb_peak_density_m3", 2e18},
                   {"rb_widths_m", {1e-5, 1e-5, 4e-5}},
                   {"cs_widths_m", {1e-6, 1e-6, 5e-6}}};
  j["initial"] = {0.0, 0.0, 0.0, 0.5, 0.5, 0.0, 0.0};
  const RunConfig c = parse_config(j);
  CHECK(std::holds_alternative<GaussianClouds>(c.geometry));
  CHECK(c.initial.at_m(0) == 0.5);
  j["initial"] = {0.0, 0.0, 0.0, 0.5, 0.6, 0.0, 0.0};
  CHECK(mentions(problems_of(j), "$.initial"));
}

TEST_CASE("resolved config round-trips exactly") {
  json j = quick();
  j["at_time_s"] = 3.5;
  j["constants"] = {{"g_cs", 0.25}, {"boltzmann_J_per_K", 1.380649e-23}};
  const json once = config_to_json(parse_config(j));
  const json twice = config_to_json(parse_config(once));
  CHECK(once.dump() == twice.dump());
  CHECK(once["at_time_s"] == 3.5);
}

TEST_CASE("steady command prints a normalized 7-row distribution") {
  const CommandOutput out = run_command("steady", parse_config(minimal()));
  REQUIRE(out.table.rows.size() == 7);
  double sum = 0.0;
  for (const auto& row : out.table.rows) sum += std::get<double>(row[1]);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("profile command has two sqrt(F) columns") {
  const CommandOutput out = run_command("profile", parse_config(quick()));
  CHECK(out.table.columns == std::vector<std::string>{"temperature_nK", "sqrt_F_left", "sqrt_F_right"});
  CHECK(out.table.rows.size() == 40);
  CHECK(out.summary["maxima"].size() == 2);
}

TEST_CASE("errors carry the command name") {
  CHECK_THROWS_WITH_AS((void)run_command("teleport", parse_config(minimal())),
                       doctest::Contains("teleport"), InvalidArgument);
  json j = minimal();
  j["reference"]["b_field_mG"] = 0;
  CHECK_THROWS_WITH_AS((void)run_command("sensitivity", parse_config(j)),
                       doctest::Contains("sensitivity:"), InvalidArgument);
  // Zero field is fine for the fraction itself.
  CHECK_NOTHROW((void)run_command("fraction", parse_config(j)));
}

TEST_CASE("every command reruns byte-identically from its envelope") {
  const RunConfig config = parse_config(quick());
  for (std::string_view name : command_names()) {
    for (OutputFormat f : {OutputFormat::csv, OutputFormat::json, OutputFormat::gnuplot}) {
      CAPTURE(name);
      const CommandOutput first = run_command(name, config, 2);
      std::istringstream in(render_envelope(first, config, f, "2000-01-01T00:00:00Z"));
      const Envelope env = read_envelope(in);
      CHECK(env.command == name);
      CHECK(env.format == f);
      CHECK(env.created == "2000-01-01T00:00:00Z");
      const CommandOutput again = run_command(env.command, parse_config(env.config), 1);
      CHECK(render_payload(again, env.format) == env.payload);
    }
  }
}

TEST_CASE("tampered envelopes are rejected") {
  const RunConfig config = parse_config(minimal());
  std::string text = render_envelope(run_command("steady", config), config, OutputFormat::csv, "t");
  const auto pos = text.find("\"delta_rel\":0.001");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 17, "\"delta_rel\":0.002");
  std::istringstream in(text);
  CHECK_THROWS_AS((void)read_envelope(in), FormatError);
  std::istringstream junk("hello\n");
  CHECK_THROWS_AS((void)read_envelope(junk), FormatError);
}

TEST_CASE("output formats") {
  CHECK(parse_format("gnuplot") == OutputFormat::gnuplot);
  CHECK_THROWS_AS((void)parse_format("xlsx"), InvalidArgument);
  CHECK(to_string(OutputFormat::json) == "json");
}
