#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spinprobe/commands.hpp"

namespace {

using spinprobe::OutputFormat;
using json = nlohmann::json;

struct Options {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format;
  unsigned threads = 0;
  std::optional<double> delta_rel;
  std::optional<double> at_time;
  std::optional<double> b_mG;
  std::optional<double> t_nK;
  bool check = false;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw spinprobe::FormatError("cannot open output file " + path);
  out << text;
  if (!out) throw spinprobe::FormatError("failed writing " + path);
}

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw spinprobe::FormatError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw spinprobe::FormatError("config file " + path + " is not valid JSON: " + e.what());
  }
}

int run(const Options& o) {
  json doc = o.config_path.empty() ? json::object() : read_document(o.config_path);
  if (!doc.is_object()) throw spinprobe::ConfigError({"$: expected an object"});
  if (o.b_mG || o.t_nK) {
    json& ref = doc["reference"];
    if (!ref.is_object()) ref = json::object();
    if (o.b_mG) ref["b_field_mG"] = *o.b_mG;
    if (o.t_nK) ref["temperature_nK"] = *o.t_nK;
  }
  if (o.delta_rel) doc["delta_rel"] = *o.delta_rel;
  if (o.at_time) doc["at_time_s"] = *o.at_time;
  const std::filesystem::path base =
      o.config_path.empty() ? std::filesystem::path{} : std::filesystem::path(o.config_path).parent_path();
  const spinprobe::RunConfig config = spinprobe::parse_config(doc, base);

  const spinprobe::CommandOutput out = spinprobe::run_command(o.command, config, o.threads);
  OutputFormat format = out.default_format;
  if (config.output_format_set) format = config.output_format;
  if (!o.format.empty()) format = spinprobe::parse_format(o.format);
  std::string path = o.out_path;
  if (path.empty() && config.output_path) path = *config.output_path;
  write_output(path, spinprobe::render_envelope(out, config, format, spinprobe::utc_timestamp()));
  return 0;
}

int rerun(const Options& o) {
  std::ifstream in(o.config_path, std::ios::binary);
  if (!in) throw spinprobe::FormatError("cannot open envelope " + o.config_path);
  const spinprobe::Envelope env = spinprobe::read_envelope(in);
  const spinprobe::RunConfig config = spinprobe::parse_config(env.config);
  const spinprobe::CommandOutput out = spinprobe::run_command(env.command, config, o.threads);
  if (o.check) {
    if (spinprobe::render_payload(out, env.format) != env.payload) {
      std::cerr << "spinprobe: rerun payload differs from " << o.config_path << "\n";
      return 3;
    }
    std::cerr << "spinprobe: rerun payload identical\n";
    return 0;
  }
  write_output(o.out_path, spinprobe::render_envelope(out, config, env.format, spinprobe::utc_timestamp()));
  return 0;
}

std::string describe(std::string_view name) {
  static const std::map<std::string_view, std::string> text{
      {"fraction", "Endoergic fraction and its derivatives versus E_ratio"},
      {"rates", "Thermally averaged collision rates at the reference point"},
      {"evolve", "Spin populations at the configured times"},
      {"steady", "Steady-state populations by two independent methods"},
      {"sensitivity", "Statistical speed and Fisher information along each axis"},
      {"profile", "Sensitivity along one axis over a grid"},
      {"scan", "Sensitivity on a (B, T) grid"},
      {"maxima", "Profile maxima versus derivative maxima of the fraction"},
      {"fit", "Refit of the four-parameter fraction model"},
      {"group", "Assign measurement points to total-energy bands"},
  };
  const auto it = text.find(name);
  return it == text.end() ? std::string() : it->second;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-atom spin probe of an ultracold bath: endoergic fractions, rates, spin "
               "dynamics and Fisher-information sensitivity maps"};
  app.set_version_flag("--version", std::string(spinprobe::kToolkitVersion));
  app.require_subcommand(1);
  Options o;

  for (std::string_view name : spinprobe::command_names()) {
    CLI::App* sub = app.add_subcommand(std::string(name), describe(name));
    sub->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_path, "Output file (default: stdout)");
    sub->add_option("--format", o.format, "csv, json or gnuplot")
        ->check(CLI::IsMember({"csv", "json", "gnuplot"}));
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    sub->add_option("--delta-rel", o.delta_rel, "Relative finite-difference step");
    sub->add_option("--at-time", o.at_time, "Interaction time in seconds (default: steady state)");
    sub->add_option("--b-mG", o.b_mG, "Reference field in mG");
    sub->add_option("--t-nK", o.t_nK, "Reference temperature in nK");
    sub->callback([&o, name] { o.command = std::string(name); });
  }
  CLI::App* re = app.add_subcommand("rerun", "Re-run the command embedded in an output file");
  re->add_option("envelope", o.config_path, "File written by an earlier run")
      ->required()
      ->check(CLI::ExistingFile);
  re->add_option("--out", o.out_path, "Output file (default: stdout)");
  re->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  re->add_flag("--check", o.check, "Compare the new payload with the stored one instead of writing");
  re->callback([&o] { o.command = "rerun"; });

  CLI11_PARSE(app, argc, argv);

  try {
    return o.command == "rerun" ? rerun(o) : run(o);
  } catch (const spinprobe::ConfigError& e) {
    std::cerr << "spinprobe: " << e.what() << "\n";
    return 2;
  } catch (const spinprobe::InvalidArgument& e) {
    std::cerr << "spinprobe: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "spinprobe: " << e.what() << "\n";
    return 1;
  }
}
