#include "spinprobe/commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <istream>
#include <sstream>

#include "spinprobe/endo_fraction.hpp"
#include "spinprobe/maxima_scan.hpp"

namespace spinprobe {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 10> kCommands = {
    "fraction", "rates", "evolve", "steady", "sensitivity",
    "profile",  "scan",  "maxima", "fit",    "group"};

// E_ratio is undefined at zero field.
json ratio_or_null(const BTPoint& p, const PhysicalConstants& c) {
  return p.b_field > 0.0 ? json(to_energy_point(p, c).e_ratio) : json(nullptr);
}

const char* const kLevelColumns[kLevels] = {"P_mF-3", "P_mF-2", "P_mF-1", "P_mF+0",
                                            "P_mF+1", "P_mF+2", "P_mF+3"};

CommandOutput cmd_fraction(const RunConfig& c) {
  CommandOutput out;
  const auto grid = c.fraction_grid.expand();
  const FractionDerivatives d = fraction_derivatives(grid);
  const FitParams fit = published_fit_params();
  out.table.columns = {"e_ratio", "fraction", "first_derivative", "second_derivative", "published_fit"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.table.add_row({grid[i], d.value[i], d.first[i], d.second[i], fit(grid[i])});
  }
  const BTPoint ref = c.reference.to_bt();
  out.summary = {
      {"reference",
       {{"b_field_mG", c.reference.b_field_mG},
        {"temperature_nK", c.reference.temperature_nK},
        {"e_ratio", ratio_or_null(ref, c.constants)},
        {"fraction", endo_fraction(ref, c.constants)},
        {"fraction_quadrature", endo_fraction_quadrature(ref, c.constants)}}},
      {"first_derivative_argmax",
       {{"e_ratio", d.first_argmax}, {"fraction", fraction_of_ratio(d.first_argmax)}}},
      {"second_derivative_argmax",
       {{"e_ratio", d.second_argmax}, {"fraction", fraction_of_ratio(d.second_argmax)}}}};
  return out;
}

CommandOutput cmd_rates(const RunConfig& c) {
  CommandOutput out;
  const ProbeModel model = make_model(c);
  const BTPoint ref = c.reference.to_bt();
  const TransitionRates r = compute_rates(model.cross_sections, ref, model.geometry, model.constants);
  out.table.columns = {"m_from", "m_to", "direction", "rate_per_s"};
  for (int i = 0; i < 6; ++i) {
    out.table.add_row({std::int64_t{i - 3}, std::int64_t{i - 2}, std::string("endo"), r.endo[static_cast<std::size_t>(i)]});
  }
  for (int i = 0; i < 6; ++i) {
    out.table.add_row({std::int64_t{i - 2}, std::int64_t{i - 3}, std::string("exo"), r.exo[static_cast<std::size_t>(i)]});
  }
  const EnergyPlanePoint e = to_energy_plane(ref, model.constants);
  out.summary = {{"e_total_uK", (e.thermal + e.zeeman) * 1e6},
                 {"e_ratio", ratio_or_null(ref, model.constants)},
                 {"zeeman_energy_uK", zeeman_energy_kelvin(ref.b_field, model.constants) * 1e6},
                 {"endo_fraction", endo_fraction(ref, model.constants)},
                 {"mean_rel_speed_m_per_s", mean_rel_speed(ref.temperature, model.constants)},
                 {"density_overlap_m3", density_overlap(model.geometry)},
                 {"max_rate_per_s", r.max_rate()}};
  return out;
}

CommandOutput cmd_evolve(const RunConfig& c) {
  CommandOutput out;
  const ProbeModel model = make_model(c);
  const TransitionRates r =
      compute_rates(model.cross_sections, c.reference.to_bt(), model.geometry, model.constants);
  const auto traj = evolve_trajectory(model.initial, build_generator(r), c.evolve_times_s);
  out.table.columns = {"time_s"};
  for (const char* name : kLevelColumns) out.table.columns.emplace_back(name);
  out.table.columns.emplace_back("sum");
  out.table.columns.emplace_back("normalization_drift");
  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<Cell> row{c.evolve_times_s[k]};
    for (double p : traj[k].distribution.p) row.emplace_back(p);
    row.emplace_back(traj[k].distribution.sum());
    row.emplace_back(traj[k].normalization_drift);
    out.table.add_row(std::move(row));
  }
  out.block_column.clear();
  return out;
}

CommandOutput cmd_steady(const RunConfig& c) {
  CommandOutput out;
  const ProbeModel model = make_model(c);
  const TransitionRates r =
      compute_rates(model.cross_sections, c.reference.to_bt(), model.geometry, model.constants);
  const SpinDistribution db = steady_state(r);
  const SpinDistribution ns = steady_state_nullspace(build_generator(r));
  out.table.columns = {"m_F", "population", "population_nullspace"};
  for (std::size_t i = 0; i < kLevels; ++i) {
    out.table.add_row({static_cast<std::int64_t>(i) - 3, db[i], ns[i]});
  }
  out.summary = {{"sum", db.sum()}, {"l1_between_methods", l1_distance(db, ns)}};
  return out;
}

std::string theta_unit(Axis a) {
  switch (a) {
    case Axis::const_T_vary_B: return "mG";
    case Axis::const_B_vary_T: return "nK";
    case Axis::const_ratio_vary_Etot: return "uK";
    case Axis::const_Etot_vary_ratio: return "1";
  }
  return "";
}

CommandOutput cmd_sensitivity(const RunConfig& c) {
  CommandOutput out;
  out.default_format = OutputFormat::json;
  const ProbeModel model = make_model(c);
  const BTPoint ref = c.reference.to_bt();
  out.table.columns = {"axis",       "theta_ref",   "theta_unit", "sqrt_F_left", "sqrt_F_right",
                       "F_left",     "F_right",     "speed_left", "speed_right", "delta_rel"};
  for (Axis a : c.axes) {
    const SensitivityResult s = sensitivity(model, ref, a, c.delta_rel, c.at_time_s);
    out.table.add_row({std::string(to_string(a)), theta_to_user(a, s.theta_ref()), theta_unit(a),
                       s.sqrt_fisher_left(), s.sqrt_fisher_right(), s.fisher_left(), s.fisher_right(),
                       s.speed_left(), s.speed_right(), s.delta_used()});
  }
  out.summary = {{"reference",
                  {{"b_field_mG", c.reference.b_field_mG},
                   {"temperature_nK", c.reference.temperature_nK}}},
                 {"at_time_s", c.at_time_s ? json(*c.at_time_s) : json(nullptr)},
                 {"step_convention",
                  "relative step delta_rel * E_tot(ref) in the (E_th, E_Z) energy plane"}};
  return out;
}

CommandOutput cmd_profile(const RunConfig& c, unsigned threads) {
  CommandOutput out;
  const ProbeModel model = make_model(c);
  const Axis axis = c.profile.axis;
  const double fixed = fixed_from_user(axis, c.profile.fixed_value.value());
  const auto user_grid = c.profile.grid.value().expand();
  std::vector<double> grid(user_grid.size());
  std::transform(user_grid.begin(), user_grid.end(), grid.begin(),
                 [axis](double v) { return theta_from_user(axis, v); });
  const SensitivityProfile p =
      sensitivity_profile(model, axis, fixed, grid, c.delta_rel, c.at_time_s, threads);
  out.table.columns = {theta_column(axis), "sqrt_F_left", "sqrt_F_right"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.table.add_row({user_grid[i], p.sqrt_f_left[i], p.sqrt_f_right[i]});
  }
  json maxima = json::array();
  for (const ProfileMaximum& m : profile_maxima(p)) {
    maxima.push_back({{"side", std::string(to_string(m.side))},
                      {theta_column(axis), theta_to_user(axis, m.theta)},
                      {"sqrt_F", m.sqrt_f},
                      {"interior", m.interior},
                      {"outside_experimental_control", m.outside_experimental_control}});
  }
  out.summary = {{"axis", std::string(to_string(axis))},
                 {fixed_name(axis), *c.profile.fixed_value},
                 {"maxima", maxima}};
  return out;
}

std::vector<double> sorted_unique_user(const GridSpec& g) {
  auto v = g.expand();
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

CommandOutput cmd_scan(const RunConfig& c, unsigned threads) {
  CommandOutput out;
  const ProbeModel model = make_model(c);
  const auto b_user = sorted_unique_user(c.scan_b_mG);
  const auto t_user = sorted_unique_user(c.scan_t_nK);
  std::vector<double> b(b_user.size()), t(t_user.size());
  std::transform(b_user.begin(), b_user.end(), b.begin(), [](double v) { return v / 1e3; });
  std::transform(t_user.begin(), t_user.end(), t.begin(), [](double v) { return v / 1e9; });
  const ScanTable scan = scan_bt_grid(model, b, t, c.delta_rel, c.at_time_s, threads);
  if (scan.b_grid.size() != b_user.size() || scan.t_grid.size() != t_user.size()) {
    throw NumericalError("grid values collapse after unit conversion");
  }
  out.table.columns = {"axis", "b_field_mG", "temperature_nK", "sqrt_F_left", "sqrt_F_right", "error"};
  out.block_column = "b_field_mG";
  const std::size_t n_axes = std::size(kAllAxes);
  std::size_t failures = 0;
  // Axis-major so each axis forms one contiguous gnuplot grid.
  for (std::size_t a = 0; a < n_axes; ++a) {
    for (std::size_t i = 0; i < b_user.size(); ++i) {
      for (std::size_t j = 0; j < t_user.size(); ++j) {
        const ScanCell& cell = scan.cells[(i * t_user.size() + j) * n_axes + a];
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (!cell.result) ++failures;
        out.table.add_row({std::string(to_string(cell.axis)), b_user[i], t_user[j],
                           cell.result ? cell.result->sqrt_fisher_left() : nan,
                           cell.result ? cell.result->sqrt_fisher_right() : nan, cell.error});
      }
    }
  }
  out.summary = {{"cells", out.table.rows.size()}, {"failed_cells", failures}};
  return out;
}

CommandOutput cmd_maxima(const RunConfig& c, unsigned threads) {
  CommandOutput out;
  out.default_format = OutputFormat::json;
  const ProbeModel model = make_model(c);
  const auto grid = c.maxima.ratio_grid.expand();
  out.table.columns = {"e_total_uK",         "ratio_at_left_max",  "ratio_at_right_max",
                       "sqrt_F_left_max",    "sqrt_F_right_max",   "left_interior",
                       "right_interior",     "ratio_at_d1_max",    "ratio_at_d2_max",
                       "fraction_at_left_max", "fraction_at_right_max", "deviation_left_d1",
                       "deviation_right_d2", "left_aligned",       "right_aligned"};
  for (double e_uK : c.maxima.e_total_uK) {
    const MaximaReport r = locate_maxima(model, e_uK / 1e6, grid, c.delta_rel, c.at_time_s, threads);
    out.table.add_row({e_uK, r.ratio_at_left_max, r.ratio_at_right_max, r.sqrt_f_left_max,
                       r.sqrt_f_right_max, r.left_interior, r.right_interior, r.ratio_at_d1_max,
                       r.ratio_at_d2_max, r.fraction_at_left_max, r.fraction_at_right_max,
                       r.deviation_left_d1, r.deviation_right_d2, r.left_aligned(), r.right_aligned()});
  }
  out.summary = {{"alignment_bracket_e_ratio", kAlignmentBracket},
                 {"alignment_bracket_origin", "toolkit choice; no quantitative bracket is published"}};
  return out;
}

CommandOutput cmd_fit(const RunConfig& c) {
  CommandOutput out;
  const auto grid = c.fit.ratio_grid.expand();
  const FitParams pub = published_fit_params();
  FitResult fit;
  try {
    fit = fit_fraction(grid, c.fit.max_iterations);
  } catch (const FitNotConverged& e) {
    const FitParams& b = e.best().params;
    std::ostringstream msg;
    msg << e.what() << " (best a=" << format_number(b.a) << " b=" << format_number(b.b)
        << " c=" << format_number(b.c) << " d=" << format_number(b.d)
        << " rms=" << format_number(e.best().residual_rms) << ")";
    throw Error(msg.str());
  }
  out.table.columns = {"parameter", "published", "fitted"};
  out.table.add_row({std::string("a"), pub.a, fit.params.a});
  out.table.add_row({std::string("b"), pub.b, fit.params.b});
  out.table.add_row({std::string("c"), pub.c, fit.params.c});
  out.table.add_row({std::string("d"), pub.d, fit.params.d});
  out.summary = {{"published_rms", fit_rms(pub, grid)},
                 {"fitted_rms", fit.residual_rms},
                 {"iterations", fit.iterations}};
  return out;
}

CommandOutput cmd_group(const RunConfig& c) {
  CommandOutput out;
  std::vector<BTPoint> points;
  for (const auto& p : c.group.points) points.push_back(p.to_bt());
  std::vector<double> centers;
  for (double e : c.group.centers_uK) centers.push_back(e / 1e6);
  const EnergyBandGrouping g = group_by_total_energy(points, centers, c.group.tolerance, c.constants);
  out.table.columns = {"point", "b_field_mG", "temperature_nK", "e_total_uK",
                       "band", "band_center_uK", "relative_deviation"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::size_t unassigned = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const EnergyPlanePoint plane = to_energy_plane(points[i], c.constants);
    const double e_uK = (plane.thermal + plane.zeeman) * 1e6;
    const UserPoint& u = c.group.points[i];
    if (g.assignments[i].empty()) {
      ++unassigned;
      out.table.add_row({static_cast<std::int64_t>(i), u.b_field_mG, u.temperature_nK, e_uK,
                         std::int64_t{-1}, nan, nan});
    }
    for (std::size_t k = 0; k < g.assignments[i].size(); ++k) {
      const std::size_t band = g.assignments[i][k];
      out.table.add_row({static_cast<std::int64_t>(i), u.b_field_mG, u.temperature_nK, e_uK,
                         static_cast<std::int64_t>(band), c.group.centers_uK[band], g.deviations[i][k]});
    }
  }
  out.summary = {{"tolerance", g.tolerance},
                 {"mean_relative_deviation", g.mean_relative_deviation},
                 {"unassigned_points", unassigned}};
  return out;
}

}  // namespace

std::span<const std::string_view> command_names() noexcept { return kCommands; }

CommandOutput run_command(std::string_view name, const RunConfig& config, unsigned threads) {
  CommandOutput out;
  try {
    if (name == "fraction") out = cmd_fraction(config);
    else if (name == "rates") out = cmd_rates(config);
    else if (name == "evolve") out = cmd_evolve(config);
    else if (name == "steady") out = cmd_steady(config);
    else if (name == "sensitivity") out = cmd_sensitivity(config);
    else if (name == "profile") out = cmd_profile(config, threads);
    else if (name == "scan") out = cmd_scan(config, threads);
    else if (name == "maxima") out = cmd_maxima(config, threads);
    else if (name == "fit") out = cmd_fit(config);
    else if (name == "group") out = cmd_group(config);
    else throw InvalidArgument("unknown command '" + std::string(name) + "'");
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(std::string(name) + ": " + e.what());
  } catch (const StiffnessError& e) {
    throw StiffnessError(std::string(name) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(std::string(name) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(std::string(name) + ": " + e.what());
  }
  out.command = std::string(name);
  return out;
}

std::string render_payload(const CommandOutput& out, OutputFormat format) {
  switch (format) {
    case OutputFormat::csv: return render_csv(out.table);
    case OutputFormat::gnuplot: return render_gnuplot(out.table, out.block_column);
    case OutputFormat::json: {
      json doc = {{"table", table_to_json(out.table)}};
      if (!out.summary.is_null()) doc["summary"] = out.summary;
      return doc.dump(2) + "\n";
    }
  }
  return {};
}

std::string config_hash(const nlohmann::json& config) { return "fnv1a64:" + fnv1a_hex(config.dump()); }

std::string render_envelope(const CommandOutput& out, const RunConfig& config, OutputFormat format,
                            std::string_view timestamp) {
  const json cfg = config_to_json(config);
  if (format == OutputFormat::json) {
    json doc = {{"toolkit", std::string(kToolkitName)},
                {"version", std::string(kToolkitVersion)},
                {"command", out.command},
                {"format", "json"},
                {"created", std::string(timestamp)},
                {"config_hash", config_hash(cfg)},
                {"config", cfg},
                {"payload", json::parse(render_payload(out, format))}};
    return doc.dump(2) + "\n";
  }
  std::string s;
  s += "# " + std::string(kToolkitName) + " " + std::string(kToolkitVersion) + "\n";
  s += "# command: " + out.command + "\n";
  s += "# format: " + std::string(to_string(format)) + "\n";
  s += "# created: " + std::string(timestamp) + "\n";
  s += "# config_hash: " + config_hash(cfg) + "\n";
  s += "# config: " + cfg.dump() + "\n";
  s += render_payload(out, format);
  return s;
}

namespace {

bool take_prefix(std::string_view line, std::string_view prefix, std::string& value) {
  if (line.substr(0, prefix.size()) != prefix) return false;
  value = std::string(line.substr(prefix.size()));
  return true;
}

}  // namespace

Envelope read_envelope(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Envelope env;
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
      env.command = doc.at("command").get<std::string>();
      env.version = doc.at("version").get<std::string>();
      env.created = doc.at("created").get<std::string>();
      env.config_hash = doc.at("config_hash").get<std::string>();
      env.config = doc.at("config");
      env.payload = doc.at("payload").dump(2) + "\n";
    } catch (const json::exception& e) {
      throw FormatError(std::string("malformed JSON envelope: ") + e.what());
    }
    env.format = OutputFormat::json;
  } else {
    std::istringstream lines(text);
    std::string line, format, config_line;
    const std::string banner = "# " + std::string(kToolkitName) + " ";
    int seen = 0;
    while (seen < 6 && std::getline(lines, line)) {
      const bool ok = (seen == 0 && take_prefix(line, banner, env.version)) ||
                      (seen == 1 && take_prefix(line, "# command: ", env.command)) ||
                      (seen == 2 && take_prefix(line, "# format: ", format)) ||
                      (seen == 3 && take_prefix(line, "# created: ", env.created)) ||
                      (seen == 4 && take_prefix(line, "# config_hash: ", env.config_hash)) ||
                      (seen == 5 && take_prefix(line, "# config: ", config_line));
      if (!ok) throw FormatError("envelope header line " + std::to_string(seen + 1) + " is malformed");
      ++seen;
    }
    if (seen < 6) throw FormatError("envelope header is incomplete");
    try {
      env.config = json::parse(config_line);
    } catch (const json::exception& e) {
      throw FormatError(std::string("embedded config is not valid JSON: ") + e.what());
    }
    env.format = parse_format(format);
    const auto pos = lines.tellg();
    env.payload = pos < 0 ? std::string() : text.substr(static_cast<std::size_t>(pos));
  }
  if (config_hash(env.config) != env.config_hash) {
    throw FormatError("embedded config does not match its hash " + env.config_hash);
  }
  return env;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace spinprobe
