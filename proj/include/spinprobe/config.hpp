#pragma once

// JSON run configuration. User-facing units: field in mG, temperature in nK,
// energies in µK, times in s, areas in m^2, densities in m^-3.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinprobe/collision_rates.hpp"
#include "spinprobe/error.hpp"
#include "spinprobe/sensitivity.hpp"
#include "spinprobe/spin_dynamics.hpp"
#include "spinprobe/units.hpp"

namespace spinprobe {

/// Every validation problem found in one document, each prefixed by its JSON path.
class ConfigError : public FormatError {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Either an explicit list or `points` samples from `start` to `stop`.
struct GridSpec {
  std::vector<double> values;
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
  bool log_spacing = false;

  [[nodiscard]] static GridSpec linear(double start, double stop, int points);
  [[nodiscard]] static GridSpec logarithmic(double start, double stop, int points);
  [[nodiscard]] std::vector<double> expand() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

enum class OutputFormat { csv, json, gnuplot };
[[nodiscard]] OutputFormat parse_format(std::string_view name);
[[nodiscard]] std::string_view to_string(OutputFormat f) noexcept;

/// Bath condition in user units.
struct UserPoint {
  double b_field_mG = 0.0;
  double temperature_nK = 0.0;
  [[nodiscard]] BTPoint to_bt() const noexcept { return {b_field_mG / 1e3, temperature_nK / 1e9}; }
};

struct ProfileConfig {
  Axis axis = Axis::const_Etot_vary_ratio;
  std::optional<double> fixed_value;  // user units of the fixed coordinate; default from reference
  std::optional<GridSpec> grid;       // user units of theta; default depends on the axis
};

struct MaximaConfig {
  std::vector<double> e_total_uK{0.7, 1.1, 1.3, 1.6, 1.91, 2.2};
  GridSpec ratio_grid = GridSpec::linear(0.1, 2.0, 381);
};

struct FitConfig {
  GridSpec ratio_grid = GridSpec::linear(0.1, 2.5, 241);
  int max_iterations = 200;
};

struct GroupConfig {
  std::vector<UserPoint> points;  // empty: the reference point alone
  std::vector<double> centers_uK{0.7, 1.1, 1.3, 1.6, 1.91, 2.2};
  double tolerance = 0.25;
};

struct RunConfig {
  PhysicalConstants constants{};
  std::optional<std::string> cross_section_file;  // absolute after parsing
  double cross_section_scale_m2 = 1e-16;
  CloudGeometry geometry = ConstantOverlap{1e18};
  SpinDistribution initial = SpinDistribution::pure(2);
  UserPoint reference;
  std::vector<Axis> axes{std::begin(kAllAxes), std::end(kAllAxes)};
  ProfileConfig profile;
  GridSpec scan_b_mG = GridSpec::linear(10.0, 80.0, 15);
  GridSpec scan_t_nK = GridSpec::linear(200.0, 1000.0, 17);
  MaximaConfig maxima;
  GridSpec fraction_grid = GridSpec::linear(0.1, 3.0, 291);
  FitConfig fit;
  std::vector<double> evolve_times_s{0.0, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  GroupConfig group;
  double delta_rel = kDefaultDeltaRel;
  std::optional<double> at_time_s;
  std::optional<std::string> output_path;
  OutputFormat output_format = OutputFormat::csv;
  bool output_format_set = false;
};

/// Validates `doc`, collecting every problem before throwing ConfigError.
/// Relative cross_section_file paths resolve against `base_dir`.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc,
                                     const std::filesystem::path& base_dir = {});
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved document; parse_config(config_to_json(c)) reproduces c.
[[nodiscard]] nlohmann::json config_to_json(const RunConfig& c);

/// Probe model described by the config (loads the cross-section file if any).
[[nodiscard]] ProbeModel make_model(const RunConfig& c);

/// Conversions between the axis coordinates in user units and internal units.
[[nodiscard]] double theta_from_user(Axis axis, double v);
[[nodiscard]] double theta_to_user(Axis axis, double v);
[[nodiscard]] double fixed_from_user(Axis axis, double v);
[[nodiscard]] double fixed_to_user(Axis axis, double v);
[[nodiscard]] std::string theta_column(Axis axis);
[[nodiscard]] std::string fixed_name(Axis axis);

}  // namespace spinprobe
