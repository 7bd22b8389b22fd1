#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spinprobe/sensitivity.hpp"

namespace spinprobe {

struct ScanCell {
  double b_field = 0.0;       // G
  double temperature = 0.0;   // K
  Axis axis = Axis::const_T_vary_B;
  std::optional<SensitivityResult> result;
  std::string error;          // set when result is empty
};

struct ScanTable {
  std::vector<double> b_grid;
  std::vector<double> t_grid;
  /// Row-major over (b, t), four axes per point in kAllAxes order.
  std::vector<ScanCell> cells;
};

/// Sensitivity on every (B, T) grid cell along all four axes. Grids are sorted
/// and de-duplicated and must keep at least 10 points each. Cells whose steps
/// leave the domain carry an error message instead of aborting the scan.
[[nodiscard]] ScanTable scan_bt_grid(const ProbeModel& model, std::span<const double> b_grid,
                                     std::span<const double> t_grid,
                                     double delta_rel = kDefaultDeltaRel,
                                     std::optional<double> at_time = std::nullopt,
                                     unsigned threads = 0);

/// Maximum separation (in E_ratio) still counted as "close" to a derivative maximum.
inline constexpr double kAlignmentBracket = 0.1;

struct MaximaReport {
  double e_tot = 0.0;  // kelvin-equivalent
  double ratio_at_left_max = 0.0;
  double ratio_at_right_max = 0.0;
  double sqrt_f_left_max = 0.0;
  double sqrt_f_right_max = 0.0;
  bool left_interior = false;
  bool right_interior = false;
  double ratio_at_d1_max = 0.0;
  double ratio_at_d2_max = 0.0;
  double fraction_at_left_max = 0.0;
  double fraction_at_right_max = 0.0;
  double deviation_left_d1 = 0.0;   // |left max − first-derivative max|
  double deviation_right_d2 = 0.0;  // |right max − second-derivative max|

  [[nodiscard]] bool left_aligned() const noexcept { return deviation_left_d1 < kAlignmentBracket; }
  [[nodiscard]] bool right_aligned() const noexcept { return deviation_right_d2 < kAlignmentBracket; }
};

/// Left/right sensitivity maxima along the constant-E_tot axis compared with the
/// maxima of p'(E_ratio) and p''(E_ratio). The grid must span [0.1, 2.0] with
/// at least 200 points.
[[nodiscard]] MaximaReport locate_maxima(const ProbeModel& model, double e_tot,
                                         std::span<const double> ratio_grid,
                                         double delta_rel = kDefaultDeltaRel,
                                         std::optional<double> at_time = std::nullopt,
                                         unsigned threads = 0);

/// Fields accessible in the experiment (G).
inline constexpr double kMinControllableField = 0.010;
inline constexpr double kMaxControllableField = 0.080;

struct ProfileMaximum {
  Side side = Side::left;
  double theta = 0.0;
  double sqrt_f = 0.0;
  bool interior = false;
  /// Constant-T maxima below the controllable field range.
  bool outside_experimental_control = false;
};

[[nodiscard]] std::vector<ProfileMaximum> profile_maxima(const SensitivityProfile& profile);

struct EnergyBandGrouping {
  std::vector<double> band_centers;               // kelvin-equivalent
  double tolerance = 0.25;                        // relative
  std::vector<std::vector<std::size_t>> assignments;  // per point: band indices
  std::vector<std::vector<double>> deviations;        // matching relative deviations
  double mean_relative_deviation = 0.0;           // over all memberships; 0 if none
};

/// A point joins every band whose centre is within `tolerance` (relative) of its E_tot.
[[nodiscard]] EnergyBandGrouping group_by_total_energy(std::span<const BTPoint> points,
                                                       std::span<const double> centers,
                                                       double tolerance = 0.25,
                                                       const PhysicalConstants& c = default_constants());

}  // namespace spinprobe
