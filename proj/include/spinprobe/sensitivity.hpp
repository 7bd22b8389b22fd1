#pragma once

// Statistical distance between spin distributions and the one-sided
// statistical speeds / Fisher information along the four sensing axes.
//
// Step convention: a step of relative size δ moves the bath condition a
// Euclidean distance δ·E_tot(ref) in the (E_th, E_Z) energy plane, along the
// axis direction. Speeds are therefore per unit of relative energy
// displacement and comparable across axes:
//   const_B_vary_T        +E_th
//   const_T_vary_B        +E_Z
//   const_ratio_vary_Etot radially outward, E_th/E_Z fixed
//   const_Etot_vary_ratio (+E_th, −E_Z)/√2, E_tot fixed
// "right" follows the direction above, "left" goes against it.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinprobe/collision_rates.hpp"
#include "spinprobe/spin_dynamics.hpp"
#include "spinprobe/units.hpp"

namespace spinprobe {

enum class Axis { const_T_vary_B, const_B_vary_T, const_ratio_vary_Etot, const_Etot_vary_ratio };
enum class Side { left, right };

inline constexpr Axis kAllAxes[] = {Axis::const_T_vary_B, Axis::const_B_vary_T,
                                    Axis::const_ratio_vary_Etot, Axis::const_Etot_vary_ratio};

[[nodiscard]] std::string_view to_string(Axis a) noexcept;
[[nodiscard]] std::string_view to_string(Side s) noexcept;
/// Throws InvalidArgument for unknown names.
[[nodiscard]] Axis parse_axis(std::string_view name);

/// Everything needed to turn a bath condition into a spin distribution.
struct ProbeModel {
  PhysicalConstants constants{};
  CrossSectionTable cross_sections = default_cross_sections();
  CloudGeometry geometry = ConstantOverlap{1e18};
  SpinDistribution initial = SpinDistribution::pure(2);
};

/// Steady state at `p`, or the state evolved from model.initial for `at_time` seconds.
[[nodiscard]] SpinDistribution probe_distribution(const ProbeModel& model, const BTPoint& p,
                                                  std::optional<double> at_time = std::nullopt);

/// d² = 2 − 2 Σ √(P Q), evaluated as Σ (√P − √Q)². Inputs must sum to 1 within 1e-6.
[[nodiscard]] double bures_distance(const SpinDistribution& p, const SpinDistribution& q);

/// Hellinger normalization, d_Bures / √2; the distance behind statistical speeds.
[[nodiscard]] double hellinger_distance(const SpinDistribution& p, const SpinDistribution& q);

/// Classical Fisher information Σ (∂P)² / P.
[[nodiscard]] double fisher_direct(const SpinDistribution& p, const SpinDistribution& dp);

/// First-order statistical speed of an arbitrary one-parameter family:
/// hellinger(P(θ), P(θ + step)) / |step|. F = 8 s² in the small-step limit.
template <class Family>
[[nodiscard]] double one_sided_speed(Family&& family, double theta, double step) {
  return hellinger_distance(family(theta), family(theta + step)) / std::abs(step);
}

/// Value of the scanned parameter at `p`: B (G), T (K), E_tot (K), or E_ratio.
[[nodiscard]] double axis_value(const BTPoint& p, Axis axis,
                                const PhysicalConstants& c = default_constants());

/// Bath condition with `axis`'s fixed coordinate at `fixed_value` and its
/// scanned coordinate at `theta` (units as in axis_value).
[[nodiscard]] BTPoint point_on_axis(Axis axis, double fixed_value, double theta,
                                    const PhysicalConstants& c = default_constants());

/// `ref` moved by offset·E_tot(ref) along the axis direction (negative = left).
/// Throws InvalidArgument if the result leaves E_th > 0, E_Z > 0.
[[nodiscard]] BTPoint displaced_point(const BTPoint& ref, Axis axis, double offset,
                                      const PhysicalConstants& c = default_constants());

class SensitivityResult {
 public:
  SensitivityResult() = default;
  SensitivityResult(Axis axis, double theta_ref, double speed_left, double speed_right,
                    double delta_used)
      : axis_(axis), theta_ref_(theta_ref), speed_left_(speed_left), speed_right_(speed_right),
        delta_used_(delta_used) {}

  [[nodiscard]] Axis axis() const noexcept { return axis_; }
  [[nodiscard]] double theta_ref() const noexcept { return theta_ref_; }
  [[nodiscard]] double speed_left() const noexcept { return speed_left_; }
  [[nodiscard]] double speed_right() const noexcept { return speed_right_; }
  [[nodiscard]] double fisher_left() const noexcept { return 8.0 * speed_left_ * speed_left_; }
  [[nodiscard]] double fisher_right() const noexcept { return 8.0 * speed_right_ * speed_right_; }
  [[nodiscard]] double sqrt_fisher_left() const noexcept { return std::sqrt(fisher_left()); }
  [[nodiscard]] double sqrt_fisher_right() const noexcept { return std::sqrt(fisher_right()); }
  [[nodiscard]] double delta_used() const noexcept { return delta_used_; }

 private:
  Axis axis_ = Axis::const_Etot_vary_ratio;
  double theta_ref_ = 0.0;
  double speed_left_ = 0.0;
  double speed_right_ = 0.0;
  double delta_used_ = 0.0;
};

inline constexpr double kDefaultDeltaRel = 1e-3;

/// One-sided speed at `ref` with relative step delta_rel ∈ (0, 0.1].
[[nodiscard]] double statistical_speed(const ProbeModel& model, const BTPoint& ref, Axis axis,
                                       Side side, double delta_rel = kDefaultDeltaRel,
                                       std::optional<double> at_time = std::nullopt);

/// Both sides at `ref`.
[[nodiscard]] SensitivityResult sensitivity(const ProbeModel& model, const BTPoint& ref, Axis axis,
                                            double delta_rel = kDefaultDeltaRel,
                                            std::optional<double> at_time = std::nullopt);

struct SensitivityProfile {
  Axis axis = Axis::const_Etot_vary_ratio;
  double fixed_value = 0.0;
  std::vector<double> theta;
  std::vector<double> sqrt_f_left;
  std::vector<double> sqrt_f_right;
};

/// √F on both sides at every grid point of one axis. Errors propagate.
[[nodiscard]] SensitivityProfile sensitivity_profile(const ProbeModel& model, Axis axis,
                                                     double fixed_value,
                                                     std::span<const double> theta_grid,
                                                     double delta_rel = kDefaultDeltaRel,
                                                     std::optional<double> at_time = std::nullopt,
                                                     unsigned threads = 0);

}  // namespace spinprobe
