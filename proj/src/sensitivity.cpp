#include "spinprobe/sensitivity.hpp"

#include <numbers>
#include <string>

#include "spinprobe/error.hpp"
#include "spinprobe/parallel.hpp"

namespace spinprobe {

std::string_view to_string(Axis a) noexcept {
  switch (a) {
    case Axis::const_T_vary_B: return "const_T_vary_B";
    case Axis::const_B_vary_T: return "const_B_vary_T";
    case Axis::const_ratio_vary_Etot: return "const_ratio_vary_Etot";
    case Axis::const_Etot_vary_ratio: return "const_Etot_vary_ratio";
  }
  return "unknown";
}

std::string_view to_string(Side s) noexcept { return s == Side::left ? "left" : "right"; }

Axis parse_axis(std::string_view name) {
  for (Axis a : kAllAxes) {
    if (to_string(a) == name) return a;
  }
  throw InvalidArgument("unknown axis '" + std::string(name) +
                        "' (expected const_T_vary_B, const_B_vary_T, const_ratio_vary_Etot or "
                        "const_Etot_vary_ratio)");
}

SpinDistribution probe_distribution(const ProbeModel& model, const BTPoint& p,
                                    std::optional<double> at_time) {
  const TransitionRates rates =
      compute_rates(model.cross_sections, p, model.geometry, model.constants);
  if (!at_time) return steady_state(rates);
  if (!(*at_time >= 0.0)) throw InvalidArgument("interaction time must be non-negative");
  return evolve(model.initial, build_generator(rates), *at_time).distribution;
}

namespace {

void require_normalized(const SpinDistribution& p, const char* which) {
  if (std::abs(p.sum() - 1.0) > 1e-6) {
    throw InvalidArgument(std::string("bures_distance: ") + which + " is not normalized (sum = " +
                          std::to_string(p.sum()) + ")");
  }
}

double floored(double v) { return v < 1e-15 ? 0.0 : v; }

}  // namespace

double bures_distance(const SpinDistribution& p, const SpinDistribution& q) {
  require_normalized(p, "first argument");
  require_normalized(q, "second argument");
  double d2 = 0.0;
  for (std::size_t i = 0; i < kLevels; ++i) {
    const double diff = std::sqrt(floored(p[i])) - std::sqrt(floored(q[i]));
    d2 += diff * diff;
  }
  return std::sqrt(d2);
}

double hellinger_distance(const SpinDistribution& p, const SpinDistribution& q) {
  return bures_distance(p, q) / std::numbers::sqrt2;
}

double fisher_direct(const SpinDistribution& p, const SpinDistribution& dp) {
  double total = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < kLevels; ++i) {
    total += dp[i];
    scale += std::abs(dp[i]);
  }
  if (std::abs(total) > 1e-6 * std::max(1.0, scale)) {
    throw InvalidArgument("fisher_direct: derivative must sum to zero, got " +
                          std::to_string(total));
  }
  double f = 0.0;
  for (std::size_t i = 0; i < kLevels; ++i) {
    if (dp[i] == 0.0) continue;
    if (!(p[i] > 0.0)) {
      throw NumericalError("fisher_direct: zero population at level " + std::to_string(i) +
                           " with non-zero derivative");
    }
    f += dp[i] * dp[i] / p[i];
  }
  return f;
}

double axis_value(const BTPoint& p, Axis axis, const PhysicalConstants& c) {
  switch (axis) {
    case Axis::const_T_vary_B: return p.b_field;
    case Axis::const_B_vary_T: return p.temperature;
    case Axis::const_ratio_vary_Etot: return to_energy_point(p, c).e_total;
    case Axis::const_Etot_vary_ratio: return to_energy_point(p, c).e_ratio;
  }
  throw InvalidArgument("unknown axis");
}

BTPoint point_on_axis(Axis axis, double fixed_value, double theta, const PhysicalConstants& c) {
  switch (axis) {
    case Axis::const_T_vary_B: return {theta, fixed_value};
    case Axis::const_B_vary_T: return {fixed_value, theta};
    case Axis::const_ratio_vary_Etot: return from_energy_point({theta, fixed_value}, c);
    case Axis::const_Etot_vary_ratio: return from_energy_point({fixed_value, theta}, c);
  }
  throw InvalidArgument("unknown axis");
}

BTPoint displaced_point(const BTPoint& ref, Axis axis, double offset, const PhysicalConstants& c) {
  if (!(ref.b_field > 0.0) || !(ref.temperature > 0.0)) {
    throw InvalidArgument("sensitivity reference needs B > 0 and T > 0");
  }
  const EnergyPlanePoint e = to_energy_plane(ref, c);
  const double step = offset * (e.thermal + e.zeeman);
  EnergyPlanePoint moved = e;
  switch (axis) {
    case Axis::const_T_vary_B:
      moved.zeeman += step;
      break;
    case Axis::const_B_vary_T:
      moved.thermal += step;
      break;
    case Axis::const_ratio_vary_Etot: {
      const double scale = 1.0 + step / std::hypot(e.thermal, e.zeeman);
      moved.thermal *= scale;
      moved.zeeman *= scale;
      break;
    }
    case Axis::const_Etot_vary_ratio:
      moved.thermal += step / std::numbers::sqrt2;
      moved.zeeman -= step / std::numbers::sqrt2;
      break;
  }
  if (!(moved.thermal > 0.0) || !(moved.zeeman > 0.0)) {
    throw InvalidArgument("step along " + std::string(to_string(axis)) +
                          " leaves the domain (E_th > 0, E_Z > 0)");
  }
  return from_energy_plane(moved, c);
}

namespace {

void require_delta(double delta_rel) {
  if (!(delta_rel > 0.0 && delta_rel <= 0.1)) {
    throw InvalidArgument("delta_rel must lie in (0, 0.1], got " + std::to_string(delta_rel));
  }
}

double side_speed(const ProbeModel& model, const SpinDistribution& at_ref, const BTPoint& ref,
                  Axis axis, Side side, double delta_rel, std::optional<double> at_time) {
  const double offset = side == Side::right ? delta_rel : -delta_rel;
  const BTPoint moved = displaced_point(ref, axis, offset, model.constants);
  return hellinger_distance(at_ref, probe_distribution(model, moved, at_time)) / delta_rel;
}

}  // namespace

double statistical_speed(const ProbeModel& model, const BTPoint& ref, Axis axis, Side side,
                         double delta_rel, std::optional<double> at_time) {
  require_delta(delta_rel);
  const SpinDistribution at_ref = probe_distribution(model, ref, at_time);
  return side_speed(model, at_ref, ref, axis, side, delta_rel, at_time);
}

SensitivityResult sensitivity(const ProbeModel& model, const BTPoint& ref, Axis axis,
                              double delta_rel, std::optional<double> at_time) {
  require_delta(delta_rel);
  const SpinDistribution at_ref = probe_distribution(model, ref, at_time);
  return {axis, axis_value(ref, axis, model.constants),
          side_speed(model, at_ref, ref, axis, Side::left, delta_rel, at_time),
          side_speed(model, at_ref, ref, axis, Side::right, delta_rel, at_time), delta_rel};
}

SensitivityProfile sensitivity_profile(const ProbeModel& model, Axis axis, double fixed_value,
                                       std::span<const double> theta_grid, double delta_rel,
                                       std::optional<double> at_time, unsigned threads) {
  require_delta(delta_rel);
  if (theta_grid.empty()) throw InvalidArgument("sensitivity_profile: empty grid");
  SensitivityProfile out;
  out.axis = axis;
  out.fixed_value = fixed_value;
  out.theta.assign(theta_grid.begin(), theta_grid.end());
  out.sqrt_f_left.resize(theta_grid.size());
  out.sqrt_f_right.resize(theta_grid.size());
  parallel_for(theta_grid.size(), threads, [&](std::size_t i) {
    const BTPoint ref = point_on_axis(axis, fixed_value, theta_grid[i], model.constants);
    const SensitivityResult r = sensitivity(model, ref, axis, delta_rel, at_time);
    out.sqrt_f_left[i] = r.sqrt_fisher_left();
    out.sqrt_f_right[i] = r.sqrt_fisher_right();
  });
  return out;
}

}  // namespace spinprobe
