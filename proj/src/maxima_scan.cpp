#include "spinprobe/maxima_scan.hpp"

#include <algorithm>
#include <cmath>

#include "spinprobe/endo_fraction.hpp"
#include "spinprobe/error.hpp"
#include "spinprobe/parallel.hpp"
#include "spinprobe/peak.hpp"

namespace spinprobe {

namespace {

std::vector<double> sorted_unique(std::span<const double> grid, const char* name) {
  std::vector<double> out(grid.begin(), grid.end());
  for (double v : out) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(name) + " values must be positive and finite");
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() < 10) {
    throw InvalidArgument(std::string(name) + " needs at least 10 distinct points, got " +
                          std::to_string(out.size()));
  }
  return out;
}

}  // namespace

ScanTable scan_bt_grid(const ProbeModel& model, std::span<const double> b_grid,
                       std::span<const double> t_grid, double delta_rel,
                       std::optional<double> at_time, unsigned threads) {
  ScanTable table;
  table.b_grid = sorted_unique(b_grid, "B grid");
  table.t_grid = sorted_unique(t_grid, "T grid");
  const std::size_t n_axes = std::size(kAllAxes);
  const std::size_t n_points = table.b_grid.size() * table.t_grid.size();
  table.cells.resize(n_points * n_axes);

  parallel_for(n_points, threads, [&](std::size_t k) {
    const double b = table.b_grid[k / table.t_grid.size()];
    const double t = table.t_grid[k % table.t_grid.size()];
    for (std::size_t a = 0; a < n_axes; ++a) {
      ScanCell& cell = table.cells[k * n_axes + a];
      cell.b_field = b;
      cell.temperature = t;
      cell.axis = kAllAxes[a];
      try {
        cell.result = sensitivity(model, {b, t}, cell.axis, delta_rel, at_time);
      } catch (const Error& e) {
        cell.error = e.what();
      }
    }
  });
  return table;
}

MaximaReport locate_maxima(const ProbeModel& model, double e_tot,
                           std::span<const double> ratio_grid, double delta_rel,
                           std::optional<double> at_time, unsigned threads) {
  if (!(e_tot > 0.0)) throw InvalidArgument("locate_maxima: E_tot must be positive");
  if (ratio_grid.size() < 200) {
    throw InvalidArgument("locate_maxima: ratio grid needs at least 200 points");
  }
  // Allow for round-off in grids built as start + i * step.
  if (!std::is_sorted(ratio_grid.begin(), ratio_grid.end()) || ratio_grid.front() > 0.1 * (1 + 1e-9) ||
      ratio_grid.back() < 2.0 * (1 - 1e-9)) {
    throw InvalidArgument("locate_maxima: ratio grid must be ascending and span [0.1, 2.0]");
  }

  const SensitivityProfile profile = sensitivity_profile(
      model, Axis::const_Etot_vary_ratio, e_tot, ratio_grid, delta_rel, at_time, threads);
  const Peak left = refined_argmax(profile.theta, profile.sqrt_f_left);
  const Peak right = refined_argmax(profile.theta, profile.sqrt_f_right);
  const FractionDerivatives deriv = fraction_derivatives(ratio_grid);

  MaximaReport r;
  r.e_tot = e_tot;
  r.ratio_at_left_max = left.x;
  r.ratio_at_right_max = right.x;
  r.sqrt_f_left_max = left.value;
  r.sqrt_f_right_max = right.value;
  r.left_interior = left.interior;
  r.right_interior = right.interior;
  r.ratio_at_d1_max = deriv.first_argmax;
  r.ratio_at_d2_max = deriv.second_argmax;
  r.fraction_at_left_max = fraction_of_ratio(left.x);
  r.fraction_at_right_max = fraction_of_ratio(right.x);
  r.deviation_left_d1 = std::abs(left.x - deriv.first_argmax);
  r.deviation_right_d2 = std::abs(right.x - deriv.second_argmax);
  return r;
}

std::vector<ProfileMaximum> profile_maxima(const SensitivityProfile& profile) {
  std::vector<ProfileMaximum> out;
  for (Side side : {Side::left, Side::right}) {
    const auto& values = side == Side::left ? profile.sqrt_f_left : profile.sqrt_f_right;
    const Peak p = refined_argmax(profile.theta, values);
    ProfileMaximum m;
    m.side = side;
    m.theta = p.x;
    m.sqrt_f = p.value;
    m.interior = p.interior;
    m.outside_experimental_control =
        profile.axis == Axis::const_T_vary_B && p.x < kMinControllableField;
    out.push_back(m);
  }
  return out;
}

EnergyBandGrouping group_by_total_energy(std::span<const BTPoint> points,
                                         std::span<const double> centers, double tolerance,
                                         const PhysicalConstants& c) {
  if (!(tolerance > 0.0)) throw InvalidArgument("grouping tolerance must be positive");
  for (double center : centers) {
    if (!(center > 0.0)) throw InvalidArgument("band centres must be positive");
  }
  EnergyBandGrouping g;
  g.band_centers.assign(centers.begin(), centers.end());
  g.tolerance = tolerance;
  g.assignments.resize(points.size());
  g.deviations.resize(points.size());

  std::vector<double> all;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const EnergyPlanePoint plane = to_energy_plane(points[i], c);
    const double e = plane.thermal + plane.zeeman;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double dev = std::abs(e - centers[k]) / centers[k];
      if (dev < tolerance) {
        g.assignments[i].push_back(k);
        g.deviations[i].push_back(dev);
        all.push_back(dev);
      }
    }
  }
  // Sorted summation keeps the mean independent of input order.
  std::sort(all.begin(), all.end());
  double sum = 0.0;
  for (double d : all) sum += d;
  g.mean_relative_deviation = all.empty() ? 0.0 : sum / static_cast<double>(all.size());
  return g;
}

}  // namespace spinprobe
