#include "spinprobe/peak.hpp"

#include <cmath>
#include <limits>

#include "spinprobe/error.hpp"

namespace spinprobe {

Peak refined_argmax(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw InvalidArgument("refined_argmax: grid and values must be non-empty and equal length");
  }
  std::size_t best = x.size();
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isnan(y[i]) && y[i] > best_value) {
      best = i;
      best_value = y[i];
    }
  }
  if (best == x.size()) {
    throw InvalidArgument("refined_argmax: no finite values");
  }

  Peak peak{x[best], best_value, best, false};
  if (best == 0 || best + 1 == x.size() || std::isnan(y[best - 1]) || std::isnan(y[best + 1])) {
    return peak;
  }
  peak.interior = true;

  // Vertex of the parabola through three (possibly unevenly spaced) points.
  const double x0 = x[best - 1], x1 = x[best], x2 = x[best + 1];
  const double y0 = y[best - 1], y1 = y[best], y2 = y[best + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature < 0.0)) {
    return peak;
  }
  const double slope_at_x1 = d01 + curvature * (x1 - x0);
  const double vertex = x1 - slope_at_x1 / (2.0 * curvature);
  if (vertex > x0 && vertex < x2) {
    peak.x = vertex;
    peak.value = y1 - slope_at_x1 * slope_at_x1 / (4.0 * curvature);
  }
  return peak;
}

}  // namespace spinprobe
