#pragma once

#include <cstddef>
#include <span>

namespace spinprobe {

struct Peak {
  double x = 0.0;
  double value = 0.0;
  std::size_t index = 0;   // grid index of the raw argmax
  bool interior = false;   // false when the raw argmax sits on a grid boundary
};

/// Grid argmax followed by a parabola through the argmax and its two
/// neighbours (non-uniform spacing allowed). Boundary maxima are returned
/// unrefined with interior = false. NaN entries are ignored.
[[nodiscard]] Peak refined_argmax(std::span<const double> x, std::span<const double> y);

}  // namespace spinprobe
