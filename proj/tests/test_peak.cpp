#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "spinprobe/peak.hpp"

using namespace spinprobe;

TEST_CASE("parabola vertex recovered exactly on a non-uniform grid") {
  const std::vector<double> x{0.0, 0.3, 0.7, 1.2, 1.5, 2.1};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 - 2.0 * (v - 0.83) * (v - 0.83));
  const Peak p = refined_argmax(x, y);
  CHECK(p.interior);
  CHECK(p.index == 2);
  CHECK(p.x == doctest::Approx(0.83).epsilon(1e-12));
  CHECK(p.value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("boundary maxima are flagged") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> up{1, 2, 3, 4};
  const Peak p = refined_argmax(x, up);
  CHECK_FALSE(p.interior);
  CHECK(p.x == 4.0);
  const std::vector<double> down{4, 3, 2, 1};
  CHECK_FALSE(refined_argmax(x, down).interior);
}

TEST_CASE("NaN entries are skipped") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{nan, 1.0, 2.0, 1.0, nan};
  const Peak p = refined_argmax(x, y);
  CHECK(p.index == 2);
  CHECK(p.x == doctest::Approx(3.0));
}

TEST_CASE("mismatched or empty inputs throw") {
  const std::vector<double> x{1, 2, 3};
  const std::vector<double> y{1, 2};
  CHECK_THROWS((void)refined_argmax(x, y));
  CHECK_THROWS((void)refined_argmax(std::vector<double>{}, std::vector<double>{}));
}
