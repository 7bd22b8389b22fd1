#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "spinprobe/endo_fraction.hpp"
#include "spinprobe/error.hpp"
#include "spinprobe/maxima_scan.hpp"

using namespace spinprobe;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

// Point whose E_tot equals `e_tot` (K) at E_ratio 0.6.
BTPoint at_energy(double e_tot) { return from_energy_point({e_tot, 0.6}); }

}  // namespace

TEST_CASE("scan over the experimental range") {
  const ProbeModel m;
  const auto b = linspace(0.010, 0.080, 10);
  const auto t = linspace(200e-9, 1000e-9, 10);
  const ScanTable s = scan_bt_grid(m, b, t);
  REQUIRE(s.cells.size() == 10 * 10 * 4);
  for (const ScanCell& c : s.cells) {
    REQUIRE(c.result.has_value());
    CHECK(std::isfinite(c.result->sqrt_fisher_left()));
    CHECK(std::isfinite(c.result->sqrt_fisher_right()));
    CHECK(c.error.empty());
  }
  CHECK(s.cells[4 * (3 * 10 + 7) + 1].b_field == b[3]);
  CHECK(s.cells[4 * (3 * 10 + 7) + 1].temperature == t[7]);
  CHECK(s.cells[4 * (3 * 10 + 7) + 1].axis == kAllAxes[1]);
}

TEST_CASE("scan deduplicates and sorts grids") {
  const ProbeModel m;
  auto b = linspace(0.010, 0.080, 10);
  b.push_back(0.010);
  b.push_back(0.080);
  std::reverse(b.begin(), b.end());
  const ScanTable s = scan_bt_grid(m, b, linspace(200e-9, 1000e-9, 10));
  CHECK(s.b_grid.size() == 10);
  CHECK(std::is_sorted(s.b_grid.begin(), s.b_grid.end()));
  auto short_grid = linspace(0.01, 0.08, 9);
  short_grid.push_back(0.01);
  CHECK_THROWS_AS((void)scan_bt_grid(m, short_grid, linspace(200e-9, 1000e-9, 10)), InvalidArgument);
}

TEST_CASE("scan marks failing cells instead of aborting") {
  const ProbeModel m;
  auto b = linspace(0.010, 0.080, 10);
  b.front() = 1e-8;  // left step along const_T_vary_B leaves E_Z > 0
  const ScanTable s = scan_bt_grid(m, b, linspace(200e-9, 1000e-9, 10));
  std::size_t failed = 0;
  for (const ScanCell& c : s.cells) {
    if (!c.result) {
      ++failed;
      CHECK_FALSE(c.error.empty());
    }
  }
  CHECK(failed > 0);
  CHECK(failed < s.cells.size());
}

TEST_CASE("scan at zero interaction time carries no information") {
  const ProbeModel m;
  const ScanTable s = scan_bt_grid(m, linspace(0.01, 0.08, 10), linspace(200e-9, 1000e-9, 10),
                                   kDefaultDeltaRel, 0.0);
  for (const ScanCell& c : s.cells) {
    REQUIRE(c.result.has_value());
    CHECK(c.result->sqrt_fisher_left() == 0.0);
    CHECK(c.result->sqrt_fisher_right() == 0.0);
  }
}

TEST_CASE("scan is invariant under uniform rate scaling") {
  ProbeModel a;
  ProbeModel b;
  b.cross_sections = default_cross_sections(1e-13);
  const auto bg = linspace(0.01, 0.08, 10);
  const auto tg = linspace(200e-9, 1000e-9, 10);
  const ScanTable x = scan_bt_grid(a, bg, tg);
  const ScanTable y = scan_bt_grid(b, bg, tg);
  for (std::size_t i = 0; i < x.cells.size(); ++i) {
    if (x.cells[i].axis == Axis::const_ratio_vary_Etot) continue;  // identically zero up to round-off
    CHECK(x.cells[i].result->sqrt_fisher_left() ==
          doctest::Approx(y.cells[i].result->sqrt_fisher_left()).epsilon(1e-9));
  }
}

TEST_CASE("maxima at 1.6 uK") {
  const ProbeModel m;
  const MaximaReport r = locate_maxima(m, 1.6e-6, linspace(0.1, 2.0, 381));
  CHECK(r.left_interior);
  CHECK(r.right_interior);
  CHECK(r.fraction_at_left_max >= 0.10);
  CHECK(r.fraction_at_left_max <= 0.25);
  CHECK(r.fraction_at_left_max == doctest::Approx(fraction_of_ratio(r.ratio_at_left_max)));
  CHECK(r.deviation_left_d1 < kAlignmentBracket);
  CHECK(r.left_aligned());
  CHECK(r.ratio_at_d1_max == doctest::Approx(0.4003).epsilon(2e-3));
  CHECK(r.ratio_at_d2_max == doctest::Approx(0.1865).epsilon(3e-3));
  CHECK(r.deviation_right_d2 == doctest::Approx(std::abs(r.ratio_at_right_max - r.ratio_at_d2_max)));
  CHECK(r.ratio_at_left_max >= 0.1);
  CHECK(r.ratio_at_right_max <= 2.0);
}

TEST_CASE("maxima are stable under grid refinement") {
  const ProbeModel m;
  const auto coarse = linspace(0.1, 2.0, 200);
  const MaximaReport a = locate_maxima(m, 1.6e-6, coarse);
  const MaximaReport b = locate_maxima(m, 1.6e-6, linspace(0.1, 2.0, 400));
  const double cell = coarse[1] - coarse[0];
  CHECK(std::abs(a.ratio_at_left_max - b.ratio_at_left_max) < cell);
  CHECK(std::abs(a.ratio_at_right_max - b.ratio_at_right_max) < cell);
}

TEST_CASE("derivative maxima are universal across total energies") {
  const ProbeModel m;
  const auto grid = linspace(0.1, 2.0, 200);
  const MaximaReport ref = locate_maxima(m, 1.6e-6, grid);
  for (double e : {0.7e-6, 1.1e-6, 2.2e-6}) {
    const MaximaReport r = locate_maxima(m, e, grid);
    CHECK(r.ratio_at_d1_max == ref.ratio_at_d1_max);
    CHECK(r.ratio_at_d2_max == ref.ratio_at_d2_max);
  }
}

TEST_CASE("locate_maxima preconditions") {
  const ProbeModel m;
  CHECK_THROWS_AS((void)locate_maxima(m, 1.6e-6, linspace(0.1, 2.0, 199)), InvalidArgument);
  CHECK_THROWS_AS((void)locate_maxima(m, 1.6e-6, linspace(0.2, 2.0, 300)), InvalidArgument);
  CHECK_THROWS_AS((void)locate_maxima(m, 1.6e-6, linspace(0.1, 1.9, 300)), InvalidArgument);
  CHECK_THROWS_AS((void)locate_maxima(m, 0.0, linspace(0.1, 2.0, 300)), InvalidArgument);
}

TEST_CASE("boundary maxima are flagged") {
  const ProbeModel m;
  // On [1.0, 2.0] both wings decrease monotonically away from the low-ratio end.
  const auto grid = linspace(1.0, 2.0, 50);
  const SensitivityProfile p = sensitivity_profile(m, Axis::const_Etot_vary_ratio, 1.6e-6, grid);
  for (const ProfileMaximum& mx : profile_maxima(p)) CHECK_FALSE(mx.interior);
}

TEST_CASE("low-field maxima on the constant-T axis are outside experimental control") {
  const ProbeModel m;
  std::vector<double> grid;
  for (double b = 0.0005; b <= 0.1; b *= 1.05) grid.push_back(b);
  const SensitivityProfile p = sensitivity_profile(m, Axis::const_T_vary_B, 435e-9, grid);
  const auto maxima = profile_maxima(p);
  REQUIRE(maxima.size() == 2);
  for (const ProfileMaximum& mx : maxima) {
    CHECK(mx.outside_experimental_control == (mx.theta < kMinControllableField));
  }
  const SensitivityProfile other = sensitivity_profile(m, Axis::const_B_vary_T, 0.043, linspace(50e-9, 2e-6, 60));
  for (const ProfileMaximum& mx : profile_maxima(other)) CHECK_FALSE(mx.outside_experimental_control);
}

TEST_CASE("energy band grouping") {
  const std::vector<double> centers{1.0e-6, 1.5e-6};
  SUBCASE("exact centre") {
    const std::vector<BTPoint> pts{at_energy(1.0e-6)};
    const auto g = group_by_total_energy(pts, centers);
    REQUIRE(g.assignments[0].size() == 1);
    CHECK(g.assignments[0][0] == 0);
    CHECK(g.deviations[0][0] < 1e-12);
  }
  SUBCASE("30% away from everything") {
    const std::vector<BTPoint> pts{at_energy(0.7e-6)};
    const auto g = group_by_total_energy(pts, centers);
    CHECK(g.assignments[0].empty());
    CHECK(g.mean_relative_deviation == 0.0);
  }
  SUBCASE("20% from two adjacent centres") {
    const std::vector<double> pair{1.0e-6, 1.5e-6};
    const std::vector<BTPoint> pts{at_energy(1.2e-6)};
    const auto g = group_by_total_energy(pts, pair);
    REQUIRE(g.assignments[0].size() == 2);
    CHECK(g.deviations[0][0] == doctest::Approx(0.2));
    CHECK(g.deviations[0][1] == doctest::Approx(0.2));
    CHECK(g.mean_relative_deviation == doctest::Approx(0.2));
  }
  SUBCASE("validation") {
    const std::vector<BTPoint> pts{at_energy(1.0e-6)};
    CHECK_THROWS_AS((void)group_by_total_energy(pts, std::vector<double>{-1.0}), InvalidArgument);
    CHECK_THROWS_AS((void)group_by_total_energy(pts, centers, 0.0), InvalidArgument);
  }
}

TEST_CASE("grouping is order independent") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> ub(0.005, 0.09), ut(100e-9, 1.5e-6);
  std::vector<BTPoint> pts;
  for (int i = 0; i < 60; ++i) pts.push_back({ub(rng), ut(rng)});
  const std::vector<double> centers{0.7e-6, 1.1e-6, 1.3e-6, 1.6e-6, 1.91e-6, 2.2e-6};
  const auto a = group_by_total_energy(pts, centers);
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<BTPoint> shuffled;
  for (std::size_t i : order) shuffled.push_back(pts[i]);
  const auto b = group_by_total_energy(shuffled, centers);
  CHECK(a.mean_relative_deviation == b.mean_relative_deviation);
  for (std::size_t k = 0; k < order.size(); ++k) CHECK(b.assignments[k] == a.assignments[order[k]]);
}
