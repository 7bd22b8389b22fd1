#pragma once

// Population dynamics of the seven Cs m_F levels under nearest-neighbour spin
// exchange: dP/dt = G P with G tridiagonal and zero column sums.

#include <array>
#include <span>
#include <vector>

#include "spinprobe/collision_rates.hpp"

namespace spinprobe {

inline constexpr int kLevels = 7;

[[nodiscard]] constexpr std::size_t level_index(int m_f) noexcept {
  return static_cast<std::size_t>(m_f + 3);
}

/// Probabilities over m_F = −3 … +3 (index 0 is m_F = −3).
struct SpinDistribution {
  std::array<double, kLevels> p{};

  [[nodiscard]] double& operator[](std::size_t i) { return p[i]; }
  [[nodiscard]] double operator[](std::size_t i) const { return p[i]; }
  [[nodiscard]] double at_m(int m_f) const { return p.at(level_index(m_f)); }
  [[nodiscard]] double sum() const noexcept;

  /// Unit mass at a single level.
  [[nodiscard]] static SpinDistribution pure(int m_f);
  [[nodiscard]] static SpinDistribution uniform();

  /// Throws unless every entry is in [0, 1] and the total is 1 within `tolerance`.
  void validate(double tolerance = 1e-9) const;
};

[[nodiscard]] double l1_distance(const SpinDistribution& a, const SpinDistribution& b) noexcept;

/// Column j holds the flows out of level j. Entries: s^-1.
struct RateGenerator {
  std::array<std::array<double, kLevels>, kLevels> m{};

  [[nodiscard]] double operator()(std::size_t row, std::size_t col) const { return m[row][col]; }
  [[nodiscard]] double max_out_rate() const noexcept;
  [[nodiscard]] SpinDistribution apply(const SpinDistribution& p) const noexcept;
};

[[nodiscard]] RateGenerator build_generator(const TransitionRates& r);

struct EvolveResult {
  SpinDistribution distribution;      // negatives clipped to 0, not renormalized
  double time = 0.0;
  double normalization_drift = 0.0;   // |Σ P − 1| before clipping
  double min_population = 0.0;        // smallest raw entry before clipping
  long long steps = 0;
};

/// Fixed-step classical RK4, h = min(0.01 / max_out_rate, t / 100).
/// Throws StiffnessError when t / h would exceed 1e12.
[[nodiscard]] EvolveResult evolve(const SpinDistribution& p0, const RateGenerator& g, double t);

/// States at each of the ascending `times`, integrated piecewise from p0
/// (same step rule applied to each interval).
[[nodiscard]] std::vector<EvolveResult> evolve_trajectory(const SpinDistribution& p0,
                                                          const RateGenerator& g,
                                                          std::span<const double> times);

/// Detailed-balance product form π_{m+1}/π_m = Γ(m→m+1)/Γ(m+1→m).
/// A vanishing endo (exo) rate empties every level above (below) the break.
[[nodiscard]] SpinDistribution steady_state(const TransitionRates& r);

/// G π = 0, Σ π = 1 by dense LU with one row replaced by the normalization.
[[nodiscard]] SpinDistribution steady_state_nullspace(const RateGenerator& g);

}  // namespace spinprobe
