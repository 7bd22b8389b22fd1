#pragma once

// Spin-exchange rates Γ = ⟨n⟩ σ̄ v̄ for the twelve nearest-neighbour transitions
// of the Cs F=3 manifold, with σ̄ the Maxwell-Boltzmann average of the cross
// section above the endoergic threshold.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "spinprobe/units.hpp"

namespace spinprobe {

enum class Direction { endo, exo };

[[nodiscard]] const char* to_string(Direction d) noexcept;

/// σ(E) sampled at ascending collision energies (kelvin-equivalent). Linear
/// interpolation between samples, end values held outside the sampled range.
struct SampledCrossSection {
  std::vector<double> energy;  // K
  std::vector<double> area;    // m^2

  [[nodiscard]] double operator()(double e) const;
  void validate() const;
};

/// Constant area (m^2) or a sampled σ(E) curve.
using CrossSection = std::variant<double, SampledCrossSection>;

/// Lowest / highest m_F a transition may start from.
[[nodiscard]] constexpr int min_m_from(Direction d) noexcept { return d == Direction::endo ? -3 : -2; }
[[nodiscard]] constexpr int max_m_from(Direction d) noexcept { return d == Direction::endo ? 2 : 3; }

/// One entry per transition: endo m → m+1 for m ∈ [−3, 2], exo m → m−1 for m ∈ [−2, 3].
class CrossSectionTable {
 public:
  CrossSectionTable();

  void set(int m_from, Direction d, CrossSection entry);
  [[nodiscard]] const CrossSection& at(int m_from, Direction d) const;
  [[nodiscard]] bool has(int m_from, Direction d) const;

  /// Throws FormatError naming the first missing transition.
  void require_complete() const;

  /// Multiplies every area by `factor` (> 0).
  [[nodiscard]] CrossSectionTable scaled(double factor) const;

 private:
  static std::size_t slot(int m_from, Direction d);
  std::array<std::optional<CrossSection>, 12> entries_;
};

/// Reads the `m_from,direction,energy_uK,sigma_m2` CSV. A blank energy marks a
/// constant entry; several rows with energies for one transition form a curve.
[[nodiscard]] CrossSectionTable read_cross_sections(std::istream& in);
[[nodiscard]] CrossSectionTable load_cross_sections(const std::filesystem::path& path);

/// Twelve identical constant entries.
[[nodiscard]] CrossSectionTable default_cross_sections(double scale_m2 = 1e-16);

struct ConstantOverlap {
  double density = 0.0;  // m^-3
};

/// Thermal Rb cloud (peak density, Gaussian rms widths) and the Cs probe
/// position distribution (normalized Gaussian, offset from the Rb centre).
struct GaussianClouds {
  double rb_peak_density = 0.0;              // m^-3
  std::array<double, 3> rb_widths{};          // m
  std::array<double, 3> cs_widths{};          // m
  std::array<double, 3> cs_center_offset{};   // m
};

using CloudGeometry = std::variant<ConstantOverlap, GaussianClouds>;

/// ⟨n⟩ = ∫ n_Cs n_Rb d³r with n_Cs normalized to one atom.
[[nodiscard]] double density_overlap(const CloudGeometry& g);

/// ∫_threshold^∞ σ(E) p_MB(E; T) dE. Temperature in K, threshold kelvin-equivalent.
[[nodiscard]] double thermal_average_sigma(const CrossSection& entry, double temperature,
                                           double threshold);

/// endo[i]: m = i−3 → m+1; exo[i]: m = i−2 → m−1. Both in s^-1.
/// endo[i] and exo[i] therefore connect the same pair of neighbouring levels.
struct TransitionRates {
  std::array<double, 6> endo{};
  std::array<double, 6> exo{};

  [[nodiscard]] TransitionRates scaled(double factor) const;
  [[nodiscard]] double max_rate() const noexcept;
};

[[nodiscard]] TransitionRates compute_rates(const CrossSectionTable& table, const BTPoint& p,
                                            const CloudGeometry& g,
                                            const PhysicalConstants& c = default_constants());

}  // namespace spinprobe
