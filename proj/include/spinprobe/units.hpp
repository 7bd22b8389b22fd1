#pragma once

// Physical constants and the two coordinate systems of the bath parameter
// space: (B, T) and (E_tot, E_ratio). Energies crossing the public surface are
// kelvin-equivalent (E / k_B); joules are used only where noted.

namespace spinprobe {

/// CODATA 2018 values. Masses: 87Rb = 86.909 u, 133Cs = 132.905 u.
struct PhysicalConstants {
  double bohr_magneton = 9.2740100783e-24;   // J/T
  double boltzmann = 1.380649e-23;           // J/K
  double mass_rb = 86.909 * 1.66053906660e-27;   // kg
  double mass_cs = 132.905 * 1.66053906660e-27;  // kg
  double g_cs = 0.25;  // |g_F| of Cs F=3
  double g_rb = 0.5;   // |g_F| of Rb F=1
  int f_cs = 3;
  int f_rb = 1;

  [[nodiscard]] double reduced_mass() const noexcept {
    return mass_rb * mass_cs / (mass_rb + mass_cs);
  }

  /// Throws InvalidArgument unless all values are positive and g_rb == 2 g_cs.
  void validate() const;
};

[[nodiscard]] const PhysicalConstants& default_constants() noexcept;

inline constexpr double kTeslaPerGauss = 1e-4;

/// Bath condition. Field in gauss, temperature in kelvin.
struct BTPoint {
  double b_field = 0.0;
  double temperature = 0.0;
};

/// Bath condition as total energy (kelvin-equivalent) and E_th / E_Z.
struct EnergyPoint {
  double e_total = 0.0;
  double e_ratio = 0.0;
};

/// Cartesian point in the (E_th, E_Z) energy plane, both kelvin-equivalent.
struct EnergyPlanePoint {
  double thermal = 0.0;
  double zeeman = 0.0;
};

/// Half the Zeeman mismatch of one spin exchange, ΔE/2 = μ_B |g_F,Cs| B, in joules.
[[nodiscard]] double zeeman_gap(double b_field_gauss,
                                const PhysicalConstants& c = default_constants());

/// Zeeman energy E_Z / k_B in kelvin (equal to zeeman_gap / k_B).
[[nodiscard]] double zeeman_energy_kelvin(double b_field_gauss,
                                          const PhysicalConstants& c = default_constants());

/// Field (gauss) whose Zeeman energy equals `e_zeeman_kelvin`.
[[nodiscard]] double field_for_zeeman_energy(double e_zeeman_kelvin,
                                             const PhysicalConstants& c = default_constants());

[[nodiscard]] EnergyPoint to_energy_point(const BTPoint& p,
                                          const PhysicalConstants& c = default_constants());
[[nodiscard]] BTPoint from_energy_point(const EnergyPoint& e,
                                        const PhysicalConstants& c = default_constants());

[[nodiscard]] EnergyPlanePoint to_energy_plane(const BTPoint& p,
                                               const PhysicalConstants& c = default_constants());
[[nodiscard]] BTPoint from_energy_plane(const EnergyPlanePoint& e,
                                        const PhysicalConstants& c = default_constants());

/// Mean relative Rb-Cs speed sqrt(8 k_B T / (π μ)) in m/s.
[[nodiscard]] double mean_rel_speed(double temperature,
                                    const PhysicalConstants& c = default_constants());

}  // namespace spinprobe
