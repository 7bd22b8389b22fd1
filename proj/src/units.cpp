#include "spinprobe/units.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spinprobe/error.hpp"

namespace spinprobe {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be positive and finite, got " +
                          std::to_string(v));
  }
}

}  // namespace

void PhysicalConstants::validate() const {
  require_positive(bohr_magneton, "bohr_magneton");
  require_positive(boltzmann, "boltzmann");
  require_positive(mass_rb, "mass_rb");
  require_positive(mass_cs, "mass_cs");
  require_positive(g_cs, "g_cs");
  require_positive(g_rb, "g_rb");
  if (g_rb != 2.0 * g_cs) {
    throw InvalidArgument("g_rb must equal 2 * g_cs");
  }
  if (f_cs <= 0 || f_rb <= 0) {
    throw InvalidArgument("hyperfine quantum numbers must be positive");
  }
}

const PhysicalConstants& default_constants() noexcept {
  static const PhysicalConstants constants{};
  return constants;
}

double zeeman_gap(double b_field_gauss, const PhysicalConstants& c) {
  if (!(b_field_gauss >= 0.0) || !std::isfinite(b_field_gauss)) {
    throw InvalidArgument("magnetic field must be non-negative, got " +
                          std::to_string(b_field_gauss));
  }
  return c.bohr_magneton * c.g_cs * b_field_gauss * kTeslaPerGauss;
}

double zeeman_energy_kelvin(double b_field_gauss, const PhysicalConstants& c) {
  return zeeman_gap(b_field_gauss, c) / c.boltzmann;
}

double field_for_zeeman_energy(double e_zeeman_kelvin, const PhysicalConstants& c) {
  if (!(e_zeeman_kelvin >= 0.0)) {
    throw InvalidArgument("Zeeman energy must be non-negative");
  }
  return e_zeeman_kelvin * c.boltzmann / (c.bohr_magneton * c.g_cs) / kTeslaPerGauss;
}

EnergyPoint to_energy_point(const BTPoint& p, const PhysicalConstants& c) {
  require_positive(p.temperature, "temperature");
  if (!(p.b_field > 0.0)) {
    throw InvalidArgument("energy ratio undefined for non-positive magnetic field");
  }
  const double e_th = p.temperature;
  const double e_z = zeeman_energy_kelvin(p.b_field, c);
  return {e_th + e_z, e_th / e_z};
}

BTPoint from_energy_point(const EnergyPoint& e, const PhysicalConstants& c) {
  require_positive(e.e_total, "e_total");
  require_positive(e.e_ratio, "e_ratio");
  const double e_z = e.e_total / (1.0 + e.e_ratio);
  const double e_th = e.e_total * e.e_ratio / (1.0 + e.e_ratio);
  return {field_for_zeeman_energy(e_z, c), e_th};
}

EnergyPlanePoint to_energy_plane(const BTPoint& p, const PhysicalConstants& c) {
  return {p.temperature, zeeman_energy_kelvin(p.b_field, c)};
}

BTPoint from_energy_plane(const EnergyPlanePoint& e, const PhysicalConstants& c) {
  require_positive(e.thermal, "thermal energy");
  if (!(e.zeeman >= 0.0)) {
    throw InvalidArgument("Zeeman energy must be non-negative");
  }
  return {field_for_zeeman_energy(e.zeeman, c), e.thermal};
}

double mean_rel_speed(double temperature, const PhysicalConstants& c) {
  require_positive(temperature, "temperature");
  return std::sqrt(8.0 * c.boltzmann * temperature / (std::numbers::pi * c.reduced_mass()));
}

}  // namespace spinprobe
