#pragma once

// Fraction of thermal collisions with enough kinetic energy to pay the Zeeman
// cost of an endoergic spin exchange, as a function of (B, T) or of the energy
// ratio E_th / E_Z alone.

#include <optional>
#include <span>
#include <vector>

#include "spinprobe/error.hpp"
#include "spinprobe/units.hpp"

namespace spinprobe {

/// Tail of the 3D Maxwell-Boltzmann collision-energy distribution above
/// `threshold` (in units of k_B T): erfc(√a) + 2√(a/π) e^(−a).
[[nodiscard]] double mb_tail_fraction(double threshold);

/// Maxwell-Boltzmann density of collision energies in units of k_B T,
/// 2 √(u/π) e^(−u). Integrates to one over [0, ∞).
[[nodiscard]] double mb_energy_density(double u);

/// Closed-form endoergic fraction p(B, T).
[[nodiscard]] double endo_fraction(const BTPoint& p,
                                   const PhysicalConstants& c = default_constants());

/// Same quantity by adaptive quadrature of the Maxwell-Boltzmann density over
/// [ΔE/2, ∞). Independent route used to validate the closed form.
[[nodiscard]] double endo_fraction_quadrature(const BTPoint& p,
                                              const PhysicalConstants& c = default_constants());

/// p as a function of the energy ratio; p(B, T) == fraction_of_ratio(E_th / E_Z).
[[nodiscard]] double fraction_of_ratio(double e_ratio);

/// Inverse of fraction_of_ratio by bisection (tolerance 1e-10 in E_ratio).
[[nodiscard]] double ratio_of_fraction(double fraction);

struct FractionCurve {
  std::vector<double> e_ratio_grid;
  std::vector<double> values;
};

[[nodiscard]] FractionCurve make_fraction_curve(std::span<const double> e_ratio_grid);

struct FractionDerivatives {
  std::vector<double> e_ratio_grid;
  std::vector<double> value;
  std::vector<double> first;
  std::vector<double> second;
  double first_argmax = 0.0;   // parabolically refined
  double second_argmax = 0.0;
};

/// Central differences of fraction_of_ratio with step 1e-5·x. The grid must be
/// strictly ascending, positive, and hold at least 100 points.
[[nodiscard]] FractionDerivatives fraction_derivatives(std::span<const double> e_ratio_grid);

/// f(x) = a / (1 − b·exp(c·x^d)).
struct FitParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  [[nodiscard]] double operator()(double x) const;
};

/// Parameters printed with the published endoergic-fraction figure.
[[nodiscard]] constexpr FitParams published_fit_params() { return {-1.29, 2.29, 0.35, -1.43}; }

struct FitResult {
  FitParams params;
  double residual_rms = 0.0;
  int iterations = 0;
};

/// Thrown when the fit exhausts its iteration budget; carries the best point seen.
class FitNotConverged : public Error {
 public:
  FitNotConverged(FitResult best, const std::string& what) : Error(what), best_(best) {}
  [[nodiscard]] const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Levenberg-Marquardt least squares of FitParams against fraction_of_ratio
/// on `e_ratio_grid` (must cover [0.1, 2.5]), starting from the published values.
[[nodiscard]] FitResult fit_fraction(std::span<const double> e_ratio_grid,
                                     int max_iterations = 200,
                                     std::optional<FitParams> initial = std::nullopt);

/// RMS of (f − fraction_of_ratio) over `grid`.
[[nodiscard]] double fit_rms(const FitParams& f, std::span<const double> grid);

}  // namespace spinprobe
