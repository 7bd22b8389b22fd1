#include "spinprobe/endo_fraction.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spinprobe/peak.hpp"

namespace spinprobe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double threshold_in_kt(const BTPoint& p, const PhysicalConstants& c) {
  if (!(p.temperature > 0.0) || !std::isfinite(p.temperature)) {
    throw InvalidArgument("endoergic fraction needs T > 0, got " + std::to_string(p.temperature));
  }
  return zeeman_gap(p.b_field, c) / (c.boltzmann * p.temperature);
}

void require_ascending(std::span<const double> grid, const char* who) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
      throw InvalidArgument(std::string(who) + ": energy ratios must be positive and finite");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InvalidArgument(std::string(who) + ": grid must be strictly ascending");
    }
  }
}

}  // namespace

double mb_tail_fraction(double threshold) {
  if (!(threshold >= 0.0)) {
    throw InvalidArgument("threshold must be non-negative");
  }
  if (threshold == kInf) return 0.0;
  const double root = std::sqrt(threshold);
  return std::erfc(root) + 2.0 * std::sqrt(threshold / std::numbers::pi) * std::exp(-threshold);
}

double mb_energy_density(double u) {
  if (u <= 0.0) return 0.0;
  return 2.0 * std::sqrt(u / std::numbers::pi) * std::exp(-u);
}

double endo_fraction(const BTPoint& p, const PhysicalConstants& c) {
  return mb_tail_fraction(threshold_in_kt(p, c));
}

double endo_fraction_quadrature(const BTPoint& p, const PhysicalConstants& c) {
  const double a = threshold_in_kt(p, c);
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(mb_energy_density, a, kInf, 20, 1e-12);
}

double fraction_of_ratio(double e_ratio) {
  if (!(e_ratio > 0.0)) {
    throw InvalidArgument("energy ratio must be positive, got " + std::to_string(e_ratio));
  }
  return mb_tail_fraction(1.0 / e_ratio);
}

double ratio_of_fraction(double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  double lo = 1e-4;
  double hi = 1e4;
  while (fraction_of_ratio(lo) >= fraction) {
    lo /= 10.0;
    if (lo < 1e-300) throw NumericalError("ratio_of_fraction: lower bracket underflow");
  }
  while (fraction_of_ratio(hi) <= fraction) {
    hi *= 10.0;
    if (hi > 1e300) throw NumericalError("ratio_of_fraction: fraction too close to 1");
  }
  for (int i = 0; i < 2000 && hi - lo > 1e-10; ++i) {
    // Geometric midpoint until the bracket is within a factor of two.
    const double mid = (hi > 2.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fraction_of_ratio(mid) < fraction) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

FractionCurve make_fraction_curve(std::span<const double> e_ratio_grid) {
  require_ascending(e_ratio_grid, "make_fraction_curve");
  FractionCurve curve;
  curve.e_ratio_grid.assign(e_ratio_grid.begin(), e_ratio_grid.end());
  curve.values.reserve(e_ratio_grid.size());
  for (double x : e_ratio_grid) curve.values.push_back(fraction_of_ratio(x));
  return curve;
}

FractionDerivatives fraction_derivatives(std::span<const double> e_ratio_grid) {
  if (e_ratio_grid.size() < 100) {
    throw InvalidArgument("fraction_derivatives: grid needs at least 100 points, got " +
                          std::to_string(e_ratio_grid.size()));
  }
  require_ascending(e_ratio_grid, "fraction_derivatives");

  FractionDerivatives out;
  out.e_ratio_grid.assign(e_ratio_grid.begin(), e_ratio_grid.end());
  const std::size_t n = e_ratio_grid.size();
  out.value.resize(n);
  out.first.resize(n);
  out.second.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = e_ratio_grid[i];
    const double h = 1e-5 * x;
    const double fm = fraction_of_ratio(x - h);
    const double f0 = fraction_of_ratio(x);
    const double fp = fraction_of_ratio(x + h);
    out.value[i] = f0;
    out.first[i] = (fp - fm) / (2.0 * h);
    out.second[i] = (fp - 2.0 * f0 + fm) / (h * h);
  }
  out.first_argmax = refined_argmax(out.e_ratio_grid, out.first).x;
  out.second_argmax = refined_argmax(out.e_ratio_grid, out.second).x;
  return out;
}

double FitParams::operator()(double x) const {
  return a / (1.0 - b * std::exp(c * std::pow(x, d)));
}

double fit_rms(const FitParams& f, std::span<const double> grid) {
  if (grid.empty()) throw InvalidArgument("fit_rms: empty grid");
  double sum = 0.0;
  for (double x : grid) {
    const double r = f(x) - fraction_of_ratio(x);
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(grid.size()));
}

namespace {

using Vec4 = Eigen::Vector4d;

FitParams from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

// Sum of squared residuals, or +inf when the model hits a pole on the grid.
double cost(const Vec4& q, std::span<const double> xs, std::span<const double> target) {
  const FitParams f = from_vec(q);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = f(xs[i]) - target[i];
    if (!std::isfinite(r)) return kInf;
    sum += r * r;
  }
  return sum;
}

}  // namespace

FitResult fit_fraction(std::span<const double> e_ratio_grid, int max_iterations,
                       std::optional<FitParams> initial) {
  require_ascending(e_ratio_grid, "fit_fraction");
  if (e_ratio_grid.size() < 8 || e_ratio_grid.front() > 0.1 || e_ratio_grid.back() < 2.5) {
    throw InvalidArgument("fit_fraction: grid must span at least [0.1, 2.5]");
  }
  if (max_iterations <= 0) throw InvalidArgument("fit_fraction: max_iterations must be positive");

  const std::size_t n = e_ratio_grid.size();
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = fraction_of_ratio(e_ratio_grid[i]);

  const FitParams start = initial.value_or(published_fit_params());
  Vec4 q{start.a, start.b, start.c, start.d};
  double current = cost(q, e_ratio_grid, target);
  if (!std::isfinite(current)) {
    throw InvalidArgument("fit_fraction: initial parameters have a pole on the grid");
  }

  auto result_for = [&](const Vec4& v, double sse, int iters) {
    return FitResult{from_vec(v), std::sqrt(sse / static_cast<double>(n)), iters};
  };

  double lambda = 1e-3;
  Eigen::MatrixXd jac(n, 4);
  Eigen::VectorXd res(n);
  for (int iter = 1; iter <= max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = e_ratio_grid[i];
      const double xd = std::pow(x, q[3]);
      const double e = std::exp(q[2] * xd);
      const double den = 1.0 - q[1] * e;
      const double g = q[0] * q[1] * e / (den * den);
      res[static_cast<Eigen::Index>(i)] = q[0] / den - target[i];
      jac.row(static_cast<Eigen::Index>(i)) << 1.0 / den, q[0] * e / (den * den), g * xd,
          g * q[2] * xd * std::log(x);
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Vec4 grad = jac.transpose() * res;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-15) {
      return result_for(q, current, iter);
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      Eigen::Matrix4d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal();
      const Vec4 step = damped.ldlt().solve(-grad);
      const Vec4 trial = q + step;
      const double trial_cost = cost(trial, e_ratio_grid, target);
      if (trial_cost < current) {
        const double gain = (current - trial_cost) / current;
        const double step_size = step.norm() / (q.norm() + 1e-12);
        q = trial;
        current = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (gain < 1e-12 || step_size < 1e-12) {
          return result_for(q, current, iter);
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) {
      // No damping level reduces the cost: a (local) minimum to working precision.
      return result_for(q, current, iter);
    }
  }
  throw FitNotConverged(result_for(q, current, max_iterations),
                        "fit_fraction: no convergence after " + std::to_string(max_iterations) +
                            " iterations");
}

}  // namespace spinprobe
