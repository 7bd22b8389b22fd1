#include "spinprobe/spin_dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "spinprobe/error.hpp"

namespace spinprobe {

double SpinDistribution::sum() const noexcept {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

SpinDistribution SpinDistribution::pure(int m_f) {
  if (m_f < -3 || m_f > 3) throw InvalidArgument("m_F must lie in [-3, 3]");
  SpinDistribution d;
  d.p[level_index(m_f)] = 1.0;
  return d;
}

SpinDistribution SpinDistribution::uniform() {
  SpinDistribution d;
  d.p.fill(1.0 / kLevels);
  return d;
}

void SpinDistribution::validate(double tolerance) const {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("spin population outside [0, 1]: " + std::to_string(v));
    }
  }
  if (std::abs(sum() - 1.0) > tolerance) {
    throw InvalidArgument("spin distribution not normalized (sum = " + std::to_string(sum()) + ")");
  }
}

double l1_distance(const SpinDistribution& a, const SpinDistribution& b) noexcept {
  double d = 0.0;
  for (std::size_t i = 0; i < kLevels; ++i) d += std::abs(a[i] - b[i]);
  return d;
}

double RateGenerator::max_out_rate() const noexcept {
  double r = 0.0;
  for (std::size_t i = 0; i < kLevels; ++i) r = std::max(r, -m[i][i]);
  return r;
}

SpinDistribution RateGenerator::apply(const SpinDistribution& p) const noexcept {
  SpinDistribution out;
  for (std::size_t i = 0; i < kLevels; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min<std::size_t>(i + 1, kLevels - 1);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += m[i][j] * p[j];
    out[i] = s;
  }
  return out;
}

RateGenerator build_generator(const TransitionRates& r) {
  for (std::size_t i = 0; i < 6; ++i) {
    if (!(r.endo[i] >= 0.0) || !(r.exo[i] >= 0.0) || !std::isfinite(r.endo[i]) ||
        !std::isfinite(r.exo[i])) {
      throw InvalidArgument("transition rates must be non-negative and finite");
    }
  }
  RateGenerator g;
  for (std::size_t i = 0; i < 6; ++i) {
    // endo[i]: level i → i+1; exo[i]: level i+1 → i.
    g.m[i + 1][i] += r.endo[i];
    g.m[i][i] -= r.endo[i];
    g.m[i][i + 1] += r.exo[i];
    g.m[i + 1][i + 1] -= r.exo[i];
  }
  return g;
}

namespace {

SpinDistribution axpy(const SpinDistribution& x, double a, const SpinDistribution& y) {
  SpinDistribution out;
  for (std::size_t i = 0; i < kLevels; ++i) out[i] = x[i] + a * y[i];
  return out;
}

struct Stepper {
  const RateGenerator& g;
  double h;

  void step(SpinDistribution& p) const {
    const SpinDistribution k1 = g.apply(p);
    const SpinDistribution k2 = g.apply(axpy(p, 0.5 * h, k1));
    const SpinDistribution k3 = g.apply(axpy(p, 0.5 * h, k2));
    const SpinDistribution k4 = g.apply(axpy(p, h, k3));
    for (std::size_t i = 0; i < kLevels; ++i) {
      p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
};

// Integrates p in place over `duration`; returns the number of steps taken.
long long integrate(SpinDistribution& p, const RateGenerator& g, double duration) {
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("evolution time must be non-negative and finite");
  }
  const double max_rate = g.max_out_rate();
  if (duration == 0.0 || max_rate == 0.0) return 0;
  const double h_nominal = std::min(0.01 / max_rate, duration / 100.0);
  const double n_steps = std::ceil(duration / h_nominal);
  if (n_steps > 1e12) {
    throw StiffnessError("RK4 step underflow: horizon " + std::to_string(duration) +
                         " s needs more than 1e12 steps at max rate " + std::to_string(max_rate));
  }
  const auto n = static_cast<long long>(n_steps);
  const Stepper stepper{g, duration / static_cast<double>(n)};
  for (long long i = 0; i < n; ++i) stepper.step(p);
  return n;
}

EvolveResult finish(SpinDistribution raw, double t, long long steps) {
  EvolveResult r;
  r.time = t;
  r.steps = steps;
  r.normalization_drift = std::abs(raw.sum() - 1.0);
  r.min_population = *std::min_element(raw.p.begin(), raw.p.end());
  for (double& v : raw.p) v = std::max(v, 0.0);
  r.distribution = raw;
  return r;
}

}  // namespace

EvolveResult evolve(const SpinDistribution& p0, const RateGenerator& g, double t) {
  SpinDistribution p = p0;
  const long long steps = integrate(p, g, t);
  return finish(p, t, steps);
}

std::vector<EvolveResult> evolve_trajectory(const SpinDistribution& p0, const RateGenerator& g,
                                            std::span<const double> times) {
  std::vector<EvolveResult> out;
  out.reserve(times.size());
  SpinDistribution p = p0;
  double now = 0.0;
  long long total_steps = 0;
  for (double t : times) {
    if (!(t >= now)) throw InvalidArgument("trajectory times must be non-negative and ascending");
    total_steps += integrate(p, g, t - now);
    now = t;
    out.push_back(finish(p, t, total_steps));
  }
  return out;
}

SpinDistribution steady_state(const TransitionRates& r) {
  for (std::size_t i = 0; i < 6; ++i) {
    if (!(r.endo[i] >= 0.0) || !(r.exo[i] >= 0.0)) {
      throw InvalidArgument("transition rates must be non-negative");
    }
  }
  // Support [lo, hi]: an absent upward (downward) link cuts off the levels above (below).
  std::size_t lo = 0;
  std::size_t hi = kLevels - 1;
  for (std::size_t i = 0; i < 6; ++i) {
    if (r.endo[i] == 0.0 && r.exo[i] == 0.0) {
      throw NumericalError("no unique steady state: levels " + std::to_string(i) + " and " +
                           std::to_string(i + 1) + " are disconnected");
    }
    if (r.endo[i] == 0.0) hi = std::min(hi, i);
    if (r.exo[i] == 0.0) lo = std::max(lo, i + 1);
  }
  if (lo > hi) throw NumericalError("no unique steady state: chain splits into closed classes");

  std::array<double, kLevels> log_w{};
  for (std::size_t i = lo; i < hi; ++i) {
    log_w[i + 1] = log_w[i] + std::log(r.endo[i]) - std::log(r.exo[i]);
  }
  double top = log_w[lo];
  for (std::size_t i = lo; i <= hi; ++i) top = std::max(top, log_w[i]);

  SpinDistribution d;
  double norm = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    d[i] = std::exp(log_w[i] - top);
    norm += d[i];
  }
  for (std::size_t i = lo; i <= hi; ++i) d[i] /= norm;
  return d;
}

SpinDistribution steady_state_nullspace(const RateGenerator& g) {
  // A unique stationary vector exists iff exactly one closed communicating class.
  std::array<std::array<bool, kLevels>, kLevels> reach{};
  for (std::size_t i = 0; i < kLevels; ++i) {
    for (std::size_t j = 0; j < kLevels; ++j) reach[i][j] = i == j || g.m[j][i] > 0.0;
  }
  for (std::size_t k = 0; k < kLevels; ++k) {
    for (std::size_t i = 0; i < kLevels; ++i) {
      for (std::size_t j = 0; j < kLevels; ++j) reach[i][j] = reach[i][j] || (reach[i][k] && reach[k][j]);
    }
  }
  std::size_t closed_classes = 0;
  for (std::size_t i = 0; i < kLevels; ++i) {
    bool closed = true;
    bool first = true;
    for (std::size_t j = 0; j < kLevels; ++j) {
      if (reach[i][j] && !reach[j][i]) closed = false;
      if (reach[i][j] && reach[j][i] && j < i) first = false;
    }
    if (closed && first) ++closed_classes;
  }
  if (closed_classes != 1) {
    throw NumericalError("generator has " + std::to_string(closed_classes) +
                         " closed classes; expected a single stationary vector");
  }

  using Matrix = Eigen::Matrix<double, kLevels, kLevels>;
  using Vector = Eigen::Matrix<double, kLevels, 1>;
  Matrix a;
  for (std::size_t i = 0; i < kLevels; ++i) {
    for (std::size_t j = 0; j < kLevels; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g.m[i][j];
    }
  }
  a.row(kLevels - 1).setOnes();
  const Eigen::PartialPivLU<Matrix> lu(a);
  Vector rhs = Vector::Zero();
  rhs(kLevels - 1) = 1.0;
  Vector x = lu.solve(rhs);

  // The assembled diagonal absorbs small rates into large ones, so the plain
  // solve is only as good as the generator's conditioning. Refining against a
  // residual built from pairwise fluxes (off-diagonal rates only) recovers
  // full precision.
  for (int iter = 0; iter < 20; ++iter) {
    Vector residual;
    double total = 0.0;
    for (std::size_t i = 0; i < kLevels; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      double net = 0.0;
      for (std::size_t j = 0; j < kLevels; ++j) {
        if (j != i) net += g.m[i][j] * x(static_cast<Eigen::Index>(j)) - g.m[j][i] * x(ii);
      }
      residual(ii) = -net;
      total += x(ii);
    }
    residual(kLevels - 1) = 1.0 - total;
    const Vector dx = lu.solve(residual);
    x += dx;
    if (!(dx.cwiseAbs().sum() > 1e-17)) break;
  }

  SpinDistribution d;
  for (std::size_t i = 0; i < kLevels; ++i) {
    const double v = x(static_cast<Eigen::Index>(i));
    if (v < -1e-12 || !std::isfinite(v)) {
      throw NumericalError("null-space solution has a negative population: " + std::to_string(v));
    }
    d[i] = std::max(v, 0.0);
  }
  return d;
}

}  // namespace spinprobe
