// One PASS/FAIL line per acceptance criterion, with the measured quantity,
// the pinned tolerance and the wall time. Exit status is non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spinprobe/commands.hpp"
#include "spinprobe/endo_fraction.hpp"
#include "spinprobe/maxima_scan.hpp"

using namespace spinprobe;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a * std::pow(b / a, double(i) / (n - 1));
  return v;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

TransitionRates random_rates(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  TransitionRates r;
  for (auto& v : r.endo) v = std::exp(u(rng));
  for (auto& v : r.exo) v = std::exp(u(rng));
  return r;
}

const BTPoint kRef{0.043, 435e-9};

Outcome c1_closed_vs_quadrature() {
  Outcome o;
  double worst = 0.0;
  for (double b : logspace(1e-3, 0.1, 20)) {
    for (double t : logspace(50e-9, 1000e-9, 20)) {
      worst = std::max(worst, std::abs(endo_fraction({b, t}) - endo_fraction_quadrature({b, t})));
    }
  }
  o.check(worst < 1e-8, "max |closed - quadrature| over 20x20 grid = " + fmt(worst) + " (< 1e-8)");
  return o;
}

Outcome c2_published_fit() {
  Outcome o;
  const FitParams f = published_fit_params();
  double worst = 0.0;
  for (double x : linspace(0.2, 2.0, 1801)) worst = std::max(worst, std::abs(f(x) - fraction_of_ratio(x)));
  o.check(worst < 0.01, "max |f - p| on [0.2, 2.0] = " + fmt(worst) + " (< 0.01)");
  o.check(std::abs(f(0.6) - 0.345) < 5e-4 + 1e-3,
          "f(0.6) = " + fmt(f(0.6)) + " vs 0.345, p(0.6) = " + fmt(fraction_of_ratio(0.6)));
  o.check(std::abs(f(1.0) - 0.573) < 5e-4 + 1e-3,
          "f(1.0) = " + fmt(f(1.0)) + " vs 0.573, p(1.0) = " + fmt(fraction_of_ratio(1.0)));
  return o;
}

Outcome c3_steady_state() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  double worst_methods = 0.0;
  for (int k = 0; k < 100; ++k) {
    const TransitionRates r = random_rates(rng, 1e-3, 1e3);
    worst_methods = std::max(worst_methods, l1_distance(steady_state(r), steady_state_nullspace(build_generator(r))));
  }
  o.check(worst_methods < 1e-10, "product form vs null space, 100 random chains: max L1 = " +
                                     fmt(worst_methods) + " (< 1e-10)");
  double worst_rk4 = 0.0;
  for (int k = 0; k < 100; ++k) {
    const TransitionRates r = random_rates(rng, 0.5, 2.0);
    double slowest = r.endo[0];
    for (std::size_t i = 0; i < 6; ++i) slowest = std::min({slowest, r.endo[i], r.exo[i]});
    const EvolveResult e = evolve(SpinDistribution::pure(2), build_generator(r), 100.0 / slowest);
    worst_rk4 = std::max(worst_rk4, l1_distance(e.distribution, steady_state(r)));
  }
  o.check(worst_rk4 < 1e-6, "RK4 at t = 100/min(rate) vs steady state, 100 chains: max L1 = " +
                                fmt(worst_rk4) + " (< 1e-6)");
  return o;
}

Outcome c4_conservation() {
  Outcome o;
  std::mt19937_64 rng(4);
  double worst = 0.0;
  std::vector<TransitionRates> chains{
      compute_rates(default_cross_sections(), kRef, ConstantOverlap{1e18})};
  for (int k = 0; k < 20; ++k) chains.push_back(random_rates(rng, 0.05, 20.0));
  for (const TransitionRates& r : chains) {
    const RateGenerator g = build_generator(r);
    double slowest = r.max_rate();
    for (std::size_t i = 0; i < 6; ++i) slowest = std::min({slowest, r.endo[i], r.exo[i]});
    const auto times = linspace(0.0, 50.0 / slowest, 200);
    for (const auto& e : evolve_trajectory(SpinDistribution::pure(2), g, times)) {
      worst = std::max(worst, e.normalization_drift);
    }
  }
  o.check(worst < 1e-9, "max |sum P - 1| over 21 trajectories x 200 samples = " + fmt(worst) + " (< 1e-9)");
  return o;
}

Outcome c5_fisher_oracles() {
  Outcome o;
  auto bernoulli = [](double theta) {
    SpinDistribution d;
    d[0] = theta;
    d[1] = 1.0 - theta;
    return d;
  };
  const double theta = 0.5;
  for (double sign : {1.0, -1.0}) {
    const double s = one_sided_speed(bernoulli, theta, sign * 1e-3 * theta);
    const double f = 8.0 * s * s;
    o.check(std::abs(f - 4.0) / 4.0 < 0.01,
            std::string("Bernoulli ") + (sign > 0 ? "right" : "left") + ": F = " + fmt(f, 6) + " vs 4 (1%)");
  }

  const ProbeModel m;
  const SpinDistribution p0 = probe_distribution(m, kRef);
  for (Axis a : kAllAxes) {
    const double h = 1e-5;
    const auto pp = probe_distribution(m, displaced_point(kRef, a, h, m.constants));
    const auto pm = probe_distribution(m, displaced_point(kRef, a, -h, m.constants));
    SpinDistribution dp;
    double total = 0.0;
    for (std::size_t i = 0; i < kLevels; ++i) total += (dp[i] = (pp[i] - pm[i]) / (2 * h));
    dp[0] -= total;
    const double direct = fisher_direct(p0, dp);
    const SensitivityResult r = sensitivity(m, kRef, a);
    const std::string name(to_string(a));
    if (direct < 1e-12) {
      // Along constant E_ratio the steady state does not move at all.
      o.check(r.fisher_left() < 1e-12 && r.fisher_right() < 1e-12,
              "7-state " + name + ": direct F = " + fmt(direct) + ", speed F = " + fmt(r.fisher_right()) +
                  " (both zero)");
      continue;
    }
    const double dl = std::abs(r.fisher_left() - direct) / direct;
    const double dr = std::abs(r.fisher_right() - direct) / direct;
    o.check(dl < 0.01 && dr < 0.01, "7-state " + name + ": direct F = " + fmt(direct, 6) +
                                        ", left " + fmt(r.fisher_left(), 6) + ", right " +
                                        fmt(r.fisher_right(), 6) + " (1%)");
  }
  return o;
}

Outcome c6_axis_ordering() {
  Outcome o;
  const ProbeModel m;
  auto sf = [&](Axis a) {
    const SensitivityResult r = sensitivity(m, kRef, a);
    return std::min(r.sqrt_fisher_left(), r.sqrt_fisher_right());
  };
  const double etot = sf(Axis::const_Etot_vary_ratio);
  const double b = sf(Axis::const_B_vary_T);
  const double t = sf(Axis::const_T_vary_B);
  const double ratio = std::max(sensitivity(m, kRef, Axis::const_ratio_vary_Etot).sqrt_fisher_left(),
                                sensitivity(m, kRef, Axis::const_ratio_vary_Etot).sqrt_fisher_right());
  o.check(etot > b, "sqrtF(const E_tot) = " + fmt(etot) + " > sqrtF(const B) = " + fmt(b));
  o.check(t > ratio, "sqrtF(const T) = " + fmt(t) + " > sqrtF(const ratio) = " + fmt(ratio));
  return o;
}

Outcome c7_maxima_alignment() {
  Outcome o;
  const ProbeModel m;
  const auto grid = linspace(0.1, 2.0, 381);
  const double bracket = 0.1;
  std::vector<MaximaReport> reports;
  for (double e_uK : {0.7, 1.1, 1.3, 1.6, 1.91, 2.2}) reports.push_back(locate_maxima(m, e_uK * 1e-6, grid));
  for (const MaximaReport& r : reports) {
    const std::string tag = "E_tot " + fmt(r.e_tot * 1e6, 3) + " uK: ";
    o.check(r.left_interior && r.right_interior, tag + "interior maxima (left x = " +
                                                     fmt(r.ratio_at_left_max) + ", right x = " +
                                                     fmt(r.ratio_at_right_max) + ")");
    o.check(r.deviation_left_d1 < bracket, tag + "|left max - p' max| = " + fmt(r.deviation_left_d1) +
                                               " (< 0.1; p' max at " + fmt(r.ratio_at_d1_max) + ")");
    o.check(r.deviation_right_d2 < bracket, tag + "|right max - p'' max| = " + fmt(r.deviation_right_d2) +
                                                " (< 0.1; p'' max at " + fmt(r.ratio_at_d2_max) + ")");
    o.check(r.fraction_at_left_max >= 0.10 && r.fraction_at_left_max <= 0.25,
            tag + "left-max fraction = " + fmt(r.fraction_at_left_max) + " (in [0.10, 0.25])");
  }
  bool universal = true;
  for (const MaximaReport& r : reports) {
    universal = universal && r.ratio_at_d1_max == reports.front().ratio_at_d1_max &&
                r.ratio_at_d2_max == reports.front().ratio_at_d2_max;
  }
  o.check(universal, "derivative argmaxes identical across all six E_tot");
  return o;
}

Outcome c8_rate_scaling() {
  Outcome o;
  ProbeModel a;
  ProbeModel b;
  b.cross_sections = default_cross_sections(1e-16 * 1e3);
  double worst_l1 = 0.0;
  double worst_rel = 0.0;
  double worst_floor = 0.0;
  for (double bf : linspace(0.01, 0.08, 5)) {
    for (double t : linspace(200e-9, 1000e-9, 5)) {
      const BTPoint p{bf, t};
      worst_l1 = std::max(worst_l1, l1_distance(probe_distribution(a, p), probe_distribution(b, p)));
      std::vector<double> xs, ys;
      for (Axis axis : kAllAxes) {
        const SensitivityResult x = sensitivity(a, p, axis);
        const SensitivityResult y = sensitivity(b, p, axis);
        xs.insert(xs.end(), {x.sqrt_fisher_left(), x.sqrt_fisher_right()});
        ys.insert(ys.end(), {y.sqrt_fisher_left(), y.sqrt_fisher_right()});
      }
      // Values at the round-off floor (the constant-ratio axis) carry no
      // relative precision; compare them on the scale of the largest √F.
      const double floor = 1e-9 * *std::max_element(xs.begin(), xs.end());
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double big = std::max(std::abs(xs[i]), std::abs(ys[i]));
        if (big < floor) {
          worst_floor = std::max(worst_floor, big / floor);
          continue;
        }
        worst_rel = std::max(worst_rel, std::abs(xs[i] - ys[i]) / big);
      }
    }
  }
  o.check(worst_l1 < 1e-12, "steady states, rates x1e3, 5x5 grid: max L1 = " + fmt(worst_l1) + " (< 1e-12)");
  o.check(worst_rel < 1e-9, "sqrtF above the floor: max relative change = " + fmt(worst_rel) + " (< 1e-9)");
  o.check(worst_floor < 1.0, "sqrtF below 1e-9 x the largest axis stays below it in both runs (max " +
                                 fmt(worst_floor) + " of the floor)");
  return o;
}

Outcome c9_limits() {
  Outcome o;
  const ProbeModel m;
  const SensitivityProfile p =
      sensitivity_profile(m, Axis::const_B_vary_T, 0.043, logspace(20e-9, 20e-6, 200));
  for (const auto* side : {&p.sqrt_f_left, &p.sqrt_f_right}) {
    const double top = *std::max_element(side->begin(), side->end());
    const double lo = side->front() / top;
    const double hi = side->back() / top;
    o.check(lo < 0.05 && hi < 0.05, std::string(side == &p.sqrt_f_left ? "left" : "right") +
                                        " constant-B profile ends / max: " + fmt(lo) + " at 20 nK, " +
                                        fmt(hi) + " at 20 uK (< 0.05)");
  }
  double worst_zero_field = 0.0;
  for (double t : logspace(1e-9, 1e-5, 20)) worst_zero_field = std::max(worst_zero_field, std::abs(endo_fraction({0.0, t}) - 1.0));
  o.check(worst_zero_field == 0.0, "p(0, T) = 1 for T in [1 nK, 10 uK] (max deviation " + fmt(worst_zero_field) + ")");
  const double frozen = endo_fraction({0.043, 4e-9});
  o.check(frozen < 1e-12, "p(43 mG, 4 nK) = " + fmt(frozen) + " (< 1e-12)");
  return o;
}

Outcome c10_determinism() {
  Outcome o;
  const RunConfig config = parse_config(nlohmann::json{{"reference", {{"b_field_mG", 43}, {"temperature_nK", 435}}}});
  for (std::string_view name : command_names()) {
    bool same = true;
    for (OutputFormat f : {OutputFormat::csv, OutputFormat::json}) {
      const CommandOutput first = run_command(name, config);
      std::istringstream in(render_envelope(first, config, f, utc_timestamp()));
      const Envelope env = read_envelope(in);
      const CommandOutput again = run_command(env.command, parse_config(env.config), 1);
      same = same && render_payload(again, env.format) == env.payload;
    }
    o.check(same, std::string(name) + ": rerun from embedded config is byte-identical (csv, json)");
  }
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double limit_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "closed-form vs quadrature endoergic fraction", 5.0, c1_closed_vs_quadrature},
      {2, "published fit-function reproduction", 1.0, c2_published_fit},
      {3, "steady-state two-method agreement and RK4 convergence", 10.0, c3_steady_state},
      {4, "probability conservation during evolution", 0.0, c4_conservation},
      {5, "Fisher oracle agreement", 0.0, c5_fisher_oracles},
      {6, "axis ordering at the reference point", 0.0, c6_axis_ordering},
      {7, "maxima / inflection alignment", 60.0, c7_maxima_alignment},
      {8, "rate-scale invariance", 0.0, c8_rate_scaling},
      {9, "limits", 0.0, c9_limits},
      {10, "determinism", 0.0, c10_determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt(secs, 3) + " s";
    if (c.limit_s > 0) {
      const bool fast = secs < c.limit_s;
      timing += fast ? " < " : " >= ";
      timing += fmt(c.limit_s, 3) + " s";
      o.pass = o.pass && fast;
    }
    std::printf("%s  [%d] %s (%s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, timing.c_str());
    for (const auto& line : o.lines) std::printf("        %s\n", line.c_str());
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
