#include "spinprobe/collision_rates.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "spinprobe/endo_fraction.hpp"
#include "spinprobe/error.hpp"

namespace spinprobe {

const char* to_string(Direction d) noexcept { return d == Direction::endo ? "endo" : "exo"; }

double SampledCrossSection::operator()(double e) const {
  if (e <= energy.front()) return area.front();
  if (e >= energy.back()) return area.back();
  const auto it = std::upper_bound(energy.begin(), energy.end(), e);
  const auto hi = static_cast<std::size_t>(it - energy.begin());
  const std::size_t lo = hi - 1;
  const double t = (e - energy[lo]) / (energy[hi] - energy[lo]);
  return area[lo] + t * (area[hi] - area[lo]);
}

void SampledCrossSection::validate() const {
  if (energy.empty()) throw InvalidArgument("sampled cross section is empty");
  if (energy.size() != area.size()) {
    throw InvalidArgument("sampled cross section: energy/area length mismatch");
  }
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (!(energy[i] >= 0.0) || !std::isfinite(energy[i])) {
      throw InvalidArgument("sampled cross section: energies must be non-negative");
    }
    if (!(area[i] >= 0.0) || !std::isfinite(area[i])) {
      throw InvalidArgument("sampled cross section: areas must be non-negative");
    }
    if (i > 0 && !(energy[i] > energy[i - 1])) {
      throw InvalidArgument("sampled cross section: energies must be strictly ascending");
    }
  }
}

namespace {

void validate_entry(const CrossSection& entry) {
  if (const auto* constant = std::get_if<double>(&entry)) {
    if (!(*constant >= 0.0) || !std::isfinite(*constant)) {
      throw InvalidArgument("cross section must be non-negative");
    }
  } else {
    std::get<SampledCrossSection>(entry).validate();
  }
}

std::string transition_name(int m_from, Direction d) {
  const int m_to = d == Direction::endo ? m_from + 1 : m_from - 1;
  return std::string(to_string(d)) + " " + std::to_string(m_from) + "->" + std::to_string(m_to);
}

}  // namespace

CrossSectionTable::CrossSectionTable() = default;

std::size_t CrossSectionTable::slot(int m_from, Direction d) {
  if (m_from < min_m_from(d) || m_from > max_m_from(d)) {
    throw InvalidArgument("no " + std::string(to_string(d)) + " transition starts at m_F = " +
                          std::to_string(m_from));
  }
  return static_cast<std::size_t>(m_from - min_m_from(d)) + (d == Direction::endo ? 0 : 6);
}

void CrossSectionTable::set(int m_from, Direction d, CrossSection entry) {
  validate_entry(entry);
  entries_[slot(m_from, d)] = std::move(entry);
}

bool CrossSectionTable::has(int m_from, Direction d) const {
  return entries_[slot(m_from, d)].has_value();
}

const CrossSection& CrossSectionTable::at(int m_from, Direction d) const {
  const auto& e = entries_[slot(m_from, d)];
  if (!e) throw InvalidArgument("missing cross section for " + transition_name(m_from, d));
  return *e;
}

void CrossSectionTable::require_complete() const {
  for (Direction d : {Direction::endo, Direction::exo}) {
    for (int m = min_m_from(d); m <= max_m_from(d); ++m) {
      if (!has(m, d)) throw FormatError("cross-section table lacks " + transition_name(m, d));
    }
  }
}

CrossSectionTable CrossSectionTable::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("scale factor must be positive");
  CrossSectionTable out = *this;
  for (auto& e : out.entries_) {
    if (!e) continue;
    if (auto* constant = std::get_if<double>(&*e)) {
      *constant *= factor;
    } else {
      for (double& a : std::get<SampledCrossSection>(*e).area) a *= factor;
    }
  }
  return out;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, int line_no, const char* column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw FormatError("line " + std::to_string(line_no) + ": bad " + column + " '" + text + "'");
  }
  return v;
}

}  // namespace

CrossSectionTable read_cross_sections(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool have_header = false;

  struct Pending {
    std::optional<double> constant;
    SampledCrossSection curve;
  };
  std::map<std::pair<int, Direction>, Pending> pending;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    if (!have_header) {
      if (stripped != "m_from,direction,energy_uK,sigma_m2") {
        throw FormatError("line " + std::to_string(line_no) +
                          ": expected header 'm_from,direction,energy_uK,sigma_m2'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_csv_line(stripped);
    if (fields.size() != 4) {
      throw FormatError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    }
    const double m_value = parse_number(fields[0], line_no, "m_from");
    if (m_value != std::floor(m_value)) {
      throw FormatError("line " + std::to_string(line_no) + ": m_from must be an integer");
    }
    const int m_from = static_cast<int>(m_value);
    Direction dir;
    if (fields[1] == "endo") {
      dir = Direction::endo;
    } else if (fields[1] == "exo") {
      dir = Direction::exo;
    } else {
      throw FormatError("line " + std::to_string(line_no) + ": direction must be endo or exo");
    }
    if (m_from < min_m_from(dir) || m_from > max_m_from(dir)) {
      throw FormatError("line " + std::to_string(line_no) + ": no " + to_string(dir) +
                        " transition from m_F = " + std::to_string(m_from));
    }
    const double sigma = parse_number(fields[3], line_no, "sigma_m2");
    if (!(sigma >= 0.0)) {
      throw FormatError("line " + std::to_string(line_no) + ": sigma_m2 must be non-negative");
    }

    Pending& p = pending[{m_from, dir}];
    const std::string where = "line " + std::to_string(line_no) + ": " + transition_name(m_from, dir);
    if (fields[2].empty()) {
      if (p.constant || !p.curve.energy.empty()) {
        throw FormatError(where + " defined more than once");
      }
      p.constant = sigma;
    } else {
      if (p.constant) throw FormatError(where + " mixes constant and sampled entries");
      const double e_uk = parse_number(fields[2], line_no, "energy_uK");
      if (!p.curve.energy.empty() && !(e_uk * 1e-6 > p.curve.energy.back())) {
        throw FormatError(where + " energies must be strictly ascending");
      }
      p.curve.energy.push_back(e_uk * 1e-6);
      p.curve.area.push_back(sigma);
    }
  }
  if (!have_header) throw FormatError("cross-section file has no header");

  CrossSectionTable table;
  for (auto& [key, p] : pending) {
    if (p.constant) {
      table.set(key.first, key.second, *p.constant);
    } else {
      table.set(key.first, key.second, std::move(p.curve));
    }
  }
  table.require_complete();
  return table;
}

CrossSectionTable load_cross_sections(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open cross-section file " + path.string());
  try {
    return read_cross_sections(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

CrossSectionTable default_cross_sections(double scale_m2) {
  if (!(scale_m2 > 0.0)) throw InvalidArgument("cross-section scale must be positive");
  CrossSectionTable table;
  for (Direction d : {Direction::endo, Direction::exo}) {
    for (int m = min_m_from(d); m <= max_m_from(d); ++m) table.set(m, d, scale_m2);
  }
  return table;
}

double density_overlap(const CloudGeometry& g) {
  if (const auto* constant = std::get_if<ConstantOverlap>(&g)) {
    if (!(constant->density >= 0.0) || !std::isfinite(constant->density)) {
      throw InvalidArgument("overlap density must be non-negative");
    }
    return constant->density;
  }
  const auto& clouds = std::get<GaussianClouds>(g);
  if (!(clouds.rb_peak_density >= 0.0)) throw InvalidArgument("Rb peak density must be non-negative");
  double overlap = clouds.rb_peak_density;
  for (std::size_t i = 0; i < 3; ++i) {
    const double s_rb = clouds.rb_widths[i];
    const double s_cs = clouds.cs_widths[i];
    if (!(s_rb > 0.0) || !(s_cs > 0.0) || !std::isfinite(s_rb) || !std::isfinite(s_cs)) {
      throw InvalidArgument("cloud widths must be positive and finite");
    }
    // ∫ N(x; x0, s_cs) exp(−x² / 2 s_rb²) dx
    const double var = s_rb * s_rb + s_cs * s_cs;
    const double off = clouds.cs_center_offset[i];
    overlap *= s_rb / std::sqrt(var) * std::exp(-off * off / (2.0 * var));
  }
  return overlap;
}

double thermal_average_sigma(const CrossSection& entry, double temperature, double threshold) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("thermal average needs T > 0");
  }
  if (!(threshold >= 0.0)) throw InvalidArgument("threshold must be non-negative");

  const double a = threshold / temperature;
  if (const auto* constant = std::get_if<double>(&entry)) {
    return *constant * mb_tail_fraction(a);
  }

  const auto& curve = std::get<SampledCrossSection>(entry);
  curve.validate();
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [&](double u) { return curve(u * temperature) * mb_energy_density(u); };

  // Integrate knot to knot so the piecewise-linear kinks sit on panel edges.
  double total = 0.0;
  double lower = a;
  for (double e : curve.energy) {
    const double knot = e / temperature;
    if (knot <= lower) continue;
    total += gauss_kronrod<double, 61>::integrate(integrand, lower, knot, 20, 1e-10);
    lower = knot;
  }
  total += gauss_kronrod<double, 61>::integrate(integrand, lower,
                                                std::numeric_limits<double>::infinity(), 20, 1e-10);
  return total;
}

TransitionRates TransitionRates::scaled(double factor) const {
  TransitionRates out = *this;
  for (double& r : out.endo) r *= factor;
  for (double& r : out.exo) r *= factor;
  return out;
}

double TransitionRates::max_rate() const noexcept {
  double m = 0.0;
  for (double r : endo) m = std::max(m, r);
  for (double r : exo) m = std::max(m, r);
  return m;
}

TransitionRates compute_rates(const CrossSectionTable& table, const BTPoint& p,
                              const CloudGeometry& g, const PhysicalConstants& c) {
  const double n = density_overlap(g);
  const double v = mean_rel_speed(p.temperature, c);
  const double threshold = zeeman_energy_kelvin(p.b_field, c);
  TransitionRates rates;
  for (int m = -3; m <= 2; ++m) {
    rates.endo[static_cast<std::size_t>(m + 3)] =
        n * thermal_average_sigma(table.at(m, Direction::endo), p.temperature, threshold) * v;
  }
  for (int m = -2; m <= 3; ++m) {
    rates.exo[static_cast<std::size_t>(m + 2)] =
        n * thermal_average_sigma(table.at(m, Direction::exo), p.temperature, 0.0) * v;
  }
  return rates;
}

}  // namespace spinprobe
