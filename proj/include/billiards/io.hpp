#pragma once

#include "billiards/cayley3d.hpp"
#include "billiards/dynamics.hpp"
#include "billiards/pell.hpp"
#include "billiards/spectral.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace billiards {

using json = nlohmann::json;

// Schema violations in a scenario file.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Geometry (axes plus a caustic source) is required unless "bands" gives the
// band system endpoints c_1 > ... > c_2d directly.
struct ScenarioConfig {
  std::vector<double> axes;
  std::vector<double> bands;
  std::optional<std::vector<double>> caustics;
  std::optional<Ray> ray;
  // only with caustics: start point fractions and octant/orientation signs
  std::vector<double> fractions;
  std::vector<int> point_signs, direction_signs;
  unsigned precision_bits = 128;
  int kmax = 200;
  double grazing_tol = 1e-10;
  double line_tol = 1e-7;
  double angle_tol = 1e-7;
  double rank_tol = 1e-10;
  double pell_tol = 1e-8;
  json raw;  // the whole document, for command-specific blocks
};

ScenarioConfig parse_config(const json& j);
ScenarioConfig load_config(const std::string& path);

// Ray from the config: the explicit ray, or one built from the caustics.
Ray scenario_ray(const ScenarioConfig& cfg);
// Caustics from the config, or from the ray when "caustics" is "from-ray" or absent.
CausticSet scenario_caustics(const ScenarioConfig& cfg);
IntervalSystem scenario_bands(const ScenarioConfig& cfg);

json vec_json(const Vec& v);
template <class T>
json poly_json(const Polynomial<T>& p) {
  json a = json::array();
  for (const auto& c : p.coeffs()) {
    if constexpr (std::is_same_v<T, Rational>)
      a.push_back(c.str());
    else
      a.push_back(to_double(c));
  }
  return a;
}

json trajectory_json(const Trajectory& t);
json caustics_json(const ConfocalFamily& f, const CausticSet& c);
json frequency_json(const FrequencyData& fd);
json resonance_json(const ResonanceReport& r);
template <class T>
json pell_triple_json(const PellTriple<T>& t) {
  return {{"d", t.d}, {"m", t.m}, {"g", t.g}, {"A", poly_json(t.A)}, {"B", poly_json(t.B)}, {"S", poly_json(t.S)}};
}
json pell_report_json(const PellReport& r);
json extremal_json(const ExtremalSolution& s);
json rank_report_json(const RankReport& r);
json closure_json(const ClosureCertificate& c);

// Polynomial coefficients from numbers or "p/q" strings.
template <class T>
Polynomial<T> poly_from_json(const json& j);

// Orthogonal projections onto the coordinate planes, one panel per pair.
std::string trajectory_svg(const Trajectory& t);

}  // namespace billiards
