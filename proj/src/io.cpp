#include "billiards/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace billiards {

namespace {

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.is_array()) throw ConfigError(std::string(key) + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(std::string(key) + ": expected numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> sign_list(const json& j, const char* key) {
  std::vector<int> out;
  for (double v : number_list(j, key)) {
    if (v != 1 && v != -1) throw ConfigError(std::string(key) + ": entries must be +1 or -1");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) {
  Vec x(static_cast<int>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
  return x;
}

template <class T>
T number_of(const json& e) {
  if constexpr (std::is_same_v<T, Rational>) {
    if (e.is_string()) return Rational(e.get<std::string>());
    if (e.is_number_integer()) return Rational(e.get<long long>());
    if (e.is_number()) return Rational(e.get<double>());
  } else if constexpr (std::is_same_v<T, Real>) {
    if (e.is_string()) return Real(e.get<std::string>());
    if (e.is_number()) return Real(e.get<double>());
  } else {
    if (e.is_string()) return Rational(e.get<std::string>()).convert_to<double>();
    if (e.is_number()) return e.get<double>();
  }
  throw ConfigError("polynomial coefficient must be a number or a \"p/q\" string");
}

void read_common(const json& j, ScenarioConfig& cfg) {
  if (j.contains("precision_bits")) {
    if (!j["precision_bits"].is_number_integer() || j["precision_bits"].get<long>() < 32)
      throw ConfigError("precision_bits: integer >= 32");
    cfg.precision_bits = j["precision_bits"].get<unsigned>();
  }
  if (j.contains("kmax")) {
    if (!j["kmax"].is_number_integer() || j["kmax"].get<long>() < 1) throw ConfigError("kmax: positive integer");
    cfg.kmax = j["kmax"].get<int>();
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances: expected an object");
    auto read = [&](const char* k, double& dst) {
      if (!t.contains(k)) return;
      if (!t[k].is_number() || !(t[k].get<double>() > 0)) throw ConfigError(std::string("tolerances.") + k + ": positive number");
      dst = t[k].get<double>();
    };
    read("grazing", cfg.grazing_tol);
    read("line", cfg.line_tol);
    read("angle", cfg.angle_tol);
    read("rank", cfg.rank_tol);
    read("pell", cfg.pell_tol);
  }
}

}  // namespace

ScenarioConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig cfg;
  cfg.raw = j;
  if (j.contains("bands")) {
    cfg.bands = number_list(j["bands"], "bands");
    if (cfg.bands.size() < 2 || cfg.bands.size() % 2) throw ConfigError("bands: need an even, nonzero number of endpoints");
    for (size_t i = 1; i < cfg.bands.size(); ++i)
      if (!(cfg.bands[i] < cfg.bands[i - 1])) throw ConfigError("bands: endpoints must be strictly decreasing");
  }
  if (!j.contains("axes") && !cfg.bands.empty()) {
    if (j.contains("caustics") || j.contains("ray")) throw ConfigError("caustics/ray need axes");
    read_common(j, cfg);
    return cfg;
  }
  if (!j.contains("axes")) throw ConfigError("axes: required");
  cfg.axes = number_list(j["axes"], "axes");
  if (cfg.axes.empty()) throw ConfigError("axes: empty");
  for (size_t i = 0; i < cfg.axes.size(); ++i) {
    if (!(cfg.axes[i] > 0)) throw ConfigError("axes: must be positive");
    if (i > 0 && !(cfg.axes[i] < cfg.axes[i - 1])) throw ConfigError("axes: must be strictly decreasing");
  }
  const size_t d = cfg.axes.size();

  const bool has_caustics = j.contains("caustics") && !(j["caustics"].is_string() && j["caustics"] == "from-ray");
  if (j.contains("caustics") && j["caustics"].is_string() && j["caustics"] != "from-ray")
    throw ConfigError("caustics: expected an array or \"from-ray\"");
  if (has_caustics) {
    cfg.caustics = number_list(j["caustics"], "caustics");
    if (cfg.caustics->size() != d - 1) throw ConfigError("caustics: need d-1 values");
  }
  if (j.contains("ray")) {
    const auto& r = j["ray"];
    if (!r.is_object() || !r.contains("origin") || !r.contains("direction"))
      throw ConfigError("ray: needs origin and direction");
    auto o = number_list(r["origin"], "ray.origin");
    auto v = number_list(r["direction"], "ray.direction");
    if (o.size() != d || v.size() != d) throw ConfigError("ray: dimension must match axes");
    Vec vv = to_vec(v);
    if (vv.norm() == 0) throw ConfigError("ray.direction: zero vector");
    double level = 0;
    for (size_t i = 0; i < d; ++i) level += o[i] * o[i] / cfg.axes[i];
    if (level > 1 + 1e-9) throw ConfigError("ray.origin: outside the ellipsoid");
    cfg.ray = Ray(to_vec(o), vv.normalized());
  }
  if (has_caustics == cfg.ray.has_value())
    throw ConfigError("exactly one of caustics and ray must give the caustic source");

  if (j.contains("fractions")) {
    cfg.fractions = number_list(j["fractions"], "fractions");
    if (cfg.fractions.size() != d - 1) throw ConfigError("fractions: need d-1 values");
    for (double x : cfg.fractions)
      if (!(x >= 0 && x <= 1)) throw ConfigError("fractions: must lie in [0, 1]");
  } else {
    cfg.fractions.assign(d - 1, 0.5);
  }
  if (j.contains("point_signs")) cfg.point_signs = sign_list(j["point_signs"], "point_signs");
  if (j.contains("direction_signs")) cfg.direction_signs = sign_list(j["direction_signs"], "direction_signs");

  read_common(j, cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

Ray scenario_ray(const ScenarioConfig& cfg) {
  if (cfg.axes.empty()) throw ConfigError("this command needs axes and a caustic source");
  if (cfg.ray) return *cfg.ray;
  ConfocalFamily f(cfg.axes);
  return ray_from_caustics(f, *cfg.caustics, cfg.fractions, cfg.point_signs, cfg.direction_signs);
}

IntervalSystem scenario_bands(const ScenarioConfig& cfg) {
  if (!cfg.bands.empty()) return IntervalSystem::from_endpoints(cfg.bands);
  ConfocalFamily f(cfg.axes);
  return interval_system(f, scenario_caustics(cfg));
}

CausticSet scenario_caustics(const ScenarioConfig& cfg) {
  if (cfg.axes.empty()) throw ConfigError("this command needs axes and a caustic source");
  ConfocalFamily f(cfg.axes);
  if (cfg.caustics) return make_caustics(f, *cfg.caustics);
  return caustic_parameters(f, Line(cfg.ray->origin, cfg.ray->direction));
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json trajectory_json(const Trajectory& t) {
  json segs = json::array();
  for (const auto& s : t.segments)
    segs.push_back({{"impact", vec_json(s.start)}, {"direction", vec_json(s.direction)}, {"length", s.length}});
  return {{"axes", t.axes}, {"caustics", t.caustics.gammas}, {"segments", segs}};
}

json caustics_json(const ConfocalFamily& f, const CausticSet& c) {
  json j{{"axes", f.axes()}, {"caustics", c.gammas}, {"degenerate", c.degenerate}};
  json types = json::array();
  for (double g : c.gammas) types.push_back(f.type_name(g));
  j["types"] = types;
  if (!c.note.empty()) j["note"] = c.note;
  if (!c.degenerate) {
    auto a = audin_check(f, c);
    j["audin"] = {{"ok", a.ok}, {"b", a.b}, {"positions", a.positions}};
  }
  return j;
}

json frequency_json(const FrequencyData& fd) {
  return {{"eta", poly_json(fd.eta)},
          {"band_measures", fd.band_measures},
          {"frequencies", fd.frequencies},
          {"mass", fd.mass}};
}

json resonance_json(const ResonanceReport& r) {
  json j{{"r", r.r}, {"near_candidates", r.near_candidates}};
  j["k0"] = r.k0 ? json(*r.k0) : json(nullptr);
  j["weak_winding"] = r.weak_winding;
  return j;
}

json pell_report_json(const PellReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return {{"residual", r.residual}, {"residual_ok", r.residual_ok}, {"checks", checks}, {"pass", r.pass}};
}

json extremal_json(const ExtremalSolution& s) {
  json j = pell_triple_json(s.triple);
  j["L"] = s.L;
  j["alternance"] = s.alternance;
  j["restricted"] = s.restricted;
  j["pole_gaps"] = s.pole_gaps;
  return j;
}

json rank_report_json(const RankReport& r) {
  json cases = json::array();
  for (const auto& v : r.cases)
    cases.push_back({{"case", to_string(v.which)},
                     {"applicable", v.applicable},
                     {"admissible", v.admissible},
                     {"rows", v.rows},
                     {"cols", v.cols},
                     {"rank", v.rank},
                     {"smallest", v.smallest},
                     {"periodic", v.periodic}});
  return {{"cases", cases}, {"periodic", r.periodic()}};
}

json closure_json(const ClosureCertificate& c) {
  json j{{"kind", to_string(c.kind)}, {"n", c.n}, {"s", c.s}, {"alphas", c.alphas}, {"residuals", c.residuals}};
  if (c.kind == ClosureKind::weak) {
    j["side"] = c.side;
    j["type"] = c.type_index;
  }
  if (c.point) j["point"] = vec_json(*c.point);
  if (!c.flips.empty()) j["flips"] = c.flips;
  if (!c.reason.empty()) j["reason"] = c.reason;
  return j;
}

template <class T>
Polynomial<T> poly_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("polynomial: expected an array of coefficients, constant term first");
  std::vector<T> c;
  for (const auto& e : j) c.push_back(number_of<T>(e));
  return Polynomial<T>(std::move(c));
}

template Polynomial<double> poly_from_json<double>(const json&);
template Polynomial<Real> poly_from_json<Real>(const json&);
template Polynomial<Rational> poly_from_json<Rational>(const json&);

std::string trajectory_svg(const Trajectory& t) {
  const int d = static_cast<int>(t.axes.size());
  std::vector<std::pair<int, int>> planes;
  for (int i = 0; i < d; ++i)
    for (int k = i + 1; k < d; ++k) planes.push_back({i, k});
  const double panel = 320, pad = 10;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << panel * static_cast<double>(planes.size())
    << "\" height=\"" << panel << "\">\n";
  for (size_t p = 0; p < planes.size(); ++p) {
    auto [i, k] = planes[p];
    const double ri = std::sqrt(t.axes[static_cast<size_t>(i)]), rk = std::sqrt(t.axes[static_cast<size_t>(k)]);
    const double scale = (panel / 2 - pad) / std::max(ri, rk);
    const double cx = panel * (static_cast<double>(p) + 0.5), cy = panel / 2;
    s << "<g>\n<text x=\"" << cx - panel / 2 + pad << "\" y=\"" << pad + 8 << "\" font-size=\"10\">x" << i + 1
      << " / x" << k + 1 << "</text>\n";
    s << "<ellipse cx=\"" << cx << "\" cy=\"" << cy << "\" rx=\"" << ri * scale << "\" ry=\"" << rk * scale
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
    s << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"0.6\" points=\"";
    for (const auto& seg : t.segments) s << cx + seg.start[i] * scale << ',' << cy - seg.start[k] * scale << ' ';
    if (!t.segments.empty()) {
      Vec e = t.segments.back().end();
      s << cx + e[i] * scale << ',' << cy - e[k] * scale;
    }
    s << "\"/>\n</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace billiards
