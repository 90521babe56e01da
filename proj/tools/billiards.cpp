#include "billiards/io.hpp"

#include <CLI11.hpp>
#include <boost/math/tools/roots.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

using namespace billiards;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, schema = 2, numeric = 3, violation = 4 };

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<unsigned> precision;
  std::optional<int> kmax;
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream o(p);
  if (!o) throw std::runtime_error("cannot write " + p.string());
  o << text;
}

void write_json(const fs::path& p, const json& j) { write_file(p, j.dump(2) + "\n"); }

unsigned resolve_precision(const ScenarioConfig& cfg, const Options& opt) {
  unsigned bits = cfg.precision_bits;
  if (const char* env = std::getenv("BILLIARDS_PRECISION")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 32) throw ConfigError("BILLIARDS_PRECISION: integer >= 32 expected");
    bits = static_cast<unsigned>(v);
  }
  if (opt.precision) bits = *opt.precision;
  return bits;
}

const json& block(const ScenarioConfig& cfg, const char* key) {
  static const json empty = json::object();
  if (!cfg.raw.contains(key)) return empty;
  if (!cfg.raw[key].is_object()) throw ConfigError(std::string(key) + ": expected an object");
  return cfg.raw[key];
}

template <class T>
T field(const json& b, const char* key, T fallback) {
  if (!b.contains(key)) return fallback;
  try {
    return b[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

std::vector<int> int_list(const json& b, const char* key, std::vector<int> fallback) {
  if (!b.contains(key)) return fallback;
  if (b[key].is_number_integer()) return {b[key].get<int>()};
  return field<std::vector<int>>(b, key, fallback);
}

WeakVariant variant_of(const std::string& s) {
  if (s == "odd-hankel") return WeakVariant::odd_hankel;
  if (s == "odd-M") return WeakVariant::odd_M;
  if (s == "even-N") return WeakVariant::even_N;
  throw ConfigError("variant: one of odd-hankel, odd-M, even-N");
}

double caustic_drift(const ConfocalFamily& f, const Trajectory& t) {
  double worst = 0;
  for (const auto& s : t.segments) {
    auto c = caustic_parameters(f, s.line());
    for (size_t j = 0; j < c.gammas.size() && j < t.caustics.gammas.size(); ++j)
      worst = std::max(worst, std::abs(c.gammas[j] - t.caustics.gammas[j]) / std::max(1.0, std::abs(t.caustics.gammas[j])));
  }
  return worst;
}

// ---- commands ----

json cmd_simulate(const ScenarioConfig& cfg, const fs::path& out) {
  ConfocalFamily f(cfg.axes);
  const int k = field<int>(cfg.raw, "segments", cfg.kmax);
  if (k < 1) throw ConfigError("segments: positive integer");
  SimulationOptions so{cfg.grazing_tol, field<bool>(cfg.raw, "allow_degenerate", false)};
  auto t = simulate(f, scenario_ray(cfg), k, so);
  write_json(out / "trajectory.json", trajectory_json(t));
  write_file(out / "trajectory.svg", trajectory_svg(t));
  json s{{"segments", t.segments.size()}, {"caustics", t.caustics.gammas}};
  if (!t.caustics.degenerate) s["caustic_drift"] = caustic_drift(f, t);
  return s;
}

json cmd_caustics(const ScenarioConfig& cfg, const fs::path& out) {
  ConfocalFamily f(cfg.axes);
  auto c = scenario_caustics(cfg);
  json j = caustics_json(f, c);
  if (cfg.ray) j["tangency_polynomial"] = poly_json(tangency_polynomial(f, Line(cfg.ray->origin, cfg.ray->direction)));
  write_json(out / "caustics.json", j);
  return j;
}

json cmd_frequency(const ScenarioConfig& cfg, const fs::path& out) {
  auto fd = band_measures(scenario_bands(cfg));
  json j = frequency_json(fd);
  write_json(out / "frequency.json", j);
  return j;
}

// Bisection on one caustic parameter until f_index hits the target.
std::vector<double> tune_caustics(const ScenarioConfig& cfg, const json& tune) {
  if (!cfg.caustics) throw ConfigError("resonance.tune needs explicit caustics");
  ConfocalFamily f(cfg.axes);
  std::vector<double> g = *cfg.caustics;
  const int idx = field<int>(tune, "caustic", 0);
  const int fi = field<int>(tune, "frequency", 1);
  if (idx < 0 || idx >= static_cast<int>(g.size())) throw ConfigError("tune.caustic: index out of range");
  if (fi < 1 || fi >= f.d()) throw ConfigError("tune.frequency: 1-based index below d");
  if (!tune.contains("lo") || !tune.contains("hi") || !tune.contains("target"))
    throw ConfigError("tune: needs lo, hi and target");
  const double lo = field<double>(tune, "lo", 0), hi = field<double>(tune, "hi", 0);
  const double target = tune["target"].is_string() ? Rational(tune["target"].get<std::string>()).convert_to<double>()
                                                   : field<double>(tune, "target", 0);
  auto err = [&](double x) {
    auto h = g;
    h[static_cast<size_t>(idx)] = x;
    auto fd = band_measures(interval_system(f, make_caustics(f, h)));
    return fd.frequencies[static_cast<size_t>(fi - 1)] - target;
  };
  if ((err(lo) < 0) == (err(hi) < 0)) throw NumericError("tune: target frequency not bracketed by [lo, hi]");
  auto r = boost::math::tools::bisect(err, lo, hi, [](double a, double b) { return std::abs(b - a) < 1e-13; });
  g[static_cast<size_t>(idx)] = 0.5 * (r.first + r.second);
  return g;
}

json cmd_resonance(ScenarioConfig cfg, const fs::path& out) {
  const json& res = block(cfg, "resonance");
  if (res.contains("tune")) cfg.caustics = tune_caustics(cfg, res["tune"]);
  auto fd = band_measures(scenario_bands(cfg));
  auto rep = resonance_scan(fd, cfg.kmax, field<double>(res, "tol", 1e-8), field<double>(res, "near_tol", 1e-4));
  write_file(out / "resonance.csv", resonance_csv(rep));
  json j = resonance_json(rep);
  j["frequencies"] = fd.frequencies;
  if (cfg.caustics) j["caustics"] = *cfg.caustics;
  write_json(out / "resonance.json", j);
  return j;
}

json cmd_cayley(const ScenarioConfig& cfg, const fs::path& out) {
  ConfocalFamily f(cfg.axes);
  if (f.d() != 3) throw ConfigError("cayley: d must be 3");
  const json& b = block(cfg, "cayley");
  json j = json::object();
  auto c = scenario_caustics(cfg);
  // equal caustics: segments on generatrices of one 1-sheeted hyperboloid
  if (c.gammas.size() == 2 && std::abs(c.gammas[0] - c.gammas[1]) <= 1e-9) {
    json runs = json::array();
    for (int n : int_list(b, "n", {4})) {
      json r = rank_report_json(double_caustic_test(f, c.gammas[0], n, cfg.rank_tol));
      r["n"] = n;
      runs.push_back(r);
    }
    j["double_caustic"] = {{"gamma", c.gammas[0]}, {"runs", runs}};
  } else {
    j["caustics"] = caustics_json(f, c);
    json runs = json::array();
    for (int n : int_list(b, "n", {3, 4, 5, 6})) {
      json r{{"n", n}};
      try {
        r["rank"] = rank_report_json(periodicity_rank_test(f, c, n, cfg.rank_tol));
      } catch (const DomainError& e) {
        r["rank"] = {{"error", e.what()}};
      }
      json dets = json::array();
      for (auto v : {WeakVariant::odd_hankel, WeakVariant::odd_M, WeakVariant::even_N})
        for (int p : {0, 1}) {
          if (p == 1 && v != WeakVariant::even_N) continue;
          try {
            dets.push_back({{"variant", to_string(v)}, {"primary", p},
                            {"value", to_double(weak_period_determinant(f, c, n, v, p))}});
          } catch (const DomainError&) {
          }
        }
      r["determinants"] = dets;
      try {
        r["certificate"] = json::parse(certificate_json(weak_certificate(f, c, n)));
      } catch (const NumericError& e) {
        r["certificate"] = nullptr;
        r["certificate_note"] = e.what();
      } catch (const DomainError& e) {
        r["certificate"] = nullptr;
        r["certificate_note"] = e.what();
      }
      json ell = json::array();
      for (const auto& v : elliptic_weak_scan(f, c, n).variants)
        if (v.admits)
          ell.push_back({{"alpha_type", v.alpha_type}, {"eps", {v.eps1, v.eps2}}, {"alpha", v.alpha},
                         {"certified", v.alpha_certified}});
      r["elliptic"] = ell;
      runs.push_back(r);
    }
    j["runs"] = runs;
  }
  write_json(out / "cayley.json", j);
  return j;
}

template <class T>
json verify_generalized(const ScenarioConfig& cfg, const json& b) {
  auto E = scenario_bands(cfg);
  PellTriple<T> t;
  t.A = poly_from_json<T>(b.at("A"));
  t.B = poly_from_json<T>(b.at("B"));
  t.S = poly_from_json<T>(b.at("S"));
  t.d = E.d;
  t.m = field<int>(b, "m", t.A.degree());
  t.g = field<int>(b, "g", t.S.degree());
  auto rep = verify_generalized_pell(t, E, cfg.pell_tol);
  return {{"triple", pell_triple_json(t)}, {"report", pell_report_json(rep)}};
}

json cmd_pell_verify(const ScenarioConfig& cfg, const fs::path& out) {
  const json& b = block(cfg, "pell");
  const std::string kind = field<std::string>(b, "kind", "generalized");
  const std::string scalar = field<std::string>(b, "scalar", "real");
  json j;
  try {
    if (kind == "generalized") {
      if (scalar == "rational")
        j = verify_generalized<Rational>(cfg, b);
      else if (scalar == "double")
        j = verify_generalized<double>(cfg, b);
      else
        j = verify_generalized<Real>(cfg, b);
    } else if (kind == "weak") {
      ConfocalFamily f(cfg.axes);
      auto c = scenario_caustics(cfg);
      auto p = poly_from_json<Real>(b.at("p")), q = poly_from_json<Real>(b.at("q")), r = poly_from_json<Real>(b.at("r"));
      auto rep = verify_weak_pell(p, q, r, f, c, field<int>(b, "n", 0), field<int>(b, "s", 0), cfg.pell_tol);
      j = {{"residual", rep.residual},
           {"coprime", {rep.coprime_pq, rep.coprime_pr, rep.coprime_qr}},
           {"alphas", rep.alphas},
           {"pass", rep.pass}};
    } else {
      throw ConfigError("pell.kind: generalized or weak");
    }
  } catch (const json::out_of_range& e) {
    throw ConfigError(std::string("pell: missing field (") + e.what() + ")");
  }
  write_json(out / "pell.json", j);
  return j;
}

json cmd_extremal(const ScenarioConfig& cfg, const fs::path& out) {
  const json& b = block(cfg, "extremal");
  auto E = scenario_bands(cfg);
  if (!b.contains("m")) throw ConfigError("extremal.m: required");
  const int m = field<int>(b, "m", 0), q = field<int>(b, "q", E.d - 1);
  ExtremalOptions eo;
  eo.grid_per_band = field<int>(b, "grid_per_band", eo.grid_per_band);
  eo.max_iter = field<int>(b, "max_iter", eo.max_iter);
  auto sol = solve_restricted_extremal(E, m, q, eo);
  json j = extremal_json(sol);
  j["pell"] = pell_report_json(verify_generalized_pell(sol.triple, E, cfg.pell_tol));
  if (E.d > 1) {
    auto adj = adjoint_report(sol, E);
    j["adjoint"] = {{"adjoint_winding", adj.adjoint_winding}, {"tau", adj.tau}, {"k_type", adj.k_type},
                    {"monotone", adj.monotone}, {"recursion", adj.recursion}};
  }
  write_json(out / "extremal.json", j);
  return j;
}

// Sweep one caustic to roots of a weak determinant, then check each root
// against its certificate, the Pell triple and simulated trajectories.
json cmd_crosscheck(const ScenarioConfig& cfg, const fs::path& out, bool& failed) {
  ConfocalFamily f(cfg.axes);
  if (f.d() != 3) throw ConfigError("crosscheck: d must be 3");
  if (!cfg.caustics) throw ConfigError("crosscheck: needs explicit caustics (the swept one is a start value)");
  const json& b = block(cfg, "crosscheck");
  const int n = field<int>(b, "n", 3);
  const auto v = variant_of(field<std::string>(b, "variant", n % 2 ? "odd-M" : "even-N"));
  const int primary = field<int>(b, "primary", 0);
  const json sw = b.contains("sweep") ? b["sweep"] : json::object();
  const int index = field<int>(sw, "index", 1);
  if (!sw.contains("lo") || !sw.contains("hi")) throw ConfigError("crosscheck.sweep: needs lo and hi");
  const double lo = field<double>(sw, "lo", 0), hi = field<double>(sw, "hi", 0);
  const int samples = field<int>(sw, "samples", 200);
  const double alpha_tol = field<double>(b, "alpha_tol", 1e-7), closure_tol = field<double>(b, "closure_tol", 1e-6);
  auto fracs = field<std::vector<std::vector<double>>>(b, "fractions", {{0.2, 0.6}, {0.5, 0.6}, {0.8, 0.6}});

  auto roots = sweep_caustic(*cfg.caustics, index, lo, hi, [&](const std::vector<double>& g) {
    return to_double(weak_period_determinant(f, make_caustics(f, g), n, v, primary));
  }, samples);

  std::vector<std::string> violations;
  if (roots.empty()) violations.push_back("no determinant root in the sweep window");

  struct Job {
    size_t root;
    std::vector<double> frac;
  };
  std::vector<Job> jobs;
  std::vector<WeakCertificate> certs;
  json root_json = json::array();
  for (size_t i = 0; i < roots.size(); ++i) {
    auto c = make_caustics(f, roots[i]);
    auto cert = weak_certificate(f, c, n, v, v == WeakVariant::even_N ? primary : -1);
    auto tr = build_weak_pell_triple(cert);
    if (!cert.consistent) violations.push_back("root " + std::to_string(i) + ": certificate inconsistent");
    if (!tr.report.pass) violations.push_back("root " + std::to_string(i) + ": weak Pell triple fails");
    root_json.push_back({{"caustics", roots[i]},
                         {"certificate", json::parse(certificate_json(cert))},
                         {"pell", {{"residual", tr.report.residual}, {"pass", tr.report.pass}}}});
    certs.push_back(cert);
    for (const auto& fr : fracs) jobs.push_back({i, fr});
  }

  // Precision is process-wide and already set; workers only read it.
  ClosureOptions co{cfg.line_tol, cfg.angle_tol};
  std::vector<std::future<json>> futures;
  for (const auto& job : jobs)
    futures.push_back(std::async(std::launch::async, [&, job] {
      auto t = simulate(f, ray_from_caustics(f, roots[job.root], job.frac), n + 2, {cfg.grazing_tol, false});
      auto w = weak_closure_check(f, t, n, 0, co);
      json r = closure_json(w);
      double da = INFINITY, res = INFINITY;
      for (size_t k = 0; k < w.alphas.size(); ++k) {
        da = std::min(da, std::abs(w.alphas[k] - certs[job.root].alpha));
        res = std::min(res, w.residuals[k]);
      }
      r["root"] = job.root;
      r["fractions"] = job.frac;
      r["alpha_gap"] = std::isfinite(da) ? json(da) : json(nullptr);
      r["ok"] = w.kind == ClosureKind::weak && res < closure_tol && da < alpha_tol;
      return r;
    }));
  json sims = json::array();
  for (auto& fu : futures) {
    json r = fu.get();  // merged in job order
    if (!r["ok"].get<bool>())
      violations.push_back("root " + std::to_string(r["root"].get<size_t>()) + ": simulated closure disagrees");
    sims.push_back(r);
  }

  json j{{"n", n}, {"variant", to_string(v)}, {"roots", root_json}, {"simulations", sims}, {"violations", violations}};
  j["pass"] = violations.empty();
  failed = !violations.empty();
  write_json(out / "crosscheck.json", j);
  return {{"n", n}, {"roots", roots.size()}, {"simulations", sims.size()}, {"violations", violations}, {"pass", j["pass"]}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Billiards in confocal quadrics: simulation, spectral data and closure conditions"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"simulate", "simulate a trajectory; JSON and SVG output"},
      {"caustics", "caustic parameters and Audin report"},
      {"frequency", "band measures and frequencies"},
      {"resonance", "resonance table (CSV) and summary"},
      {"cayley", "periodicity rank tests, weak determinants and certificates (d = 3)"},
      {"pell-verify", "check a generalized or weak Pell triple"},
      {"extremal", "solve the restricted extremal problem"},
      {"crosscheck", "sweep to determinant roots and validate against simulation"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "scenario JSON")->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--precision", opt.precision, "mantissa bits for multiprecision work");
    sub->add_option("--kmax", opt.kmax, "number of steps (segments, resonance range)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::schema;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    ScenarioConfig cfg = load_config(opt.config);
    if (opt.kmax) {
      if (*opt.kmax < 1) throw ConfigError("--kmax: positive integer");
      cfg.kmax = *opt.kmax;
      cfg.raw["segments"] = *opt.kmax;
    }
    set_precision_bits(resolve_precision(cfg, opt));
    fs::path out(opt.out);
    fs::create_directories(out);

    json summary;
    bool failed = false;
    if (cmd == "simulate") summary = cmd_simulate(cfg, out);
    else if (cmd == "caustics") summary = cmd_caustics(cfg, out);
    else if (cmd == "frequency") summary = cmd_frequency(cfg, out);
    else if (cmd == "resonance") summary = cmd_resonance(cfg, out);
    else if (cmd == "cayley") summary = cmd_cayley(cfg, out);
    else if (cmd == "pell-verify") summary = cmd_pell_verify(cfg, out);
    else if (cmd == "extremal") summary = cmd_extremal(cfg, out);
    else summary = cmd_crosscheck(cfg, out, failed);
    summary["precision_bits"] = precision_bits();
    std::cout << summary.dump(2) << "\n";
    return failed ? Exit::violation : Exit::ok;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return Exit::schema;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return Exit::schema;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return Exit::numeric;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return Exit::schema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
