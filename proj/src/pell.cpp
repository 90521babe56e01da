#include "billiards/pell.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>

namespace billiards {

namespace {

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

// ---- Chebyshev series in t on [-1, 1] ----

double cheb_eval(const std::vector<double>& a, double t) {
  double b1 = 0, b2 = 0;
  for (size_t k = a.size(); k-- > 1;) {
    double b0 = 2 * t * b1 - b2 + a[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + a[0];
}

void cheb_row(double t, int n, std::vector<double>& out) {
  out.assign(static_cast<size_t>(n) + 1, 0.0);
  out[0] = 1;
  if (n >= 1) out[1] = t;
  for (int k = 2; k <= n; ++k) out[static_cast<size_t>(k)] = 2 * t * out[static_cast<size_t>(k - 1)] - out[static_cast<size_t>(k - 2)];
}

// prod (t - r_k) in the Chebyshev basis, scaled to top coefficient 1.
std::vector<double> cheb_from_roots(const std::vector<double>& roots) {
  std::vector<double> a{1.0};
  for (double r : roots) {
    std::vector<double> b(a.size() + 1, 0.0);
    for (size_t k = 0; k < a.size(); ++k) {
      // t T_k = (T_{k+1} + T_{k-1}) / 2, t T_0 = T_1
      if (k == 0) {
        b[1] += a[0];
      } else {
        b[k + 1] += 0.5 * a[k];
        b[k - 1] += 0.5 * a[k];
      }
      b[k] -= r * a[k];
    }
    a = std::move(b);
  }
  double top = a.back();
  for (double& v : a) v /= top;
  return a;
}

// Chebyshev series in t = alpha z + beta, as a power series in z.
Polynomial<double> cheb_to_power(const std::vector<double>& a, double alpha, double beta) {
  Polynomial<double> t{beta, alpha};
  Polynomial<double> prev = Polynomial<double>::constant(1.0), cur = t;
  Polynomial<double> out = Polynomial<double>::constant(a[0]);
  if (a.size() > 1) out += a[1] * t;
  for (size_t k = 2; k < a.size(); ++k) {
    Polynomial<double> next = 2.0 * (t * cur) - prev;
    out += a[k] * next;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

// ---- band geometry, ascending order ----

struct Geometry {
  int d = 0;
  std::vector<std::pair<double, double>> bands;  // ascending
  std::vector<std::pair<double, double>> gaps;   // gaps[i] between bands[i] and bands[i+1]
  double alpha = 1, beta = 0;                    // t = alpha z + beta maps the hull to [-1, 1]
  std::vector<double> x;                         // grid
  std::vector<std::pair<size_t, size_t>> range;  // grid slice per band

  double t(double z) const { return alpha * z + beta; }
};

Geometry make_geometry(const IntervalSystem& E, int per_band) {
  Geometry g;
  g.d = E.d;
  for (int p = E.d; p >= 1; --p) g.bands.emplace_back(E.band_lo(p), E.band_hi(p));
  for (int i = 0; i + 1 < g.d; ++i) g.gaps.emplace_back(g.bands[static_cast<size_t>(i)].second, g.bands[static_cast<size_t>(i) + 1].first);
  double lo = g.bands.front().first, hi = g.bands.back().second;
  g.alpha = 2 / (hi - lo);
  g.beta = -(hi + lo) / (hi - lo);
  for (const auto& [a, b] : g.bands) {
    size_t start = g.x.size();
    for (int k = 0; k < per_band; ++k) g.x.push_back(a + (b - a) * (1 - std::cos(M_PI * k / (per_band - 1))) / 2);
    g.range.emplace_back(start, g.x.size());
  }
  return g;
}

// Gap index in the band-1-rightmost convention for ascending gap i.
int gap_label(int d, int i) { return d - 1 - i; }

// Quantiles of the equilibrium measure, arcsine-shaped within each band.
std::vector<double> equilibrium_quantiles(const Geometry& g, const std::vector<double>& mu_asc, int K, double jitter,
                                          std::mt19937_64& rng) {
  std::vector<double> cum(mu_asc.size() + 1, 0.0);
  for (size_t i = 0; i < mu_asc.size(); ++i) cum[i + 1] = cum[i] + mu_asc[i];
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> pts;
  for (int k = 0; k < K; ++k) {
    double q = cum.back() * k / (K - 1);
    size_t i = 0;
    while (i + 1 < mu_asc.size() && q > cum[i + 1]) ++i;
    double phi = mu_asc[i] > 0 ? std::clamp((q - cum[i]) / mu_asc[i], 0.0, 1.0) : 0.0;
    if (jitter > 0 && phi > 0 && phi < 1) phi = std::clamp(phi + jitter * u(rng) / K, 1e-6, 1 - 1e-6);
    auto [a, b] = g.bands[i];
    pts.push_back(a + (b - a) * (1 - std::cos(M_PI * phi)) / 2);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

struct Extremum {
  double x;
  double v;
};

// Local maxima of |f| per band on the grid, optionally polished by Brent,
// then merged so that signs alternate.
std::vector<Extremum> alternating_extrema(const Geometry& g, const std::function<double(double)>& f, bool refine) {
  std::vector<Extremum> cand;
  for (const auto& [s, e] : g.range) {
    std::vector<double> v(e - s);
    for (size_t j = s; j < e; ++j) v[j - s] = f(g.x[j]);
    for (size_t j = 0; j < v.size(); ++j) {
      double l = j > 0 ? std::abs(v[j - 1]) : -1, r = j + 1 < v.size() ? std::abs(v[j + 1]) : -1;
      if (std::abs(v[j]) < l || std::abs(v[j]) < r) continue;
      if (refine && j > 0 && j + 1 < v.size()) {
        auto res = boost::math::tools::brent_find_minima([&](double z) { return -std::abs(f(z)); }, g.x[s + j - 1], g.x[s + j + 1], 52);
        cand.push_back({res.first, f(res.first)});
      } else {
        cand.push_back({g.x[s + j], v[j]});
      }
    }
  }
  std::vector<Extremum> out;
  for (const auto& c : cand) {
    if (!out.empty() && sign_of(out.back().v) == sign_of(c.v)) {
      if (std::abs(c.v) > std::abs(out.back().v)) out.back() = c;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

void trim_to(std::vector<Extremum>& e, size_t K) {
  while (e.size() > K) {
    if (std::abs(e.front().v) < std::abs(e.back().v))
      e.erase(e.begin());
    else
      e.pop_back();
  }
}

double max_abs(const std::vector<Extremum>& e) {
  double m = 0;
  for (const auto& x : e) m = std::max(m, std::abs(x.v));
  return m;
}

// ---- inner problem: min over monic A of max |A| / |prod (z - s_k)| ----

struct WeightedFit {
  std::vector<double> a;  // Chebyshev, top coefficient 1
  double dev = 0;
  std::vector<double> ref;
  bool ok = false;
};

WeightedFit weighted_remez(const Geometry& g, int N, const std::vector<double>& poles, std::vector<double> ref, bool refine,
                           int max_iter) {
  auto weight = [&](double z) {
    double p = 1;
    for (double s : poles) p *= z - s;
    return 1 / std::abs(p);
  };
  WeightedFit fit;
  std::vector<double> row;
  for (int it = 0; it < max_iter; ++it) {
    Matrix<double> M(N + 1, N + 1);
    std::vector<double> rhs(static_cast<size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
      double z = ref[static_cast<size_t>(i)];
      cheb_row(g.t(z), N, row);
      for (int k = 0; k < N; ++k) M(i, k) = row[static_cast<size_t>(k)];
      M(i, N) = -(((N - i) % 2) ? -1.0 : 1.0) / weight(z);
      rhs[static_cast<size_t>(i)] = -row[static_cast<size_t>(N)];
    }
    std::vector<double> sol;
    try {
      sol = solve_linear(M, rhs);
    } catch (const std::exception&) {
      return fit;
    }
    fit.a.assign(sol.begin(), sol.begin() + N);
    fit.a.push_back(1.0);
    double level = std::abs(sol[static_cast<size_t>(N)]);
    auto f = [&](double z) { return cheb_eval(fit.a, g.t(z)) * weight(z); };
    auto ext = alternating_extrema(g, f, refine);
    fit.dev = max_abs(ext);
    fit.ref = ref;
    if (fit.dev <= level * (1 + 1e-12)) {
      fit.ok = true;
      return fit;
    }
    trim_to(ext, static_cast<size_t>(N) + 1);
    if (ext.size() < static_cast<size_t>(N) + 1) return fit;
    for (size_t i = 0; i < ext.size(); ++i) ref[i] = ext[i].x;
  }
  fit.ok = true;  // stalled on the grid; the deviation is still a valid upper value
  return fit;
}

// ---- outer search over pole positions ----

struct PoleSearch {
  const Geometry* g;
  std::vector<int> gaps;  // ascending gap indices
  int N;
  std::vector<double> ref;

  std::vector<double> poles(const double* u) const {
    std::vector<double> s;
    for (size_t k = 0; k < gaps.size(); ++k) {
      auto [lo, hi] = g->gaps[static_cast<size_t>(gaps[k])];
      double w = std::sin(u[k]);
      s.push_back(lo + (hi - lo) * w * w);
    }
    return s;
  }
};

double pole_objective(const gsl_vector* u, void* params) {
  auto* ps = static_cast<PoleSearch*>(params);
  auto fit = weighted_remez(*ps->g, ps->N, ps->poles(u->data), ps->ref, false, 60);
  if (fit.a.empty()) return 1e300;
  if (fit.ok) ps->ref = fit.ref;
  return fit.dev;
}

std::vector<double> minimize_poles(PoleSearch& ps, const std::vector<double>& start) {
  const size_t n = start.size();
  gsl_multimin_function fn{&pole_objective, n, &ps};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, start[i]);
    gsl_vector_set(step, i, 0.25);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, step);
  for (int it = 0; it < 800; ++it) {
    if (gsl_multimin_fminimizer_iterate(s)) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-9) == GSL_SUCCESS) break;
  }
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = gsl_vector_get(s->x, i);
  out.push_back(s->fval);
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(x);
  gsl_vector_free(step);
  return out;
}

// ---- one attempt with a fixed set of pole gaps ----

struct Attempt {
  std::vector<double> a, sc;  // Chebyshev numerator and denominator (top 1)
  double level = 0;
};

std::optional<Attempt> rational_exchange(const Geometry& g, int m, const std::vector<int>& gaps, std::vector<double> a,
                                         std::vector<double> sc, int max_iter) {
  const int gdeg = static_cast<int>(gaps.size());
  const int N = m + gdeg, K = m + 2 * gdeg + 1;
  std::vector<double> row;
  for (int it = 0; it < max_iter; ++it) {
    auto f = [&](double z) {
      double t = g.t(z);
      return cheb_eval(a, t) / cheb_eval(sc, t);
    };
    auto ext = alternating_extrema(g, f, true);
    if (ext.size() < static_cast<size_t>(K)) return std::nullopt;
    trim_to(ext, static_cast<size_t>(K));
    Matrix<double> M(K, K);
    std::vector<double> rhs(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i) {
      double t = g.t(ext[static_cast<size_t>(i)].x);
      double sg = sign_of(ext[static_cast<size_t>(i)].v);
      cheb_row(t, N, row);
      for (int k = 0; k < N; ++k) M(i, k) = row[static_cast<size_t>(k)];
      rhs[static_cast<size_t>(i)] = -row[static_cast<size_t>(N)];
      cheb_row(t, gdeg, row);
      for (int k = 0; k <= gdeg; ++k) M(i, N + k) = -sg * row[static_cast<size_t>(k)];
    }
    std::vector<double> sol;
    try {
      sol = solve_linear(M, rhs);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    a.assign(sol.begin(), sol.begin() + N);
    a.push_back(1.0);
    double level = sol.back();
    if (!(std::abs(level) > 0)) return std::nullopt;
    sc.assign(sol.begin() + N, sol.end());
    for (double& v : sc) v /= level;

    // Denominator roots must stay one per assigned gap; otherwise project
    // them back and refit the numerator with the poles frozen.
    if (gdeg > 0) {
      auto Sp = cheb_to_power(sc, g.alpha, g.beta);
      auto roots = all_real_roots(Sp);
      std::vector<double> r;
      for (const auto& x : roots) r.push_back(x.value);
      bool escaped = static_cast<int>(r.size()) != gdeg;
      std::vector<double> fixed;
      for (int k = 0; k < gdeg; ++k) {
        auto [lo, hi] = g.gaps[static_cast<size_t>(gaps[static_cast<size_t>(k)])];
        double x = escaped ? 0.5 * (lo + hi) : r[static_cast<size_t>(k)];
        if (!(x > lo && x < hi)) {
          escaped = true;
          x = std::clamp(x, lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
        }
        fixed.push_back(x);
      }
      if (escaped) {
        std::vector<double> tr;
        for (double x : fixed) tr.push_back(g.t(x));
        sc = cheb_from_roots(tr);
        trim_to(ext, static_cast<size_t>(N) + 1);
        std::vector<double> ref;
        for (const auto& e : ext) ref.push_back(e.x);
        auto fit = weighted_remez(g, N, fixed, ref, true, 40);
        if (fit.a.empty()) return std::nullopt;
        a = fit.a;  // only the shape of A / S matters for the next exchange
        continue;
      }
    }
    auto f2 = [&](double z) {
      double t = g.t(z);
      return cheb_eval(a, t) / cheb_eval(sc, t);
    };
    auto ext2 = alternating_extrema(g, f2, true);
    double dev = max_abs(ext2);
    if (dev <= std::abs(level) * (1 + 1e-10)) return Attempt{a, sc, std::abs(level)};
  }
  return std::nullopt;
}

std::optional<ExtremalSolution> finalize(const IntervalSystem& E, const Geometry& g, int m, const std::vector<int>& gaps,
                                         const Attempt& at) {
  const int d = E.d, gdeg = static_cast<int>(gaps.size()), N = m + gdeg;
  auto Ap = cheb_to_power(at.a, g.alpha, g.beta);
  auto Sp = cheb_to_power(at.sc, g.alpha, g.beta);
  double slead = Sp.leading();
  Polynomial<double> S = Sp / slead;
  Polynomial<double> A = Ap / (slead * at.level);
  auto ratio = [&](double z) { return A(z) / S(z); };

  // interior extrema: sign changes of A'S - AS' inside each band
  Polynomial<double> D = A.derivative() * S - A * S.derivative();
  std::vector<double> interior;
  for (const auto& [s, e] : g.range) {
    for (size_t j = s + 1; j + 2 < e; ++j) {
      double x0 = g.x[j], x1 = g.x[j + 1];
      double f0 = D(x0), f1 = D(x1);
      if (f0 == 0) {
        interior.push_back(x0);
        continue;
      }
      if (f0 * f1 < 0) {
        boost::uintmax_t iters = 200;
        auto r = boost::math::tools::toms748_solve([&](double z) { return D(z); }, x0, x1, f0, f1,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
        interior.push_back(0.5 * (r.first + r.second));
      }
    }
  }
  if (static_cast<int>(interior.size()) != N - d) return std::nullopt;
  for (double y : interior)
    if (std::abs(std::abs(ratio(y)) - 1) > 1e-8) return std::nullopt;
  for (double c : E.c)
    if (std::abs(ratio(c)) < 1 - 1e-8) return std::nullopt;

  ExtremalSolution sol;
  double A0 = A.leading();
  sol.triple.A = A;
  sol.triple.S = S;
  sol.triple.B = Polynomial<double>::from_roots(interior, std::abs(A0));
  sol.triple.m = m;
  sol.triple.g = gdeg;
  sol.triple.d = d;
  sol.L = 1 / std::abs(A0);
  sol.g = gdeg;
  for (int i : gaps) sol.pole_gaps.push_back(gap_label(d, i));
  std::sort(sol.pole_gaps.begin(), sol.pole_gaps.end());

  std::vector<std::pair<double, int>> pts;
  for (double c : E.c) pts.emplace_back(c, 1);
  for (double y : interior) pts.emplace_back(y, 2);
  std::sort(pts.begin(), pts.end());
  for (const auto& [x, mult] : pts) {
    sol.extremal_points.push_back(x);
    sol.extremal_signs.push_back(sign_of(ratio(x)));
    sol.extremal_multiplicity.push_back(mult);
  }
  sol.alternance = alternating_subsequence(sol.extremal_points, sol.extremal_signs);
  if (static_cast<int>(sol.alternance.size()) != m + 2 * gdeg + 1) return std::nullopt;
  if (!verify_generalized_pell(sol.triple, E, 1e-8).pass) return std::nullopt;
  return sol;
}

std::optional<ExtremalSolution> attempt(const IntervalSystem& E, const Geometry& g, const std::vector<double>& mu_asc, int m,
                                        const std::vector<int>& gaps, const ExtremalOptions& opt, std::mt19937_64& rng) {
  const int gdeg = static_cast<int>(gaps.size()), N = m + gdeg;
  Geometry coarse = make_geometry(E, std::max(200, opt.grid_per_band / 8));
  auto ref = equilibrium_quantiles(g, mu_asc, N + 1, opt.perturbation, rng);

  std::vector<double> poles;
  if (gdeg > 0) {
    PoleSearch ps{&coarse, gaps, N, ref};
    std::vector<std::vector<double>> starts;
    std::vector<double> grid1 = gdeg <= 2 ? std::vector<double>{0.3, 0.8, 1.3} : std::vector<double>{0.5, 1.1};
    std::vector<size_t> idx(static_cast<size_t>(gdeg), 0);
    std::uniform_real_distribution<double> u(-1, 1);
    while (true) {
      std::vector<double> s;
      for (size_t k : idx) s.push_back(grid1[k] + opt.perturbation * u(rng));
      starts.push_back(s);
      size_t k = 0;
      while (k < idx.size() && ++idx[k] == grid1.size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    double best = 1e301;
    std::vector<double> best_u;
    for (const auto& s : starts) {
      ps.ref = ref;
      auto r = minimize_poles(ps, s);
      if (r.back() < best) {
        best = r.back();
        best_u.assign(r.begin(), r.end() - 1);
      }
    }
    poles = ps.poles(best_u.data());
  }
  auto fit = weighted_remez(g, N, poles, ref, false, opt.max_iter);
  if (fit.a.empty()) return std::nullopt;
  std::vector<double> tp;
  for (double s : poles) tp.push_back(g.t(s));
  auto sc = cheb_from_roots(tp);
  auto at = rational_exchange(g, m, gaps, fit.a, sc, opt.max_iter);
  if (!at) return std::nullopt;
  return finalize(E, g, m, gaps, *at);
}

double reduced_weight(const std::vector<double>& c, size_t skip1, size_t skip2, double s) {
  double p = 1;
  for (size_t j = 0; j < c.size(); ++j)
    if (j != skip1 && j != skip2) p *= std::abs(s - c[j]);
  return 1.0 / std::sqrt(p);
}

template <class T>
std::vector<double> real_roots_double(const Polynomial<T>& p) {
  auto pd = convert<double>(p);
  std::vector<double> out;
  if (pd.degree() < 1) return out;
  for (const auto& r : all_real_roots(pd)) out.push_back(r.value);
  return out;
}

template <class T>
Polynomial<T> interval_polynomial(const IntervalSystem& E) {
  std::vector<T> roots;
  for (double c : E.c) roots.push_back(from_double<T>(c));
  return Polynomial<T>::from_roots(roots);
}

}  // namespace

std::vector<double> alternating_subsequence(const std::vector<double>& x, const std::vector<int>& sign) {
  std::vector<double> out;
  int last = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (sign[i] == 0 || sign[i] == last) continue;
    out.push_back(x[i]);
    last = sign[i];
  }
  return out;
}

template <class T>
PellReport verify_generalized_pell(const PellTriple<T>& t, const IntervalSystem& E, double tol) {
  const int d = E.d, N = t.m + t.g;
  if (t.d != d || t.A.degree() != N || t.S.degree() != t.g || N - d < 0 || t.B.degree() != N - d)
    throw DomainError("verify_generalized_pell: degree mismatch");
  PellReport rep;
  auto T2 = interval_polynomial<T>(E);
  auto R = t.A * t.A - T2 * t.B * t.B - t.S * t.S;
  double scale = to_double(max_abs_coeff(t.A * t.A));
  rep.residual = R.is_zero() ? 0.0 : to_double(max_abs_coeff(R)) / scale;
  rep.residual_ok = rep.residual <= tol;

  auto zA = real_roots_double(t.A), zB = real_roots_double(t.B), zS = real_roots_double(t.S);
  auto strictly_in_band = [&](double z) {
    for (int p = 1; p <= d; ++p)
      if (z > E.band_lo(p) && z < E.band_hi(p)) return p;
    return 0;
  };
  {
    bool ok = static_cast<int>(zA.size()) == N;
    for (double z : zA) ok = ok && strictly_in_band(z);
    rep.checks.push_back({"A zeros real, simple, inside E", ok, std::to_string(zA.size()) + " of " + std::to_string(N)});
  }
  {
    bool ok = static_cast<int>(zB.size()) == N - d;
    for (double z : zB) ok = ok && strictly_in_band(z);
    rep.checks.push_back({"B zeros real, simple, inside E", ok, std::to_string(zB.size()) + " of " + std::to_string(N - d)});
  }
  {
    bool ok = true;
    for (int p = 1; p <= d && ok; ++p) {
      std::vector<std::pair<double, int>> z;
      for (double x : zA)
        if (strictly_in_band(x) == p) z.emplace_back(x, 1);
      for (double x : zB)
        if (strictly_in_band(x) == p) z.emplace_back(x, 0);
      std::sort(z.begin(), z.end());
      if (z.empty()) ok = false;
      for (size_t i = 0; i < z.size() && ok; ++i) ok = z[i].second == static_cast<int>(i % 2 == 0);
      ok = ok && !z.empty() && z.back().second == 1;
    }
    rep.checks.push_back({"A and B zeros interlace per band", ok, ""});
  }
  {
    bool ok = static_cast<int>(zS.size()) == t.g && t.S.leading() == T(1);
    std::vector<int> used;
    for (double z : zS) {
      int hit = 0;
      for (int p = 1; p < d; ++p)
        if (z > E.gap_lo(p) && z < E.gap_hi(p)) hit = p;
      if (!hit || std::find(used.begin(), used.end(), hit) != used.end()) ok = false;
      used.push_back(hit);
    }
    rep.checks.push_back({"S monic, zeros in distinct gaps", ok, ""});
  }
  rep.pass = rep.residual_ok;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

template PellReport verify_generalized_pell(const PellTriple<double>&, const IntervalSystem&, double);
template PellReport verify_generalized_pell(const PellTriple<Real>&, const IntervalSystem&, double);
template PellReport verify_generalized_pell(const PellTriple<Rational>&, const IntervalSystem&, double);

ExtremalSolution solve_restricted_extremal(const IntervalSystem& E, int m, int q, const ExtremalOptions& opt) {
  const int d = E.d;
  if (m < d) throw DomainError("solve_restricted_extremal: need m >= d");
  if (q < 0 || q > d - 1) throw DomainError("solve_restricted_extremal: need 0 <= q <= d-1");
  Geometry g = make_geometry(E, opt.grid_per_band);
  std::vector<double> mu_asc;
  if (d == 1) {
    mu_asc = {1.0};
  } else {
    auto fd = band_measures(E);
    mu_asc.assign(fd.band_measures.rbegin(), fd.band_measures.rend());
  }
  std::mt19937_64 rng(opt.seed);
  for (int gdeg = 0; gdeg <= d - 1; ++gdeg) {
    std::vector<int> mask(static_cast<size_t>(d - 1), 0);
    std::fill(mask.end() - gdeg, mask.end(), 1);
    do {
      std::vector<int> gaps;
      for (int i = 0; i < d - 1; ++i)
        if (mask[static_cast<size_t>(i)]) gaps.push_back(i);
      auto sol = attempt(E, g, mu_asc, m, gaps, opt, rng);
      if (sol) {
        sol->restricted = sol->g <= q;
        return *sol;
      }
    } while (std::next_permutation(mask.begin(), mask.end()));
  }
  throw NumericError("solve_restricted_extremal: exchange did not converge");
}

AlternanceSets alternance_points(const ExtremalSolution& sol) {
  AlternanceSets out;
  const int s0 = sign_of(sol.triple.A.leading());
  for (size_t i = 0; i < sol.extremal_points.size(); ++i) {
    auto& dst = sol.extremal_signs[i] * s0 > 0 ? out.x_plus : out.x_minus;
    for (int k = 0; k < sol.extremal_multiplicity[i]; ++k) dst.push_back(sol.extremal_points[i]);
  }
  const int m = sol.triple.m;
  for (int k = 0; k <= m; ++k) {
    double sp = 0, sm = 0, mag = 0;
    for (double x : out.x_plus) {
      sp += std::pow(x, k);
      mag += std::pow(std::abs(x), k);
    }
    for (double x : out.x_minus) {
      sm += std::pow(x, k);
      mag += std::pow(std::abs(x), k);
    }
    double rel = std::abs(sp - sm) / std::max(1.0, mag);
    if (k < m)
      out.power_sum_residual = std::max(out.power_sum_residual, rel);
    else
      out.power_sum_gap = std::abs(sp - sm);
  }
  return out;
}

template <class T>
Denominator<T> reconstruct_denominator(const std::vector<T>& xp, const std::vector<T>& xm, int m, double tol) {
  const int N = static_cast<int>(xp.size());
  if (static_cast<int>(xm.size()) != N) throw DomainError("reconstruct_denominator: level sets differ in size");
  const int g = N - m;
  if (g < 0) throw DomainError("reconstruct_denominator: m exceeds the level-set size");
  auto Pp = Polynomial<T>::from_roots(xp), Pm = Polynomial<T>::from_roots(xm);
  auto D = Pp - Pm;
  if (D.is_zero()) throw DomainError("reconstruct_denominator: x+ and x- coincide, level undefined");
  T scale = std::max(max_abs_coeff(Pp), T(1));
  auto negligible = [&](const T& v) {
    if constexpr (is_exact_v<T>)
      return v == 0;
    else
      return scalar_abs(v) <= T(tol) * scale;
  };
  for (int k = g + 1; k < N; ++k)
    if (!negligible(D.coeff(k))) throw DomainError("reconstruct_denominator: symmetric functions below order m disagree");
  T Dg = D.coeff(g);
  if (negligible(Dg)) throw DomainError("reconstruct_denominator: level undefined");
  std::vector<T> h;
  for (int k = 0; k <= g; ++k) h.push_back(T(D.coeff(k) / Dg));
  T half = T(Dg / 2);
  return Denominator<T>{scalar_abs(half), half > 0 ? 1 : -1, Polynomial<T>(h)};
}

template Denominator<double> reconstruct_denominator(const std::vector<double>&, const std::vector<double>&, int, double);
template Denominator<Real> reconstruct_denominator(const std::vector<Real>&, const std::vector<Real>&, int, double);
template Denominator<Rational> reconstruct_denominator(const std::vector<Rational>&, const std::vector<Rational>&, int, double);

KlnResult kln_numbers(const Polynomial<double>& P, const IntervalSystem& E, int m, double tol, const QuadratureOptions& q) {
  const int d = E.d;
  KlnResult res;
  if (d < 2) return res;
  if (P.is_zero()) throw DomainError("kln_numbers: P vanishes on E");
  for (int p = 1; p <= d; ++p) {
    double lo = E.band_lo(p), hi = E.band_hi(p);
    if (P.degree() >= 1 && !isolate_real_roots(P, lo, hi).empty()) throw DomainError("kln_numbers: P vanishes on E");
    if (!(P(0.5 * (lo + hi)) > 0)) throw DomainError("kln_numbers: P must be positive on E");
  }
  const auto& c = E.c;
  auto moment = [&](size_t i_hi, size_t i_lo, int j, const std::function<double(double)>& f) {
    return chebyshev_endpoint_integral([&](double z) { return std::pow(z, j) * f(z) * reduced_weight(c, i_hi, i_lo, z); },
                                       c[i_lo], c[i_hi], q);
  };
  auto one = [](double) { return 1.0; };
  auto lnP = [&](double z) { return std::log(P(z)); };
  const int n = d - 1;
  Matrix<double> G(n, n);
  std::vector<double> rhs(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 1; k <= n; ++k) {
      // gap (c_{2(d-k)+1}, c_{2(d-k)})
      size_t hi = static_cast<size_t>(2 * (d - k) - 1), lo = static_cast<size_t>(2 * (d - k));
      G(j, k - 1) = ((k % 2) ? -1.0 : 1.0) * moment(hi, lo, j, one);
    }
    double lhs = 0;
    for (int p = 1; p <= d; ++p) {
      // boundary value of sqrt(T) alternates between bands; leftmost band positive
      double eps = ((d - p) % 2) ? -1.0 : 1.0;
      lhs += eps * moment(static_cast<size_t>(2 * p - 2), static_cast<size_t>(2 * p - 1), j, lnP);
    }
    lhs /= 2 * M_PI;
    // z = c_1 + u^2/(1-u)^2 removes the endpoint root and maps the tail to [0, 1)
    auto tail_f = [&](double u) {
      double w = u / (1 - u);
      double z = c[0] + w * w;
      // skip (0, 0) drops only the c_1 factor
      return std::pow(z, j) * 2 / ((1 - u) * (1 - u)) * reduced_weight(c, 0, 0, z);
    };
    double tail = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(tail_f, 0.0, 1.0, 15, 1e-13);
    double sgn_d = (d % 2) ? -1.0 : 1.0;
    rhs[static_cast<size_t>(j)] = lhs - sgn_d * m * tail;
  }
  res.N = solve_linear(G, rhs);
  for (double v : res.N) res.integral.push_back(std::abs(v - std::round(v)) < tol && std::round(v) >= 1);
  return res;
}

AdjointReport adjoint_report(const ExtremalSolution& sol, const IntervalSystem& E) {
  AdjointReport rep;
  const int d = E.d;
  if (d < 2) {
    rep.monotone = rep.recursion = true;
    return rep;
  }
  auto zA = real_roots_double(sol.triple.A), zB = real_roots_double(sol.triple.B), zS = real_roots_double(sol.triple.S);
  auto count = [](const std::vector<double>& z, double lo, double hi) {
    return static_cast<long>(std::count_if(z.begin(), z.end(), [&](double x) { return x >= lo && x <= hi; }));
  };
  for (int j = 1; j <= d - 1; ++j) {
    rep.adjoint_winding.push_back(count(zA, E.c.back(), E.c[static_cast<size_t>(2 * j - 1)]));
    // B zeros on band j+1, so that m^_j - m^_{j+1} = tau_j + 1
    rep.tau.push_back(count(zB, E.band_lo(j + 1), E.band_hi(j + 1)));
  }
  for (int alpha = 1; alpha <= d - 1; ++alpha) {
    int p = d - alpha;
    rep.k_type.push_back(count(zS, E.gap_lo(p), E.gap_hi(p)) > 0 ? 1 : 0);
  }
  rep.adjoint_resonance = d - 1 - sol.g;
  rep.monotone = rep.recursion = true;
  for (int j = 1; j <= d - 1; ++j) {
    long next = j < d - 1 ? rep.adjoint_winding[static_cast<size_t>(j)] : 0;
    long cur = rep.adjoint_winding[static_cast<size_t>(j - 1)];
    if (j < d - 1 && !(cur > next)) rep.monotone = false;
    if (cur != next + rep.tau[static_cast<size_t>(j - 1)] + 1) rep.recursion = false;
  }
  return rep;
}

template <class T>
Polynomial<T> caustic_polynomial(const ConfocalFamily& f, const CausticSet& c) {
  std::vector<T> roots;
  for (double a : f.axes()) roots.push_back(from_double<T>(a));
  for (double g : c.gammas) roots.push_back(from_double<T>(g));
  // prod (r - x) = (-1)^deg prod (x - r)
  return Polynomial<T>::from_roots(roots, T(roots.size() % 2 ? -1 : 1));
}

template Polynomial<double> caustic_polynomial(const ConfocalFamily&, const CausticSet&);
template Polynomial<Real> caustic_polynomial(const ConfocalFamily&, const CausticSet&);
template Polynomial<Rational> caustic_polynomial(const ConfocalFamily&, const CausticSet&);

template <class T>
WeakPellReport<T> verify_weak_pell(const Polynomial<T>& p, const Polynomial<T>& q, const Polynomial<T>& r, const ConfocalFamily& f,
                                   const CausticSet& c, int n, int s, double tol) {
  const int d = f.d();
  if (p.degree() != n + s + 1 || q.degree() != n + s + 1 - d || r.degree() != s + 1)
    throw DomainError("verify_weak_pell: degree mismatch");
  WeakPellReport<T> rep;
  auto P = caustic_polynomial<T>(f, c);
  auto lhs1 = p * p, lhs2 = P * q * q;
  auto rhs = (r * r).shift(2 * n);
  auto R = lhs1 - lhs2 - rhs;
  double scale = std::max(to_double(max_abs_coeff(lhs1)), to_double(max_abs_coeff(lhs2)));
  rep.residual = R.is_zero() ? 0.0 : to_double(max_abs_coeff(R)) / scale;
  rep.coprime_pq = coprime(p, q, tol);
  rep.coprime_pr = coprime(p, r, tol);
  rep.coprime_qr = q.degree() <= 0 ? true : coprime(q, r, tol);
  rep.alphas = real_roots_double(r);
  rep.pass = rep.residual <= tol && rep.coprime_pq && rep.coprime_pr && rep.coprime_qr;
  return rep;
}

template WeakPellReport<double> verify_weak_pell(const Polynomial<double>&, const Polynomial<double>&, const Polynomial<double>&,
                                                 const ConfocalFamily&, const CausticSet&, int, int, double);
template WeakPellReport<Real> verify_weak_pell(const Polynomial<Real>&, const Polynomial<Real>&, const Polynomial<Real>&,
                                               const ConfocalFamily&, const CausticSet&, int, int, double);
template WeakPellReport<Rational> verify_weak_pell(const Polynomial<Rational>&, const Polynomial<Rational>&,
                                                   const Polynomial<Rational>&, const ConfocalFamily&, const CausticSet&, int,
                                                   int, double);

}  // namespace billiards
