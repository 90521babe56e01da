#include "billiards/cayley3d.hpp"

#include "billiards/poly_core.hpp"

#include <boost/math/tools/roots.hpp>

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace billiards {

namespace {

Real R(double x) { return from_double<Real>(x); }

Polynomial<Real> linear_factor(double b) { return Polynomial<Real>{R(b), Real(-1)}; }

Polynomial<Real> product_of(const std::vector<double>& roots) {
  Polynomial<Real> p = Polynomial<Real>::constant(Real(1));
  for (double r : roots) p *= linear_factor(r);
  return p;
}

void require_d3(const ConfocalFamily& f, const char* who) {
  if (f.d() != 3) throw DomainError(std::string(who) + ": d must be 3");
}

void require_clean(const CausticSet& c, int count, const char* who) {
  if (static_cast<int>(c.gammas.size()) != count) throw DomainError(std::string(who) + ": wrong number of caustics");
  if (c.degenerate) throw DomainError(std::string(who) + ": degenerate caustics (" + c.note + ")");
}

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

// Rank of a Hankel block, measured against the largest coefficient of the
// stream up to the last one used. Scaling by the block itself could never
// see rank 0.
RankVerdict hankel_verdict(RankCase which, const SeriesPrefix<Real>& s, int start, int rows, int cols, double tol) {
  RankVerdict v;
  v.which = which;
  v.applicable = true;
  v.admissible = true;
  v.rows = rows;
  v.cols = cols;
  auto M = hankel_matrix(s, start, rows, cols);
  Real scale(0);
  for (int k = 0; k <= start + rows + cols - 2; ++k) scale = std::max(scale, scalar_abs(s.coeffs[static_cast<size_t>(k)]));
  auto sv = singular_values(M);
  if (scale == 0) {
    v.rank = 0;
    v.smallest = 0;
  } else {
    for (const auto& x : sv)
      if (x > scale * Real(tol)) ++v.rank;
    v.smallest = to_double(Real(sv.back() / scale));
  }
  v.periodic = v.rank < cols;
  return v;
}

RankVerdict gated(RankCase which, bool applicable) {
  RankVerdict v;
  v.which = which;
  v.applicable = applicable;
  return v;
}

}  // namespace

const char* to_string(RankCase c) {
  switch (c) {
    case RankCase::even: return "even";
    case RankCase::even_hyperboloids: return "even-hyperboloids";
    case RankCase::odd_ellipsoid: return "odd-ellipsoid";
  }
  return "?";
}

const char* to_string(WeakVariant v) {
  switch (v) {
    case WeakVariant::odd_hankel: return "odd-hankel";
    case WeakVariant::odd_M: return "odd-M";
    case WeakVariant::even_N: return "even-N";
  }
  return "?";
}

bool RankReport::periodic() const {
  return std::any_of(cases.begin(), cases.end(), [](const RankVerdict& v) { return v.periodic; });
}

std::vector<Real> caustic_series(const ConfocalFamily& f, const CausticSet& c, int K) {
  std::vector<double> roots = f.axes();
  roots.insert(roots.end(), c.gammas.begin(), c.gammas.end());
  return sqrt_series(product_of(roots), K).coeffs;
}

RankReport periodicity_rank_test(const ConfocalFamily& f, const CausticSet& c, int n, double tol) {
  require_d3(f, "periodicity_rank_test");
  require_clean(c, 2, "periodicity_rank_test");
  if (n < 1) throw DomainError("periodicity_rank_test: n must be positive");
  std::vector<double> roots = f.axes();
  roots.insert(roots.end(), c.gammas.begin(), c.gammas.end());
  const auto P = product_of(roots);
  const int K = 2 * n + 2;
  const double g1 = c.gammas[0], g2 = c.gammas[1];
  RankReport rep;
  if (n % 2 == 0) {
    const int m = n / 2;
    if (n >= 6)
      rep.cases.push_back(hankel_verdict(RankCase::even, sqrt_series(P, K), 4, m - 1, m - 2, tol));
    else
      rep.cases.push_back(gated(RankCase::even, true));
    const bool both_one_sheeted = c.types[0] == 1 && c.types[1] == 1;
    if (!both_one_sheeted)
      rep.cases.push_back(gated(RankCase::even_hyperboloids, false));
    else if (n >= 4) {
      auto D = Polynomial<Real>{R(-g1), Real(1)} * Polynomial<Real>{R(-g2), Real(1)};
      rep.cases.push_back(hankel_verdict(RankCase::even_hyperboloids, quotient_series(P, D, K), 2, m, m - 1, tol));
    } else {
      rep.cases.push_back(gated(RankCase::even_hyperboloids, true));
    }
  } else {
    if (c.types[0] != 0)
      throw DomainError("periodicity_rank_test: odd n needs an ellipsoid caustic");
    const int m = (n - 1) / 2;
    if (n >= 5) {
      auto D = Polynomial<Real>{R(-g1), Real(1)};
      rep.cases.push_back(hankel_verdict(RankCase::odd_ellipsoid, quotient_series(P, D, K), 3, m, m - 1, tol));
    } else {
      rep.cases.push_back(gated(RankCase::odd_ellipsoid, true));
    }
  }
  return rep;
}

RankReport double_caustic_test(const ConfocalFamily& f, double gamma1, int n, double tol) {
  require_d3(f, "double_caustic_test");
  if (f.type_index(gamma1) != 1) throw DomainError("double_caustic_test: gamma1 must lie in (a3, a2)");
  if (n < 1) throw DomainError("double_caustic_test: n must be positive");
  RankReport rep;
  if (n % 2 != 0) {
    rep.cases.push_back(gated(RankCase::even, false));
    rep.cases.push_back(gated(RankCase::even_hyperboloids, false));
    return rep;
  }
  const int m = n / 2, K = 2 * n + 2;
  auto y3 = sqrt_series(product_of(f.axes()), K);
  if (n >= 6)
    rep.cases.push_back(hankel_verdict(RankCase::even, multiply_series(linear_factor(gamma1), y3), 4, m - 1, m - 2, tol));
  else
    rep.cases.push_back(gated(RankCase::even, true));
  if (n >= 4)
    rep.cases.push_back(hankel_verdict(RankCase::even_hyperboloids, divide_series(y3, linear_factor(gamma1)), 2, m, m - 1, tol));
  else
    rep.cases.push_back(gated(RankCase::even_hyperboloids, true));
  return rep;
}

// ---- determinants ----

namespace {

void check_variant(const CausticSet& c, int n, WeakVariant v, int primary) {
  if (n < 1) throw DomainError("weak determinant: n must be positive");
  switch (v) {
    case WeakVariant::odd_hankel:
      if (n % 2 == 0) throw DomainError("odd-hankel variant needs odd n");
      if (n < 5) throw DomainError("odd-hankel variant needs n >= 5");
      break;
    case WeakVariant::odd_M: {
      if (n % 2 == 0) throw DomainError("odd-M variant needs odd n");
      bool ok = c.types[0] == 0 || (c.types[0] == 1 && c.types[1] == 1);
      if (!ok) throw DomainError("odd-M variant needs an ellipsoid caustic or two 1-sheeted ones");
      break;
    }
    case WeakVariant::even_N:
      if (n % 2 != 0) throw DomainError("even-N variant needs even n");
      if (primary != 0 && primary != 1) throw DomainError("even-N variant needs primary 0 or 1");
      break;
  }
}

std::vector<int> variant_positions(const ConfocalFamily& f, const CausticSet& c, WeakVariant v, int primary) {
  auto b = merged_b(f, c);
  auto pos = [&](double g) {
    return static_cast<int>(std::find(b.begin(), b.end(), g) - b.begin()) + 1;
  };
  switch (v) {
    case WeakVariant::odd_hankel: return {};
    case WeakVariant::odd_M: return {pos(c.gammas[0]), pos(c.gammas[1])};
    case WeakVariant::even_N: return {pos(c.gammas[static_cast<size_t>(primary)])};
  }
  return {};
}

}  // namespace

Matrix<Real> weak_matrix(const ConfocalFamily& f, const CausticSet& c, int n, WeakVariant v, int primary) {
  require_d3(f, "weak_matrix");
  require_clean(c, 2, "weak_matrix");
  check_variant(c, n, v, primary);
  auto A = caustic_series(f, c, 2 * n + 2);
  auto At = [&](int idx) { return idx >= 0 ? A[static_cast<size_t>(idx)] : Real(0); };
  if (v == WeakVariant::odd_hankel) {
    const int k = (n - 1) / 2;
    Matrix<Real> M(k - 1, k - 1);
    for (int i = 0; i < k - 1; ++i)
      for (int j = 0; j < k - 1; ++j) M(i, j) = At(4 + i + j);
    return M;
  }
  Matrix<Real> M(n, n);
  if (v == WeakVariant::odd_M) {
    const int k = (n - 1) / 2;
    const Real g1 = R(c.gammas[0]), g2 = R(c.gammas[1]);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        Real e(0);
        if (j >= n - k + 1)
          e = At(i - 1 + j - n);
        else if (i + j == n - k + 1)
          e = g1 * g2;
        else if (i + j == n - k + 2)
          e = -g1 - g2;
        else if (i + j == n - k + 3)
          e = 1;
        M(i - 1, j - 1) = e;
      }
    return M;
  }
  const int k = n / 2;
  const Real g = R(c.gammas[static_cast<size_t>(primary)]);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      Real e(0);
      if (j >= n - k + 2)
        e = At(i - 1 + j - n);
      else if (i + j == n - k + 2)
        e = -g;
      else if (i + j == n - k + 3)
        e = 1;
      M(i - 1, j - 1) = e;
    }
  return M;
}

Matrix<Real> explicit_weak_matrix(const ConfocalFamily& f, const CausticSet& c, int n, WeakVariant v, int primary) {
  require_d3(f, "explicit_weak_matrix");
  require_clean(c, 2, "explicit_weak_matrix");
  check_variant(c, n, v, primary);
  if (n < 3 || n > 7) throw DomainError("explicit_weak_matrix: n must be in 3..7");
  auto A = caustic_series(f, c, 8);
  auto rows = [](std::initializer_list<std::initializer_list<Real>> r) {
    const int nr = static_cast<int>(r.size());
    Matrix<Real> M(nr, nr);
    int i = 0;
    for (const auto& row : r) {
      int j = 0;
      for (const auto& e : row) M(i, j++) = e;
      ++i;
    }
    return M;
  };
  const Real O(0), I(1);
  if (v == WeakVariant::odd_hankel) {
    if (n == 5) return rows({{A[4]}});
    return rows({{A[4], A[5]}, {A[5], A[6]}});
  }
  if (v == WeakVariant::odd_M) {
    const Real p = R(c.gammas[0]) * R(c.gammas[1]);
    const Real s = -(R(c.gammas[0]) + R(c.gammas[1]));
    if (n == 3) return rows({{O, p, A[0]}, {p, s, A[1]}, {s, I, A[2]}});
    if (n == 5)
      return rows({{O, O, p, O, A[0]},
                   {O, p, s, A[0], A[1]},
                   {p, s, I, A[1], A[2]},
                   {s, I, O, A[2], A[3]},
                   {I, O, O, A[3], A[4]}});
    return rows({{O, O, O, p, O, O, A[0]},
                 {O, O, p, s, O, A[0], A[1]},
                 {O, p, s, I, A[0], A[1], A[2]},
                 {p, s, I, O, A[1], A[2], A[3]},
                 {s, I, O, O, A[2], A[3], A[4]},
                 {I, O, O, O, A[3], A[4], A[5]},
                 {O, O, O, O, A[4], A[5], A[6]}});
  }
  const Real g = -R(c.gammas[static_cast<size_t>(primary)]);
  if (n == 4) return rows({{O, O, g, A[0]}, {O, g, I, A[1]}, {g, I, O, A[2]}, {I, O, O, A[3]}});
  return rows({{O, O, O, g, O, A[0]},
               {O, O, g, I, A[0], A[1]},
               {O, g, I, O, A[1], A[2]},
               {g, I, O, O, A[2], A[3]},
               {I, O, O, O, A[3], A[4]},
               {O, O, O, O, A[4], A[5]}});
}

Real weak_period_determinant(const ConfocalFamily& f, const CausticSet& c, int n, WeakVariant v, int primary) {
  if (n >= 3 && n <= 7) return determinant(explicit_weak_matrix(f, c, n, v, primary));
  return determinant(weak_matrix(f, c, n, v, primary));
}

// ---- families ----

std::vector<double> merged_b(const ConfocalFamily& f, const CausticSet& c) {
  std::vector<double> b = f.axes();
  b.insert(b.end(), c.gammas.begin(), c.gammas.end());
  std::sort(b.begin(), b.end());
  return b;
}

namespace {

struct FamilySetup {
  Polynomial<Real> F, G;
  int du = -1, dv = -1;
  Matrix<Real> M;
};

FamilySetup family_setup(const ConfocalFamily& f, const CausticSet& c, int n, int s, const std::vector<int>& pos) {
  if (static_cast<int>(c.gammas.size()) != f.d() - 1) throw DomainError("family: need d-1 caustics");
  if (c.degenerate) throw DomainError("family: degenerate caustics (" + c.note + ")");
  if (n < 1 || s < 0) throw DomainError("family: need n >= 1 and s >= 0");
  auto b = merged_b(f, c);
  std::vector<bool> inF(b.size(), false);
  for (int p : pos) {
    if (p < 1 || p > static_cast<int>(b.size())) throw DomainError("family: factor position out of range");
    if (inF[static_cast<size_t>(p - 1)]) throw DomainError("family: repeated factor position");
    inF[static_cast<size_t>(p - 1)] = true;
  }
  FamilySetup st;
  std::vector<double> fr, gr;
  for (size_t i = 0; i < b.size(); ++i) (inF[i] ? fr : gr).push_back(b[i]);
  st.F = product_of(fr);
  st.G = product_of(gr);
  st.du = floor_div2(n + s + 1 - st.F.degree());
  st.dv = floor_div2(n + s + 1 - st.G.degree());
  const int nu = std::max(st.du + 1, 0), nv = std::max(st.dv + 1, 0);
  if (nu + nv == 0) throw DomainError("family: no unknowns");
  auto y = sqrt_series(st.F * st.G, n).coeffs;
  st.M = Matrix<Real>(n, nu + nv);
  for (int i = 0; i < nu; ++i)
    for (int r = i; r < n; ++r) st.M(r, i) = st.F.coeff(r - i);
  for (int j = 0; j < nv; ++j)
    for (int r = j; r < n; ++r) st.M(r, nu + j) = y[static_cast<size_t>(r - j)];
  return st;
}

}  // namespace

Matrix<Real> family_matrix(const ConfocalFamily& f, const CausticSet& c, int n, int s, const std::vector<int>& pos) {
  return family_setup(f, c, n, s, pos).M;
}

Real family_determinant(const ConfocalFamily& f, const CausticSet& c, int n, int s, const std::vector<int>& pos) {
  auto M = family_matrix(f, c, n, s, pos);
  if (M.rows != M.cols) throw DomainError("family_determinant: system is not square");
  return determinant(M);
}

FamilyFit fit_family(const ConfocalFamily& f, const CausticSet& c, int n, int s, const std::vector<int>& pos, double tol) {
  auto st = family_setup(f, c, n, s, pos);
  // pad with zero rows so the Jacobi sweep sees every column
  Matrix<Real> work = st.M;
  if (work.rows < work.cols) {
    work = Matrix<Real>(st.M.cols, st.M.cols);
    for (int i = 0; i < st.M.rows; ++i)
      for (int j = 0; j < st.M.cols; ++j) work(i, j) = st.M(i, j);
  }
  auto sv = svd(work);
  const int N = st.M.cols;
  FamilyFit fit;
  fit.n = n;
  fit.s = s;
  fit.F_positions = pos;
  fit.F = st.F;
  fit.G = st.G;
  const Real top = sv.sigma.front();
  if (top == 0) throw NumericError("fit_family: zero system");
  fit.kernel_residual = to_double(Real(sv.sigma[static_cast<size_t>(N - 1)] / top));
  fit.next_sigma = N >= 2 ? to_double(Real(sv.sigma[static_cast<size_t>(N - 2)] / top)) : 1.0;
  if (fit.kernel_residual > tol) throw NumericError("fit_family: system is not singular (kernel dimension 0)");
  if (fit.next_sigma <= tol) throw NumericError("fit_family: kernel dimension exceeds one");
  const int nu = std::max(st.du + 1, 0);
  std::vector<Real> u, v;
  for (int i = 0; i < N; ++i) (i < nu ? u : v).push_back(sv.v(i, N - 1));
  fit.U = Polynomial<Real>(u);
  fit.V = Polynomial<Real>(v);
  fit.rho = st.F * fit.U * fit.U - st.G * fit.V * fit.V;
  Real low(0), all(0);
  for (int k = 0; k <= fit.rho.degree(); ++k) {
    Real a = scalar_abs(fit.rho.coeff(k));
    all = std::max(all, a);
    if (k < n) low = std::max(low, a);
  }
  fit.zero_residual = all == 0 ? 1.0 : to_double(Real(low / all));
  fit.r = fit.rho.drop_low(n);
  if (fit.r.degree() >= 1)
    for (const auto& rt : all_real_roots(fit.r)) fit.alphas.push_back(to_double(rt.value));
  return fit;
}

// ---- certificates ----

namespace {

struct SignPlan {
  std::vector<std::pair<double, int>> checks;  // -inf stands for the leading behaviour
  double lo, hi;
};

int sign_at(const Polynomial<Real>& p, double x) {
  Real v = std::isinf(x) ? Real(p.leading() * ((p.degree() % 2) ? Real(-1) : Real(1))) : p(R(x));
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

SignPlan sign_plan(const ConfocalFamily& f, const CausticSet& c, WeakVariant v, int primary) {
  const double a1 = f.a(0), a2 = f.a(1), a3 = f.a(2);
  const double inf = -std::numeric_limits<double>::infinity();
  if (v == WeakVariant::odd_hankel || (v == WeakVariant::odd_M && c.types[0] == 1))
    return {{{inf, 1}, {a3, 1}}, inf, a3};
  if (v == WeakVariant::odd_M) {
    const double g2 = c.gammas[1];
    if (c.types[1] == 1) return {{{g2, -1}, {a3, 1}}, a3, g2};
    return {{{g2, -1}, {a1, 1}}, g2, a1};
  }
  const double gp = c.gammas[static_cast<size_t>(primary)], go = c.gammas[static_cast<size_t>(1 - primary)];
  const int tp = c.types[static_cast<size_t>(primary)], to = c.types[static_cast<size_t>(1 - primary)];
  if (tp == 0) return {{{inf, 1}, {gp, -1}}, inf, gp};
  if (tp == 1) {
    if (to == 0) return {{{gp, -1}, {a3, 1}}, a3, gp};
    if (to == 1) {
      int sg = go > gp ? 1 : -1;
      return {{{gp, sg}, {go, -sg}}, std::min(gp, go), std::max(gp, go)};
    }
    return {{{gp, 1}, {a2, -1}}, gp, a2};
  }
  return {{{gp, 1}, {a1, -1}}, gp, a1};
}

std::string interval_name(const ConfocalFamily& f, double x) {
  if (x < f.a(2)) return "(-inf,a3)";
  if (x < f.a(1)) return "(a3,a2)";
  if (x < f.a(0)) return "(a2,a1)";
  return "(a1,inf)";
}

struct Candidate {
  WeakVariant v;
  int primary;
};

}  // namespace

WeakCertificate weak_certificate(const ConfocalFamily& f, const CausticSet& c, int n, std::optional<WeakVariant> variant,
                                 int primary, double tol) {
  require_d3(f, "weak_certificate");
  require_clean(c, 2, "weak_certificate");
  std::vector<Candidate> cands;
  if (variant) {
    int pr = *variant == WeakVariant::even_N ? primary : -1;
    if (*variant == WeakVariant::even_N && pr < 0) {
      check_variant(c, n, *variant, 0);
      cands = {{*variant, 0}, {*variant, 1}};
    } else {
      check_variant(c, n, *variant, pr);
      cands = {{*variant, pr}};
    }
  } else if (n % 2 == 0) {
    cands = {{WeakVariant::even_N, 0}, {WeakVariant::even_N, 1}};
  } else {
    if (n >= 5) cands.push_back({WeakVariant::odd_hankel, -1});
    if (c.types[0] == 0 || (c.types[0] == 1 && c.types[1] == 1)) cands.push_back({WeakVariant::odd_M, -1});
    if (cands.empty()) throw DomainError("weak_certificate: no admissible variant for these caustics and n");
  }
  // pick the candidate whose system is closest to singular
  Candidate best = cands.front();
  double best_res = std::numeric_limits<double>::infinity();
  for (const auto& cd : cands) {
    auto M = family_matrix(f, c, n, 0, variant_positions(f, c, cd.v, cd.primary));
    auto sv = singular_values(M);
    double res = to_double(Real(sv.back() / sv.front()));
    if (res < best_res) {
      best_res = res;
      best = cd;
    }
  }
  WeakCertificate cert;
  cert.n = n;
  cert.variant = best.v;
  cert.primary = best.primary;
  cert.axes = f.axes();
  cert.caustics = c;
  cert.fit = fit_family(f, c, n, 0, variant_positions(f, c, best.v, best.primary), tol);
  if (cert.fit.alphas.size() != 1) {
    cert.note = "rho / x^n has no single real root";
    return cert;
  }
  cert.alpha = cert.fit.alphas.front();
  cert.interval = interval_name(f, cert.alpha);
  cert.quadric_type = f.type_index(cert.alpha);
  auto plan = sign_plan(f, c, best.v, best.primary);
  cert.lo = plan.lo;
  cert.hi = plan.hi;
  bool signs_ok = true;
  for (const auto& [x, e] : plan.checks) {
    int o = sign_at(cert.fit.rho, x);
    cert.signs.push_back({x, e, o});
    signs_ok = signs_ok && o == e;
  }
  bool inside = cert.alpha > plan.lo && cert.alpha < plan.hi && cert.alpha != 0;
  cert.consistent = signs_ok && inside && cert.fit.zero_residual <= tol;
  if (!signs_ok) cert.note = "sign table differs from the case analysis";
  else if (!inside) cert.note = "alpha outside the certified interval";
  else if (!cert.consistent) cert.note = "low-order coefficients of rho do not vanish";
  return cert;
}

std::string certificate_json(const WeakCertificate& cert) {
  nlohmann::json j;
  j["n"] = cert.n;
  j["case"] = to_string(cert.variant);
  if (cert.variant == WeakVariant::even_N) j["primary_gamma"] = cert.caustics.gammas[static_cast<size_t>(cert.primary)];
  std::vector<double> rho;
  for (const auto& x : cert.fit.rho.coeffs()) rho.push_back(to_double(x));
  j["rho"] = rho;
  j["alpha"] = cert.alpha;
  j["interval"] = cert.interval;
  j["quadric_type"] = cert.quadric_type;
  j["consistent"] = cert.consistent;
  j["residuals"] = {{"kernel", cert.fit.kernel_residual}, {"zero_order", cert.fit.zero_residual}};
  if (!cert.note.empty()) j["note"] = cert.note;
  return j.dump(2);
}

WeakPellTriple build_weak_pell_triple(const FamilyFit& fit, const ConfocalFamily& f, const CausticSet& c, double tol) {
  WeakPellTriple t;
  auto head = fit.r.shift(fit.n);
  t.p = fit.F * fit.U * fit.U - head / Real(2);
  t.q = fit.U * fit.V;
  t.r = fit.r / Real(2);
  t.report = verify_weak_pell(t.p, t.q, t.r, f, c, fit.n, fit.s, tol);
  return t;
}

WeakPellTriple build_weak_pell_triple(const WeakCertificate& cert, double tol) {
  return build_weak_pell_triple(cert.fit, ConfocalFamily(cert.axes), cert.caustics, tol);
}

// ---- elliptic coordinates ----

std::vector<int> elliptic_positions(int n, int alpha_type, int eps1, int eps2) {
  if (alpha_type < 0 || alpha_type > 2 || (eps1 & ~1) || (eps2 & ~1)) throw DomainError("elliptic_positions: bad variant");
  const bool odd = n % 2 != 0;
  std::vector<int> p;
  // b_1 joins F for ellipsoids with even n and hyperboloids with odd n
  if ((alpha_type == 0) != odd) p.push_back(1);
  if (alpha_type == 1) {
    p.push_back(eps1 ? 2 : 3);
  } else if (eps1) {
    p.push_back(2);
    p.push_back(3);
  }
  if (alpha_type == 2) {
    p.push_back(eps2 ? 4 : 5);
  } else if (eps2) {
    p.push_back(4);
    p.push_back(5);
  }
  return p;
}

bool EllipticScan::any() const {
  return std::any_of(variants.begin(), variants.end(), [](const EllipticVariant& v) { return v.admits && v.alpha_certified; });
}

EllipticScan elliptic_weak_scan(const ConfocalFamily& f, const CausticSet& c, int n, double tol) {
  require_d3(f, "elliptic_weak_scan");
  require_clean(c, 2, "elliptic_weak_scan");
  auto b = merged_b(f, c);
  EllipticScan scan;
  for (int t = 0; t < 3; ++t)
    for (int e1 = 0; e1 < 2; ++e1)
      for (int e2 = 0; e2 < 2; ++e2) {
        EllipticVariant ev;
        ev.alpha_type = t;
        ev.eps1 = e1;
        ev.eps2 = e2;
        ev.F_positions = elliptic_positions(n, t, e1, e2);
        if (t == 0) {
          ev.lo = -std::numeric_limits<double>::infinity();
          ev.hi = b[0];
        } else {
          ev.lo = b[static_cast<size_t>(2 * t - 1)];
          ev.hi = b[static_cast<size_t>(2 * t)];
        }
        auto M = family_matrix(f, c, n, 0, ev.F_positions);
        auto sv = singular_values(M);
        ev.kernel_residual = to_double(Real(sv.back() / sv.front()));
        if (ev.kernel_residual <= tol) {
          try {
            auto fit = fit_family(f, c, n, 0, ev.F_positions, tol);
            ev.admits = fit.zero_residual <= tol && fit.alphas.size() == 1;
            if (ev.admits) {
              ev.alpha = fit.alphas.front();
              ev.alpha_certified = ev.alpha > ev.lo && ev.alpha < ev.hi && ev.alpha != 0;
            }
          } catch (const NumericError&) {
            ev.admits = false;
          }
        }
        scan.variants.push_back(ev);
      }
  return scan;
}

// ---- sweeps ----

std::vector<std::vector<double>> sweep_caustic(const std::vector<double>& gammas, int gamma_index, double lo, double hi,
                                               const std::function<double(const std::vector<double>&)>& cond, int samples,
                                               double xtol) {
  if (gamma_index < 0 || gamma_index >= static_cast<int>(gammas.size())) throw DomainError("sweep_caustic: bad index");
  if (!(lo < hi) || samples < 2) throw DomainError("sweep_caustic: bad range");
  auto at = [&](double x) {
    auto g = gammas;
    g[static_cast<size_t>(gamma_index)] = x;
    return cond(g);
  };
  std::vector<std::vector<double>> roots;
  double x0 = lo, v0 = at(lo);
  for (int i = 1; i <= samples; ++i) {
    double x1 = lo + (hi - lo) * i / samples, v1 = at(x1);
    if (v0 == 0) {
      auto g = gammas;
      g[static_cast<size_t>(gamma_index)] = x0;
      roots.push_back(g);
    } else if ((v0 < 0) != (v1 < 0) && v1 != 0) {
      auto stop = [xtol](double a, double b2) { return std::abs(b2 - a) <= xtol; };
      auto br = boost::math::tools::bisect(at, x0, x1, stop);
      auto g = gammas;
      g[static_cast<size_t>(gamma_index)] = 0.5 * (br.first + br.second);
      roots.push_back(g);
    }
    x0 = x1;
    v0 = v1;
  }
  return roots;
}

}  // namespace billiards
