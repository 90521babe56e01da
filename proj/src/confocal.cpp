#include "billiards/confocal.hpp"

#include "billiards/roots.hpp"

#include <algorithm>
#include <cmath>

namespace billiards {

ConfocalFamily::ConfocalFamily(std::vector<double> axes) : axes_(std::move(axes)) {
  if (axes_.size() < 2) throw DomainError("confocal family needs d >= 2");
  for (size_t i = 0; i < axes_.size(); ++i) {
    if (!(axes_[i] > 0)) throw DomainError("axes must be positive");
    if (i > 0 && !(axes_[i] < axes_[i - 1])) throw DomainError("axes must be strictly decreasing");
  }
}

double ConfocalFamily::pencil_value(double lambda, const Vec& x) const {
  double s = 0;
  for (int i = 0; i < d(); ++i) s += x[i] * x[i] / (a(i) - lambda);
  return s;
}

Vec ConfocalFamily::pencil_gradient(double lambda, const Vec& x) const {
  Vec g(d());
  for (int i = 0; i < d(); ++i) g[i] = 2 * x[i] / (a(i) - lambda);
  return g;
}

int ConfocalFamily::type_index(double lambda, double tol) const {
  int below = 0;
  for (double ai : axes_) {
    if (std::abs(lambda - ai) <= tol) return -1;
    if (ai < lambda) ++below;
  }
  return below;
}

std::string ConfocalFamily::type_name(double lambda, double tol) const {
  int t = type_index(lambda, tol);
  if (t < 0) return "degenerate";
  if (t == 0) return "ellipsoid";
  if (t == d()) return "imaginary";
  if (d() == 3) return t == 1 ? "1-sheeted hyperboloid" : "2-sheeted hyperboloid";
  return "hyperboloid-" + std::to_string(t);
}

Line::Line(Vec p, Vec v) : point(std::move(p)), direction(std::move(v)) {
  double n = direction.norm();
  if (!(n > 0)) throw DomainError("line direction must be nonzero");
  direction /= n;
}

IntervalSystem IntervalSystem::from_endpoints(std::vector<double> c_desc) {
  if (c_desc.size() < 2 || c_desc.size() % 2 != 0) throw DomainError("band system needs an even number of endpoints");
  for (size_t i = 1; i < c_desc.size(); ++i)
    if (!(c_desc[i] < c_desc[i - 1])) throw DomainError("band endpoints must be strictly decreasing");
  IntervalSystem s;
  s.d = static_cast<int>(c_desc.size() / 2);
  s.c = std::move(c_desc);
  return s;
}

bool IntervalSystem::in_bands(double z, double tol) const {
  for (int p = 1; p <= d; ++p)
    if (z >= band_lo(p) - tol && z <= band_hi(p) + tol) return true;
  return false;
}

Polynomial<double> IntervalSystem::T() const { return Polynomial<double>::from_roots(c); }

std::vector<double> squared_coordinates(const ConfocalFamily& f, const std::vector<double>& lambdas) {
  const int d = f.d();
  std::vector<double> x2(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    double num = 1, den = 1;
    for (int j = 0; j < d; ++j) num *= f.a(i) - lambdas[static_cast<size_t>(j)];
    for (int k = 0; k < d; ++k)
      if (k != i) den *= f.a(i) - f.a(k);
    x2[static_cast<size_t>(i)] = num / den;
  }
  return x2;
}

JacobiPoint jacobi_coordinates(const ConfocalFamily& f, const Vec& x, double axis_tol) {
  const int d = f.d();
  if (x.size() != d) throw DomainError("jacobi_coordinates: dimension mismatch");
  // Coordinates with x_k = 0 contribute the root lambda = a_k exactly; the rest
  // solve sum_{i in S} x_i^2/(a_i - lambda) = 1, one root per pole interval.
  std::vector<int> active;
  std::vector<double> lambdas;
  for (int i = 0; i < d; ++i) {
    if (x[i] != 0.0)
      active.push_back(i);
    else
      lambdas.push_back(f.a(i));
  }
  auto g = [&](double lam) {
    double s = -1;
    for (int i : active) s += x[i] * x[i] / (f.a(i) - lam);
    return s;
  };
  auto bisect = [&](double lo, double hi) {
    // g increases on each pole interval; endpoints are never evaluated.
    for (int it = 0; it < 2000; ++it) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) return mid;
      if (g(mid) > 0)
        hi = mid;
      else
        lo = mid;
    }
    throw NumericError("jacobi_coordinates: root isolation failed");
  };
  const double r2 = x.squaredNorm();
  for (size_t k = 0; k < active.size(); ++k) {
    double hi = f.a(active[active.size() - 1 - k]);
    double lo;
    if (k == 0) {
      lo = hi - r2 - 1e-12 * (1 + std::abs(hi));
      if (g(lo) > 0) throw NumericError("jacobi_coordinates: lower bracket invalid");
    } else {
      lo = f.a(active[active.size() - k]);
    }
    lambdas.push_back(bisect(lo, hi));
  }
  std::sort(lambdas.begin(), lambdas.end());
  JacobiPoint j;
  j.lambdas = lambdas;
  for (int i = 0; i < d; ++i) j.signs.push_back(x[i] < 0 ? -1 : 1);
  for (double lam : lambdas) j.on_axis.push_back(f.type_index(lam, axis_tol) < 0);
  return j;
}

Vec cartesian_from_jacobi(const ConfocalFamily& f, const JacobiPoint& j, double tol) {
  const int d = f.d();
  if (static_cast<int>(j.lambdas.size()) != d) throw DomainError("cartesian_from_jacobi: dimension mismatch");
  // lambda_1 <= a_d <= lambda_2 <= a_{d-1} <= ... <= lambda_d <= a_1
  for (int k = 0; k < d; ++k) {
    double lam = j.lambdas[static_cast<size_t>(k)];
    double upper = f.a(d - 1 - k);
    double lower = k == 0 ? -INFINITY : f.a(d - k);
    if (lam > upper + tol || lam < lower - tol) throw DomainError("cartesian_from_jacobi: lambdas do not interlace the axes");
  }
  auto x2 = squared_coordinates(f, j.lambdas);
  Vec x(d);
  for (int i = 0; i < d; ++i) {
    double v = x2[static_cast<size_t>(i)];
    if (v < -tol * (1 + f.a(0))) throw DomainError("cartesian_from_jacobi: negative squared coordinate");
    double s = j.signs.empty() ? 1.0 : j.signs[static_cast<size_t>(i)];
    x[i] = s * std::sqrt(std::max(v, 0.0));
  }
  return x;
}

double tangency_value(const ConfocalFamily& f, const Line& line, double lambda) {
  const int d = f.d();
  const Vec& p = line.point;
  const Vec& v = line.direction;
  auto prod_except = [&](int i, int j) {
    double r = 1;
    for (int k = 0; k < d; ++k)
      if (k != i && k != j) r *= f.a(k) - lambda;
    return r;
  };
  double s = 0;
  for (int i = 0; i < d; ++i) s += v[i] * v[i] * prod_except(i, -1);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double m = p[i] * v[j] - p[j] * v[i];
      s -= m * m * prod_except(i, j);
    }
  return s;
}

Polynomial<double> tangency_polynomial(const ConfocalFamily& f, const Line& line) {
  const int d = f.d();
  const Vec& p = line.point;
  const Vec& v = line.direction;
  auto prod_except = [&](int i, int j) {
    Polynomial<double> r = Polynomial<double>::constant(1.0);
    for (int k = 0; k < d; ++k)
      if (k != i && k != j) r *= Polynomial<double>{f.a(k), -1.0};
    return r;
  };
  Polynomial<double> g;
  for (int i = 0; i < d; ++i) g += prod_except(i, -1) * (v[i] * v[i]);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double m = p[i] * v[j] - p[j] * v[i];
      g -= prod_except(i, j) * (m * m);
    }
  return g;
}

CausticSet make_caustics(const ConfocalFamily& f, std::vector<double> gammas, double axis_tol) {
  std::sort(gammas.begin(), gammas.end());
  CausticSet c;
  c.gammas = gammas;
  for (size_t k = 0; k < gammas.size(); ++k) {
    int t = f.type_index(gammas[k], axis_tol);
    c.types.push_back(t);
    if (t < 0) {
      c.degenerate = true;
      c.note = "caustic coincides with an axis value";
    }
    if (k > 0 && std::abs(gammas[k] - gammas[k - 1]) <= axis_tol) {
      c.degenerate = true;
      c.note = "repeated caustic parameter";
    }
  }
  return c;
}

CausticSet caustic_parameters(const ConfocalFamily& f, const Line& line, double axis_tol) {
  auto g = tangency_polynomial(f, line);
  const int d = f.d();
  if (g.degree() != d - 1) throw NumericError("caustic_parameters: tangency polynomial lost degree");
  auto roots = all_real_roots(g);
  std::vector<double> gammas;
  bool repeated = false;
  for (const auto& r : roots) {
    double lam = r.value;
    // Polish against the directly evaluated form, which avoids the
    // cancellation in the expanded coefficients.
    double h = 1e-7 * (1 + std::abs(lam));
    double lo = lam - h, hi = lam + h;
    double glo = tangency_value(f, line, lo), ghi = tangency_value(f, line, hi);
    if (r.odd && glo * ghi < 0) {
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double gm = tangency_value(f, line, mid);
        if (gm == 0) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0) == (glo < 0))
          lo = mid;
        else
          hi = mid;
      }
      lam = 0.5 * (lo + hi);
    }
    gammas.push_back(lam);
    if (!r.odd) {
      gammas.push_back(lam);
      repeated = true;
    }
  }
  if (static_cast<int>(gammas.size()) != d - 1) {
    CausticSet c = make_caustics(f, gammas, axis_tol);
    c.degenerate = true;
    c.note = "tangency polynomial has " + std::to_string(gammas.size()) + " real roots";
    return c;
  }
  CausticSet c = make_caustics(f, gammas, axis_tol);
  if (repeated) {
    c.degenerate = true;
    c.note = "double root of the tangency polynomial";
  }
  return c;
}

AudinReport audin_check(const ConfocalFamily& f, const CausticSet& c) {
  AudinReport r;
  std::vector<std::pair<double, int>> merged;  // value, -1 for axis or caustic index
  for (double a : f.axes()) merged.push_back({a, -1});
  std::vector<double> g = c.gammas;
  std::sort(g.begin(), g.end());
  for (size_t j = 0; j < g.size(); ++j) merged.push_back({g[j], static_cast<int>(j)});
  std::stable_sort(merged.begin(), merged.end(), [](auto& x, auto& y) { return x.first < y.first; });
  r.positions.assign(g.size(), 0);
  for (size_t i = 0; i < merged.size(); ++i) {
    r.b.push_back(merged[i].first);
    if (merged[i].second >= 0) r.positions[static_cast<size_t>(merged[i].second)] = static_cast<int>(i) + 1;
  }
  r.ok = static_cast<int>(g.size()) == f.d() - 1;
  for (size_t j = 0; j < g.size(); ++j) {
    int want = 2 * static_cast<int>(j) + 1;
    if (r.positions[j] != want && r.positions[j] != want + 1) r.ok = false;
  }
  return r;
}

IntervalSystem interval_system(const ConfocalFamily& f, const CausticSet& c, bool allow_degenerate) {
  if (c.degenerate && !allow_degenerate) throw DomainError("interval_system: degenerate caustics");
  if (static_cast<int>(c.gammas.size()) != f.d() - 1) throw DomainError("interval_system: need d-1 caustics");
  std::vector<double> b = f.axes();
  b.insert(b.end(), c.gammas.begin(), c.gammas.end());
  std::sort(b.begin(), b.end());
  for (size_t i = 0; i < b.size(); ++i) {
    if (!(b[i] > 0)) throw DomainError("interval_system: endpoints must be positive");
    if (i > 0 && !(b[i] > b[i - 1])) throw DomainError("interval_system: coincident endpoints");
  }
  IntervalSystem s;
  s.d = f.d();
  s.b = b;
  for (double v : b) s.c.push_back(1.0 / v);
  s.c.push_back(0.0);
  return s;
}

}  // namespace billiards
