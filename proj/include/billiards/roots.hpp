#pragma once

#include "billiards/polynomial.hpp"

#include <vector>

namespace billiards {

template <class T>
struct RealRoot {
  T value;
  bool odd;  // multiplicity parity
};

struct RootOptions {
  double xtol = 0.0;  // 0 means: refine to the working precision
  int max_iter = 4000;
};

namespace detail {

template <class T>
int sgn(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

// Sign-variation count of a Sturm chain at x.
inline int sturm_variations(const std::vector<Polynomial<Rational>>& chain, const Rational& x) {
  int count = 0, last = 0;
  for (const auto& p : chain) {
    int s = sgn(p(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

inline int multiplicity_at(Polynomial<Rational> p, const Rational& r) {
  int m = 0;
  const Polynomial<Rational> lin{Rational(-r), Rational(1)};
  while (!p.is_zero() && p(r) == 0) {
    p = divmod(p, lin).first;
    ++m;
  }
  return m;
}

inline std::vector<RealRoot<Rational>> isolate_rational(const Polynomial<Rational>& p, const Rational& lo, const Rational& hi,
                                                        const RootOptions& opt) {
  Polynomial<Rational> sqf = divmod(p, gcd(p, p.derivative())).first;
  std::vector<Polynomial<Rational>> chain{sqf, sqf.derivative()};
  while (chain.back().degree() > 0) {
    auto r = divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(-r);
  }
  std::vector<RealRoot<Rational>> out;
  const Rational tol = opt.xtol > 0 ? Rational(opt.xtol) : Rational(1, 1000000000000000LL);

  auto push_exact = [&](const Rational& r) { out.push_back({r, multiplicity_at(p, r) % 2 == 1}); };
  if (sqf(lo) == 0) push_exact(lo);

  // Roots in (a, b] = V(a) - V(b).
  struct Job {
    Rational a, b;
  };
  std::vector<Job> stack{{lo, hi}};
  int budget = opt.max_iter * 64;
  while (!stack.empty()) {
    if (--budget < 0) throw NumericError("isolate_real_roots: Sturm isolation did not converge");
    Job j = stack.back();
    stack.pop_back();
    int n = sturm_variations(chain, j.a) - sturm_variations(chain, j.b);
    if (n == 0) continue;
    if (n == 1) {
      Rational a = j.a, b = j.b;
      const int va = sturm_variations(chain, a);
      bool exact = false;
      for (int it = 0; b - a > tol; ++it) {
        if (it > opt.max_iter) throw NumericError("isolate_real_roots: bisection budget exceeded");
        Rational mid = (a + b) / 2;
        if (sqf(mid) == 0) {
          a = b = mid;
          exact = true;
          break;
        }
        if (va - sturm_variations(chain, mid) == 1)
          b = mid;
        else
          a = mid;
      }
      if (exact || sqf(b) == 0) {
        push_exact(b);
        continue;
      }
      // Left probe strictly below the root, even when a itself is a root of p.
      Rational left = a;
      while (sqf(left) == 0) left = (left + (a + b) / 2) / 2;
      while (va - sturm_variations(chain, left) != 0 || sqf(left) == 0) left = (a + left) / 2;
      out.push_back({(a + b) / 2, sgn(p(left)) != sgn(p(b))});
      continue;
    }
    Rational mid = (j.a + j.b) / 2;
    stack.push_back({mid, j.b});
    stack.push_back({j.a, mid});
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
  return out;
}

template <class T>
T bisect_sign(const Polynomial<T>& p, T a, T b, int sa, const RootOptions& opt) {
  const T xtol(opt.xtol);
  const T eps = scalar_epsilon<T>();
  for (int it = 0; it < opt.max_iter; ++it) {
    T mid = T((a + b) / 2);
    if (mid <= a || mid >= b) return mid;
    T width = T(b - a);
    T scale = std::max(scalar_abs(a), scalar_abs(b));
    if (width <= xtol || width <= T(2 * eps * scale)) return mid;
    int sm = sgn(p(mid));
    if (sm == 0) return mid;
    if (sm == sa)
      a = mid;
    else
      b = mid;
  }
  throw NumericError("isolate_real_roots: bisection budget exceeded");
}

// Roots of p on [lo, hi] via the critical points of p (roots of p').
// p is monotone between consecutive critical points.
template <class T>
std::vector<RealRoot<T>> isolate_floating(const Polynomial<T>& p, const T& lo, const T& hi, const RootOptions& opt) {
  std::vector<RealRoot<T>> out;
  if (p.degree() <= 0) return out;
  if (p.degree() == 1) {
    T r = T(-p.coeff(0) / p.coeff(1));
    if (r >= lo && r <= hi) out.push_back({r, true});
    return out;
  }
  const T eps = scalar_epsilon<T>();
  auto small = [&](const T& v, const T& x) { return scalar_abs(v) <= T(64 * eps * eval_magnitude(p, x)); };

  std::vector<T> pts{lo};
  for (const auto& c : isolate_floating(p.derivative(), lo, hi, opt))
    if (c.value > pts.back() && c.value < hi) pts.push_back(c.value);
  if (hi > pts.back()) pts.push_back(hi);

  std::vector<T> vals;
  for (const T& x : pts) vals.push_back(p(x));
  const size_t n = pts.size();
  for (size_t i = 0; i < n; ++i) {
    if (small(vals[i], pts[i])) {
      int left = 0, right = 0;
      if (i > 0) left = sgn(p(T((pts[i - 1] + pts[i]) / 2)));
      if (i + 1 < n) right = sgn(p(T((pts[i] + pts[i + 1]) / 2)));
      bool odd;
      if (left != 0 && right != 0)
        odd = left != right;
      else
        odd = !small(p.derivative()(pts[i]), pts[i]);
      if (out.empty() || out.back().value < pts[i]) out.push_back({pts[i], odd});
    }
    if (i + 1 < n && !small(vals[i], pts[i]) && !small(vals[i + 1], pts[i + 1]) && sgn(vals[i]) != sgn(vals[i + 1])) {
      out.push_back({bisect_sign(p, pts[i], pts[i + 1], sgn(vals[i]), opt), true});
    }
  }
  return out;
}

}  // namespace detail

// All real roots of p in [lo, hi], ascending, each with its multiplicity parity.
template <class T>
std::vector<RealRoot<T>> isolate_real_roots(const Polynomial<T>& p, const T& lo, const T& hi, const RootOptions& opt = {}) {
  if (!(lo < hi)) throw DomainError("isolate_real_roots: need lo < hi");
  if (p.is_zero()) throw DomainError("isolate_real_roots: zero polynomial");
  if constexpr (is_exact_v<T>)
    return detail::isolate_rational(p, lo, hi, opt);
  else
    return detail::isolate_floating(p, lo, hi, opt);
}

// Cauchy bound: every root satisfies |x| <= bound.
template <class T>
T root_bound(const Polynomial<T>& p) {
  if (p.degree() < 1) return T(1);
  T m(0);
  for (int k = 0; k < p.degree(); ++k) m = std::max(m, T(scalar_abs(p.coeff(k)) / scalar_abs(p.leading())));
  return T(1 + m);
}

template <class T>
std::vector<RealRoot<T>> all_real_roots(const Polynomial<T>& p, const RootOptions& opt = {}) {
  T b = root_bound(p);
  return isolate_real_roots(p, T(-b), b, opt);
}

}  // namespace billiards
