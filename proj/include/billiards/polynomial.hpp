#pragma once

#include "billiards/scalar.hpp"

#include <algorithm>
#include <initializer_list>
#include <utility>
#include <vector>

namespace billiards {

// Dense univariate polynomial, coefficients in ascending degree. The zero
// polynomial has no stored coefficients and degree -1. Mixing scalar kinds is
// a compile error; use convert<U>() to change kind explicitly.
template <class T>
class Polynomial {
  static_assert(is_scalar_v<T>, "Polynomial scalar must be double, Real or Rational");

 public:
  using scalar_type = T;

  Polynomial() = default;
  Polynomial(std::initializer_list<T> c) : c_(c) { trim(); }
  explicit Polynomial(std::vector<T> c) : c_(std::move(c)) { trim(); }

  static Polynomial constant(const T& v) { return Polynomial(std::vector<T>{v}); }
  static Polynomial identity() { return Polynomial(std::vector<T>{T(0), T(1)}); }
  static Polynomial monomial(const T& coef, int k) {
    std::vector<T> c(static_cast<size_t>(k) + 1, T(0));
    c.back() = coef;
    return Polynomial(std::move(c));
  }
  // lead * prod (x - r)
  static Polynomial from_roots(const std::vector<T>& roots, const T& lead = T(1)) {
    Polynomial p = constant(lead);
    for (const T& r : roots) p *= Polynomial{T(-r), T(1)};
    return p;
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<T>& coeffs() const { return c_; }
  T coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<size_t>(k)] : T(0);
  }
  T leading() const { return c_.empty() ? T(0) : c_.back(); }

  T operator()(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = T(acc * x + *it);
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = T(c_[k] * static_cast<int>(k));
    return Polynomial(std::move(d));
  }

  // p(q(x))
  Polynomial compose(const Polynomial& q) const {
    Polynomial acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q + constant(*it);
    return acc;
  }

  Polynomial pow(int e) const {
    Polynomial r = constant(T(1)), b = *this;
    while (e > 0) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  // Multiply by x^k.
  Polynomial shift(int k) const {
    if (is_zero() || k == 0) return *this;
    std::vector<T> c(static_cast<size_t>(k), T(0));
    c.insert(c.end(), c_.begin(), c_.end());
    return Polynomial(std::move(c));
  }

  // Coefficients of x^k and above, divided by x^k.
  Polynomial drop_low(int k) const {
    if (k >= static_cast<int>(c_.size())) return {};
    return Polynomial(std::vector<T>(c_.begin() + k, c_.end()));
  }

  Polynomial truncate(int k) const {
    if (k >= static_cast<int>(c_.size())) return *this;
    return Polynomial(std::vector<T>(c_.begin(), c_.begin() + k));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) {
    *this = *this * o;
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }
  Polynomial& operator/=(const T& s) {
    if (s == 0) throw DomainError("polynomial division by zero scalar");
    for (auto& v : c_) v /= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) {
    for (auto& v : a.c_) v = T(-v);
    return a;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator/(Polynomial a, const T& s) { return a /= s; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<T> c_;
};

template <class T>
T eval(const Polynomial<T>& p, const T& x) {
  return p(x);
}

template <class U, class T>
Polynomial<U> convert(const Polynomial<T>& p) {
  std::vector<U> c;
  c.reserve(p.coeffs().size());
  for (const T& v : p.coeffs()) {
    if constexpr (std::is_same_v<U, double>) {
      c.push_back(to_double(v));
    } else if constexpr (std::is_same_v<T, double>) {
      c.push_back(U(v));
    } else {
      c.push_back(static_cast<U>(v));
    }
  }
  return Polynomial<U>(std::move(c));
}

// Euclidean division. Exact for rationals; for floating scalars the remainder
// carries rounding error.
template <class T>
std::pair<Polynomial<T>, Polynomial<T>> divmod(const Polynomial<T>& a, const Polynomial<T>& b) {
  if (b.is_zero()) throw DomainError("polynomial division by zero");
  if (a.degree() < b.degree()) return {Polynomial<T>{}, a};
  std::vector<T> r = a.coeffs();
  const int db = b.degree();
  std::vector<T> q(static_cast<size_t>(a.degree() - db) + 1, T(0));
  const T lb = b.leading();
  for (int k = a.degree() - db; k >= 0; --k) {
    T f = T(r[static_cast<size_t>(k + db)] / lb);
    q[static_cast<size_t>(k)] = f;
    for (int j = 0; j <= db; ++j) r[static_cast<size_t>(k + j)] -= f * b.coeff(j);
    r[static_cast<size_t>(k + db)] = T(0);
  }
  r.resize(static_cast<size_t>(std::max(db, 0)));
  return {Polynomial<T>(std::move(q)), Polynomial<T>(std::move(r))};
}

// Monic gcd over the rationals.
inline Polynomial<Rational> gcd(Polynomial<Rational> a, Polynomial<Rational> b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.is_zero()) a /= a.leading();
  return a;
}

template <class T>
T max_abs_coeff(const Polynomial<T>& p) {
  T m(0);
  for (const T& v : p.coeffs()) m = std::max(m, scalar_abs(v));
  return m;
}

// Sum |c_k| |x|^k, the natural scale for judging |p(x)| against rounding.
template <class T>
T eval_magnitude(const Polynomial<T>& p, const T& x) {
  T acc(0);
  T ax = scalar_abs(x);
  for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) acc = T(acc * ax + scalar_abs(*it));
  return acc;
}

}  // namespace billiards
