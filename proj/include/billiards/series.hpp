#pragma once

#include "billiards/linalg.hpp"
#include "billiards/polynomial.hpp"

#include <string>
#include <vector>

namespace billiards {

// Taylor prefix a_0..a_{K-1} at x = 0.
template <class T>
struct SeriesPrefix {
  std::vector<T> coeffs;
  std::string source;

  size_t size() const { return coeffs.size(); }
  const T& operator[](size_t k) const { return coeffs[k]; }
};

// Branch with a_0 = +sqrt(P(0)).
template <class T>
SeriesPrefix<T> sqrt_series(const Polynomial<T>& P, int K) {
  if (K < 1) throw DomainError("sqrt_series: K must be positive");
  const T p0 = P.coeff(0);
  if (!(p0 > 0)) throw DomainError("sqrt_series: P(0) must be positive");
  std::vector<T> a(static_cast<size_t>(K), T(0));
  a[0] = scalar_sqrt(p0);
  const T two_a0 = T(2 * a[0]);
  for (int k = 1; k < K; ++k) {
    T acc = P.coeff(k);
    for (int j = 1; j < k; ++j) acc -= a[static_cast<size_t>(j)] * a[static_cast<size_t>(k - j)];
    a[static_cast<size_t>(k)] = T(acc / two_a0);
  }
  return {std::move(a), "sqrt"};
}

// Series of s(x) / D(x) for a known prefix s.
template <class T>
SeriesPrefix<T> divide_series(const SeriesPrefix<T>& s, const Polynomial<T>& D) {
  const T d0 = D.coeff(0);
  if (d0 == 0) throw DomainError("divide_series: D(0) = 0");
  const int K = static_cast<int>(s.size());
  std::vector<T> q(static_cast<size_t>(K), T(0));
  for (int k = 0; k < K; ++k) {
    T acc = s.coeffs[static_cast<size_t>(k)];
    for (int j = 1; j <= std::min(k, D.degree()); ++j) acc -= D.coeff(j) * q[static_cast<size_t>(k - j)];
    q[static_cast<size_t>(k)] = T(acc / d0);
  }
  return {std::move(q), s.source + "/poly"};
}

// Series of M(x) * s(x), truncated to the length of s.
template <class T>
SeriesPrefix<T> multiply_series(const Polynomial<T>& M, const SeriesPrefix<T>& s) {
  const int K = static_cast<int>(s.size());
  std::vector<T> r(static_cast<size_t>(K), T(0));
  for (int k = 0; k < K; ++k)
    for (int j = 0; j <= std::min(k, M.degree()); ++j) r[static_cast<size_t>(k)] += M.coeff(j) * s.coeffs[static_cast<size_t>(k - j)];
  return {std::move(r), "poly*" + s.source};
}

template <class T>
SeriesPrefix<T> quotient_series(const Polynomial<T>& P, const Polynomial<T>& D, int K) {
  if (D.coeff(0) == 0) throw DomainError("quotient_series: D(0) = 0");
  auto s = divide_series(sqrt_series(P, K), D);
  s.source = "sqrt/poly";
  return s;
}

// M[i][j] = s[start + i + j]
template <class T>
Matrix<T> hankel_matrix(const SeriesPrefix<T>& s, int start, int rows, int cols) {
  if (start < 0 || rows < 0 || cols < 0) throw DomainError("hankel_matrix: negative shape");
  if (rows > 0 && cols > 0 && static_cast<size_t>(start + rows + cols - 1) > s.size())
    throw DomainError("hankel_matrix: series too short");
  Matrix<T> m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = s.coeffs[static_cast<size_t>(start + i + j)];
  return m;
}

template <class T>
int hankel_rank(const SeriesPrefix<T>& s, int start, int rows, int cols, double tol = 1e-10) {
  return numerical_rank(hankel_matrix(s, start, rows, cols), tol);
}

}  // namespace billiards
