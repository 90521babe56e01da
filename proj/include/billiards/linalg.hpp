#pragma once

#include "billiards/scalar.hpp"

#include <algorithm>
#include <vector>

namespace billiards {

// Small dense row-major matrix over any supported scalar.
template <class T>
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, T(0)) {}

  T& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

  Matrix transpose() const {
    Matrix t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }
};

template <class U, class T>
Matrix<U> convert_matrix(const Matrix<T>& m) {
  Matrix<U> r(m.rows, m.cols);
  for (size_t k = 0; k < m.data.size(); ++k) {
    if constexpr (std::is_same_v<U, double>)
      r.data[k] = to_double(m.data[k]);
    else
      r.data[k] = U(m.data[k]);
  }
  return r;
}

// Fraction-free Gaussian elimination (Bareiss). Exact rank and determinant
// over the rationals.
inline int exact_rank(Matrix<Rational> a) {
  int rank = 0;
  Rational prev(1);
  for (int col = 0; col < a.cols && rank < a.rows; ++col) {
    int piv = -1;
    for (int i = rank; i < a.rows; ++i)
      if (a(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      for (int j = 0; j < a.cols; ++j) std::swap(a(piv, j), a(rank, j));
    for (int i = rank + 1; i < a.rows; ++i) {
      for (int j = col + 1; j < a.cols; ++j)
        a(i, j) = (a(rank, col) * a(i, j) - a(i, col) * a(rank, j)) / prev;
      a(i, col) = 0;
    }
    prev = a(rank, col);
    ++rank;
  }
  return rank;
}

// Determinant by partial pivoting (floating) or exact elimination (rational).
template <class T>
T determinant(Matrix<T> a) {
  if (a.rows != a.cols) throw DomainError("determinant of a non-square matrix");
  const int n = a.rows;
  T det(1);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (scalar_abs(a(i, k)) > scalar_abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0) return T(0);
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
      det = T(-det);
    }
    det *= a(k, k);
    for (int i = k + 1; i < n; ++i) {
      T f = T(a(i, k) / a(k, k));
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return det;
}

template <class T>
struct SvdResult {
  std::vector<T> sigma;  // descending
  Matrix<T> v;           // right singular vectors as columns, same order
};

// One-sided Jacobi (Hestenes) SVD. Accurate small singular values, which is
// what rank and kernel extraction on rank-drop loci need.
template <class T>
SvdResult<T> svd(const Matrix<T>& input) {
  using std::sqrt;
  const int m = input.rows, n = input.cols;
  Matrix<T> a = input;
  Matrix<T> v(n, n);
  for (int i = 0; i < n; ++i) v(i, i) = T(1);
  const T eps = scalar_epsilon<T>();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        T alpha(0), beta(0), gamma(0);
        for (int i = 0; i < m; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (gamma == 0 || scalar_abs(gamma) <= eps * T(sqrt(T(alpha * beta)))) continue;
        rotated = true;
        T zeta = T((beta - alpha) / (2 * gamma));
        T t = T((zeta >= 0 ? T(1) : T(-1)) / (scalar_abs(zeta) + T(sqrt(T(1 + zeta * zeta)))));
        T c = T(1 / T(sqrt(T(1 + t * t))));
        T s = T(c * t);
        for (int i = 0; i < m; ++i) {
          T ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (int i = 0; i < n; ++i) {
          T vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<T> sig(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    T s2(0);
    for (int i = 0; i < m; ++i) s2 += a(i, j) * a(i, j);
    sig[static_cast<size_t>(j)] = T(sqrt(s2));
  }
  std::vector<int> order(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) order[static_cast<size_t>(j)] = j;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return sig[static_cast<size_t>(x)] > sig[static_cast<size_t>(y)]; });
  SvdResult<T> r;
  r.v = Matrix<T>(n, n);
  for (int k = 0; k < n; ++k) {
    r.sigma.push_back(sig[static_cast<size_t>(order[static_cast<size_t>(k)])]);
    for (int i = 0; i < n; ++i) r.v(i, k) = v(i, order[static_cast<size_t>(k)]);
  }
  return r;
}

template <class T>
std::vector<T> singular_values(const Matrix<T>& a) {
  // Work on the wider orientation so that all min(m, n) values appear.
  if (a.rows < a.cols) return singular_values(a.transpose());
  return svd(a).sigma;
}

// Numerical rank relative to the largest singular value.
template <class T>
int numerical_rank(const Matrix<T>& a, double rel_tol) {
  if (a.rows == 0 || a.cols == 0) return 0;
  if constexpr (is_exact_v<T>) {
    (void)rel_tol;
    return exact_rank(a);
  } else {
    auto s = singular_values(a);
    if (s.empty() || s.front() == 0) return 0;
    int r = 0;
    for (const T& v : s)
      if (v > s.front() * T(rel_tol)) ++r;
    return r;
  }
}

// Unit right singular vector for the smallest singular value, plus that
// singular value relative to the largest.
template <class T>
std::pair<std::vector<T>, T> smallest_singular_vector(const Matrix<T>& a) {
  Matrix<T> work = a;
  if (a.rows < a.cols) {
    // Pad with zero rows so the Jacobi sweep sees a square system.
    work = Matrix<T>(a.cols, a.cols);
    for (int i = 0; i < a.rows; ++i)
      for (int j = 0; j < a.cols; ++j) work(i, j) = a(i, j);
  }
  auto r = svd(work);
  const int n = a.cols;
  std::vector<T> vec(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) vec[static_cast<size_t>(i)] = r.v(i, n - 1);
  T rel = r.sigma.front() == 0 ? T(0) : T(r.sigma.back() / r.sigma.front());
  return {vec, rel};
}

// Solve a square system by partial pivoting. Throws on exact singularity.
template <class T>
std::vector<T> solve_linear(Matrix<T> a, std::vector<T> b) {
  const int n = a.rows;
  if (a.cols != n || static_cast<int>(b.size()) != n) throw DomainError("solve_linear: shape mismatch");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (scalar_abs(a(i, k)) > scalar_abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0) throw NumericError("solve_linear: singular matrix");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
      std::swap(b[static_cast<size_t>(piv)], b[static_cast<size_t>(k)]);
    }
    for (int i = k + 1; i < n; ++i) {
      T f = T(a(i, k) / a(k, k));
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[static_cast<size_t>(i)] -= f * b[static_cast<size_t>(k)];
    }
  }
  std::vector<T> x(static_cast<size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    T s = b[static_cast<size_t>(i)];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(i)] = T(s / a(i, i));
  }
  return x;
}

}  // namespace billiards
