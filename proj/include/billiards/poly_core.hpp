#pragma once

#include "billiards/linalg.hpp"
#include "billiards/polynomial.hpp"
#include "billiards/roots.hpp"
#include "billiards/scalar.hpp"
#include "billiards/series.hpp"

#include <Eigen/Eigenvalues>

#include <complex>
#include <vector>

namespace billiards {

// Sylvester matrix of p and q (size deg p + deg q).
template <class T>
Matrix<T> sylvester_matrix(const Polynomial<T>& p, const Polynomial<T>& q) {
  const int m = p.degree(), n = q.degree();
  if (m < 0 || n < 0) throw DomainError("sylvester_matrix: zero polynomial");
  Matrix<T> s(m + n, m + n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) s(i, i + k) = p.coeff(m - k);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) s(n + i, i + k) = q.coeff(n - k);
  return s;
}

// Smallest singular value of the Sylvester matrix after scaling both inputs to
// unit max coefficient. Zero exactly when p and q share a root.
template <class T>
T sylvester_margin(const Polynomial<T>& p, const Polynomial<T>& q) {
  if (p.degree() <= 0 || q.degree() <= 0) return T(1);
  auto ps = p / max_abs_coeff(p);
  auto qs = q / max_abs_coeff(q);
  auto sv = singular_values(sylvester_matrix(ps, qs));
  return sv.back();
}

// Complex roots via the companion matrix, polished by Newton steps.
template <class T>
std::vector<std::complex<double>> complex_roots(const Polynomial<T>& p) {
  const int n = p.degree();
  if (n <= 0) return {};
  std::vector<double> c(p.coeffs().size());
  for (size_t k = 0; k < c.size(); ++k) c[k] = to_double(p.coeffs()[k]);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<size_t>(i)] / c[static_cast<size_t>(n)];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<std::complex<double>> z(es.eigenvalues().data(), es.eigenvalues().data() + n);
  for (auto& r : z)
    for (int it = 0; it < 3; ++it) {
      std::complex<double> v = 0, d = 0;
      for (int k = n; k >= 0; --k) {
        d = d * r + v;
        v = v * r + c[static_cast<size_t>(k)];
      }
      if (d == 0.0) break;
      r -= v / d;
    }
  return z;
}

// min over roots z of the lower-degree polynomial of |other(z)| / sum |other_k| |z|^k.
// Near zero when p and q share a root; insensitive to how widely the roots spread.
template <class T>
double coprimality_margin(const Polynomial<T>& p, const Polynomial<T>& q) {
  if (p.degree() <= 0 || q.degree() <= 0) return 1;
  const bool p_low = p.degree() <= q.degree();
  const auto& low = p_low ? p : q;
  const auto& high = p_low ? q : p;
  double best = 1;
  for (const auto& z : complex_roots(low)) {
    std::complex<double> v = 0;
    double scale = 0;
    for (int k = high.degree(); k >= 0; --k) {
      const double h = to_double(high.coeff(k));
      v = v * z + h;
      scale = scale * std::abs(z) + std::abs(h);
    }
    best = std::min(best, std::abs(v) / scale);
  }
  return best;
}

template <class T>
bool coprime(const Polynomial<T>& p, const Polynomial<T>& q, double tol = 1e-9) {
  if constexpr (is_exact_v<T>) {
    (void)tol;
    return gcd(p, q).degree() == 0;
  } else {
    return coprimality_margin(p, q) > tol;
  }
}

}  // namespace billiards
