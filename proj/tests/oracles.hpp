#pragma once
// Test-side reference computations, written independently of the library paths
// they check.

#include "billiards/confocal.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using billiards::Vec;

// Discriminant of Q_gamma(p + t v) = 1 in t. Zero exactly when the line is
// tangent to Q_gamma.
inline double tangency_discriminant(const std::vector<double>& a, const Vec& p, const Vec& v, double gamma) {
  double jpv = 0, jvv = 0, jpp = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double w = 1.0 / (a[i] - gamma);
    jpv += w * p[static_cast<int>(i)] * v[static_cast<int>(i)];
    jvv += w * v[static_cast<int>(i)] * v[static_cast<int>(i)];
    jpp += w * p[static_cast<int>(i)] * p[static_cast<int>(i)];
  }
  return jpv * jpv - jvv * (jpp - 1);
}

// Random point strictly inside the ellipsoid.
inline Vec interior_point(const std::vector<double>& a, std::mt19937& rng, double max_level = 0.9) {
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> u(0.05, max_level);
  Vec x(static_cast<int>(a.size()));
  double q = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    x[static_cast<int>(i)] = n(rng) * std::sqrt(a[i]);
    q += x[static_cast<int>(i)] * x[static_cast<int>(i)] / a[i];
  }
  return x * (std::sqrt(u(rng)) / std::sqrt(q));
}

inline Vec random_unit(int d, std::mt19937& rng) {
  std::normal_distribution<double> n(0, 1);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = n(rng);
  return v.normalized();
}

// Brute-force line-ellipsoid intersection by dense sampling and bisection on
// the quadratic form, forward direction only.
inline double forward_hit(const std::vector<double>& a, const Vec& o, const Vec& v) {
  auto q = [&](double t) {
    double s = -1;
    for (size_t i = 0; i < a.size(); ++i) {
      double xi = o[static_cast<int>(i)] + t * v[static_cast<int>(i)];
      s += xi * xi / a[i];
    }
    return s;
  };
  double step = 1e-3, t = step;
  while (q(t) < 0) t += step;
  double lo = t - step, hi = t;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (q(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
