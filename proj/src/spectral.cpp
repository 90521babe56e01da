#include "billiards/spectral.hpp"

#include "billiards/linalg.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace billiards {

double chebyshev_endpoint_integral(const std::function<double(double)>& g, double lo, double hi, const QuadratureOptions& opt) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  auto estimate = [&](int n) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += g(mid + half * std::cos((k + 0.5) * M_PI / n));
    return s * M_PI / n;
  };
  double prev = estimate(opt.start_nodes);
  for (int n = 2 * opt.start_nodes; n <= opt.max_nodes; n *= 2) {
    double cur = estimate(n);
    if (std::abs(cur - prev) <= opt.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw NumericError("chebyshev_endpoint_integral: node doubling did not stabilize");
}

namespace {

// 1/sqrt of prod |s - c_j| over all endpoints except the two skipped ones.
double reduced_weight(const std::vector<double>& c, size_t skip1, size_t skip2, double s) {
  double p = 1;
  for (size_t j = 0; j < c.size(); ++j)
    if (j != skip1 && j != skip2) p *= std::abs(s - c[j]);
  return 1.0 / std::sqrt(p);
}

// int over (c[i_lo], c[i_hi]) of s^k / sqrt|P(s)|; indices into the descending c.
double endpoint_moment(const std::vector<double>& c, size_t i_hi, size_t i_lo, int k, const QuadratureOptions& opt) {
  return chebyshev_endpoint_integral([&](double s) { return std::pow(s, k) * reduced_weight(c, i_hi, i_lo, s); }, c[i_lo],
                                     c[i_hi], opt);
}

}  // namespace

Polynomial<double> gap_normalized_differential(const IntervalSystem& E, const QuadratureOptions& opt) {
  const int d = E.d;
  if (d < 2) throw DomainError("gap_normalized_differential: need d >= 2");
  const int n = d - 1;
  Matrix<double> M(n, n);
  std::vector<double> rhs(static_cast<size_t>(n));
  for (int g = 1; g <= n; ++g) {
    // gap g = (c_{2g+1}, c_{2g}), 0-based indices 2g and 2g-1
    size_t hi = static_cast<size_t>(2 * g - 1), lo = static_cast<size_t>(2 * g);
    for (int k = 0; k < n; ++k) M(g - 1, k) = endpoint_moment(E.c, hi, lo, k, opt);
    rhs[static_cast<size_t>(g - 1)] = -endpoint_moment(E.c, hi, lo, n, opt);
  }
  std::vector<double> e;
  try {
    e = solve_linear(M, rhs);
  } catch (const NumericError&) {
    throw NumericError("gap_normalized_differential: singular moment matrix");
  }
  e.push_back(1.0);
  return Polynomial<double>(e);
}

FrequencyData band_measures(const IntervalSystem& E, const QuadratureOptions& opt) {
  FrequencyData fd;
  const int d = E.d;
  fd.eta = gap_normalized_differential(E, opt);
  for (int p = 1; p <= d; ++p) {
    size_t hi = static_cast<size_t>(2 * p - 2), lo = static_cast<size_t>(2 * p - 1);
    double m = chebyshev_endpoint_integral(
                   [&](double s) { return std::abs(fd.eta(s)) * reduced_weight(E.c, hi, lo, s); }, E.c[lo], E.c[hi], opt) /
               M_PI;
    fd.band_measures.push_back(m);
    fd.mass += m;
  }
  // f_j sums the j leftmost bands.
  double acc = 0;
  for (int j = 1; j <= d - 1; ++j) {
    acc += fd.band_measures[static_cast<size_t>(d - j)];
    fd.frequencies.push_back(acc);
  }
  if (std::abs(fd.mass - 1) > 1e-10) throw NumericError("band_measures: total mass " + std::to_string(fd.mass) + " differs from 1");
  return fd;
}

ResonanceReport resonance_scan(const std::vector<double>& f, int d, int kmax, double tol, double near_tol) {
  if (kmax <= d) throw DomainError("resonance_scan: kmax must exceed d");
  ResonanceReport rep;
  for (int k = d + 1; k <= kmax; ++k) {
    ResonanceRow row;
    row.k = k;
    for (double fj : f) {
      double y = k * fj;
      double m = std::floor(y);
      double w = y - m;
      if (w > 1 - tol) {
        m += 1;
        w = 0;
      }
      if (w < tol) {
        w = 0;
        ++row.r;
      } else if (std::min(w, 1 - w) < near_tol) {
        row.near = true;
      }
      row.winding.push_back(static_cast<long>(m));
      row.residual.push_back(w);
    }
    if (row.r > rep.r) {
      rep.r = row.r;
      rep.k0 = k;
      rep.weak_winding = row.winding;
    }
    if (row.near) rep.near_candidates.push_back(k);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::string resonance_csv(const ResonanceReport& r) {
  std::ostringstream os;
  os.precision(17);
  size_t n = r.rows.empty() ? 0 : r.rows.front().winding.size();
  os << "k";
  for (size_t j = 1; j <= n; ++j) os << ",m" << j;
  for (size_t j = 1; j <= n; ++j) os << ",w" << j;
  os << ",r\n";
  for (const auto& row : r.rows) {
    os << row.k;
    for (long m : row.winding) os << ',' << m;
    for (double w : row.residual) os << ',' << w;
    os << ',' << row.r << '\n';
  }
  return os.str();
}

double periodic_length(const ConfocalFamily& f, const CausticSet& c, const std::vector<long>& winding, const QuadratureOptions& opt) {
  const int d = f.d();
  if (static_cast<int>(winding.size()) != d) throw DomainError("periodic_length: need d winding numbers");
  if (static_cast<int>(c.gammas.size()) != d - 1) throw DomainError("periodic_length: need d-1 caustics");
  std::vector<double> b = f.axes();
  b.insert(b.end(), c.gammas.begin(), c.gammas.end());
  std::sort(b.begin(), b.end());  // b_1..b_{2d-1}
  auto P = [&](double lam) {
    double p = 1;
    for (double r : b) p *= r - lam;
    return p;
  };
  auto others = [&](double lam, size_t skip1, size_t skip2) {
    double p = 1;
    for (size_t i = 0; i < b.size(); ++i)
      if (i != skip1 && i != skip2) p *= std::abs(b[i] - lam);
    return p;
  };
  double L = 0;
  for (int j = 1; j <= d; ++j) {
    double lo = j == 1 ? 0.0 : b[static_cast<size_t>(2 * j - 3)];
    double hi = b[static_cast<size_t>(2 * j - 2)];
    if (!(P(0.5 * (lo + hi)) > 0)) throw DomainError("periodic_length: P is not positive inside a band");
    double integral;
    if (j == 1) {
      // lambda = hi (1 - u^2): the lone endpoint singularity at hi disappears.
      const size_t ih = 0;
      auto g = [&](double u) {
        double lam = hi * (1 - u * u);
        return 2 * std::sqrt(hi) * std::pow(lam, d - 1) / std::sqrt(others(lam, ih, ih));
      };
      integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 1.0, 15, 1e-14);
    } else {
      size_t il = static_cast<size_t>(2 * j - 3), ih = static_cast<size_t>(2 * j - 2);
      integral = chebyshev_endpoint_integral(
          [&](double lam) { return std::pow(lam, d - 1) / std::sqrt(others(lam, il, ih)); }, lo, hi, opt);
    }
    double sign = (j + d) % 2 == 0 ? 1.0 : -1.0;
    L += sign * static_cast<double>(winding[static_cast<size_t>(j - 1)]) * integral;
  }
  return L;
}

}  // namespace billiards
