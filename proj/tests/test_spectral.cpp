#include <doctest.h>

#include "billiards/dynamics.hpp"
#include "billiards/poly_core.hpp"
#include "billiards/spectral.hpp"
#include "oracles.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

using namespace billiards;

namespace {
const std::vector<double> kAxes{4, 2.25, 1};

// Band measure straight from the definition, tanh-sinh on the raw singular integrand.
double oracle_measure(const Polynomial<double>& eta, const std::vector<double>& c, double lo, double hi) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto g = [&](double s, double xc) {
    // xc < 0: distance lo - s to the left end; xc > 0: hi - s
    double dlo = xc < 0 ? -xc : s - lo, dhi = xc > 0 ? xc : hi - s;
    double p = dlo * dhi;
    for (double cj : c)
      if (cj != lo && cj != hi) p *= std::abs(s - cj);
    return std::abs(eta(s)) / std::sqrt(p);
  };
  return ts.integrate(g, lo, hi) / M_PI;
}

double f1_for(const ConfocalFamily& f, double gamma) {
  return band_measures(interval_system(f, make_caustics(f, {gamma}))).frequencies[0];
}
}  // namespace

TEST_CASE("symmetric two-band system") {
  auto E = IntervalSystem::from_endpoints({1, 0.3, -0.3, -1});
  auto eta = gap_normalized_differential(E);
  REQUIRE(eta.degree() == 1);
  CHECK(std::abs(eta.coeff(0)) < 1e-13);
  CHECK(eta.coeff(1) == 1.0);
  auto fd = band_measures(E);
  CHECK(fd.band_measures[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fd.band_measures[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fd.frequencies[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("eta has one root per gap for the reference system") {
  ConfocalFamily f(kAxes);
  auto E = interval_system(f, make_caustics(f, {0.5, 3}));
  auto eta = gap_normalized_differential(E);
  REQUIRE(eta.degree() == 2);
  auto roots = isolate_real_roots(eta, -10.0, 10.0);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0].value > 0.25);
  CHECK(roots[0].value < 1.0 / 3);
  CHECK(roots[1].value > 4.0 / 9);
  CHECK(roots[1].value < 1.0);
}

TEST_CASE("band measures agree with a tanh-sinh oracle and under node doubling") {
  ConfocalFamily f(kAxes);
  auto E = interval_system(f, make_caustics(f, {0.5, 3}));
  auto fd = band_measures(E);
  QuadratureOptions fine;
  fine.start_nodes = 256;
  fine.tol = 1e-14;
  auto fd2 = band_measures(E, fine);
  for (int p = 1; p <= 3; ++p) {
    double mu = fd.band_measures[static_cast<size_t>(p - 1)];
    CHECK(std::abs(mu - fd2.band_measures[static_cast<size_t>(p - 1)]) < 1e-10);
    CHECK(std::abs(mu - oracle_measure(fd.eta, E.c, E.band_lo(p), E.band_hi(p))) < 1e-9);
  }
  CHECK(std::abs(fd.mass - 1) < 1e-10);
}

TEST_CASE("frequency map properties on random lines") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(41);
  int used = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Vec p = oracle::interior_point(kAxes, rng);
    Vec v = oracle::random_unit(3, rng);
    auto c = caustic_parameters(f, Line(p, v));
    if (c.degenerate || c.gammas[0] <= 1e-6) continue;
    auto E = interval_system(f, c);
    auto fd = band_measures(E);
    ++used;
    CHECK(std::abs(fd.mass - 1) < 1e-10);
    for (double mu : fd.band_measures) CHECK(mu >= 0);
    CHECK(fd.frequencies[0] < fd.frequencies[1]);
    // constant sign on each band, alternating between consecutive bands
    for (int q = 1; q <= 3; ++q) {
      int sign = 0;
      for (int i = 1; i < 20; ++i) {
        double s = E.band_lo(q) + i / 20.0 * (E.band_hi(q) - E.band_lo(q));
        int sg = fd.eta(s) > 0 ? 1 : -1;
        if (sign == 0) sign = sg;
        CHECK(sg == sign);
      }
      CHECK(sign == ((q % 2) ? 1 : -1));
    }
    for (int g = 1; g <= 2; ++g) CHECK(isolate_real_roots(fd.eta, E.gap_lo(g), E.gap_hi(g)).size() == 1);
  }
  CHECK(used > 30);
}

TEST_CASE("turning counts follow the frequency map") {
  ConfocalFamily f(kAxes);
  std::vector<std::vector<double>> caustics{{0.5, 3}, {0.3, 1.6}, {1.5, 3.5}, {0.8, 2.0}};
  for (const auto& g : caustics) {
    auto fd = band_measures(interval_system(f, make_caustics(f, g)));
    auto t = simulate(f, ray_from_caustics(f, g, {0.37, 0.61}), 200);
    for (int k = 1; k <= 200; ++k) {
      const auto& counts = t.turning_counts[static_cast<size_t>(k - 1)];
      for (int j = 1; j <= 2; ++j) {
        // m_j = floor(k f_j) against hits of lambda_{d-j+1} at either end of its range
        long m = static_cast<long>(std::floor(k * fd.frequencies[static_cast<size_t>(j - 1)]));
        const auto& cnt = counts[static_cast<size_t>(3 - j)];
        CHECK(std::labs(cnt[0] - m) <= 1);
        CHECK(std::labs(cnt[1] - m) <= 1);
      }
    }
  }
}

TEST_CASE("resonance_scan examples") {
  auto r1 = resonance_scan({1.0 / 3}, 2, 10);
  CHECK(r1.r == 1);
  REQUIRE(r1.k0);
  CHECK(*r1.k0 == 3);
  CHECK(r1.weak_winding == std::vector<long>{1});

  auto r2 = resonance_scan({(3 - std::sqrt(5.0)) / 2}, 2, 50, 1e-6);
  CHECK(r2.r == 0);
  CHECK_FALSE(r2.k0);

  auto r3 = resonance_scan({0.25, 0.5}, 3, 12);
  CHECK(r3.r == 2);
  REQUIRE(r3.k0);
  CHECK(*r3.k0 == 4);
  CHECK(r3.weak_winding == std::vector<long>{1, 2});

  // just under an integer still counts as resonant
  auto r4 = resonance_scan({1.0 / 3 - 1e-12}, 2, 10);
  CHECK(*r4.k0 == 3);
  CHECK(r4.weak_winding == std::vector<long>{1});

  auto r5 = resonance_scan({1.0 / 3 + 2e-6}, 2, 10);
  CHECK(r5.r == 0);
  CHECK(r5.near_candidates == std::vector<int>{3, 6, 9});
  CHECK_THROWS_AS(resonance_scan({0.3}, 2, 2), DomainError);
}

TEST_CASE("resonance rows stay in range") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    double a = u(rng), b = u(rng);
    auto rep = resonance_scan({std::min(a, b), std::max(a, b)}, 3, 40);
    for (const auto& row : rep.rows) {
      CHECK(row.r >= 0);
      CHECK(row.r <= 2);
      for (double w : row.residual) {
        CHECK(w >= 0);
        CHECK(w < 1);
      }
    }
    if (rep.k0) CHECK(*rep.k0 > 3);
  }
}

TEST_CASE("resonance_csv layout") {
  auto csv = resonance_csv(resonance_scan({0.25, 0.5}, 3, 5));
  CHECK(csv.rfind("k,m1,m2,w1,w2,r\n", 0) == 0);
  CHECK(csv.find("\n4,1,2,0,0,2\n") != std::string::npos);
}

TEST_CASE("periodic length matches simulation") {
  // Plane ellipse with axes 3, 1; tune the caustic so f_1 = 1/3.
  ConfocalFamily f({3, 1});
  double lo = 0.05, hi = 0.95;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (f1_for(f, mid) < 1.0 / 3 ? lo : hi) = mid;
  }
  double gamma = 0.5 * (lo + hi);
  CHECK(std::abs(f1_for(f, gamma) - 1.0 / 3) < 1e-12);
  auto c = make_caustics(f, {gamma});

  std::vector<double> lengths;
  for (double frac : {0.2, 0.55, 0.9}) {
    auto t = simulate(f, ray_from_caustics(f, {gamma}, {frac}), 30);
    // find the first return to the starting point and direction
    int n = 0;
    for (int k = 1; k < 30 && n == 0; ++k) {
      const auto& s = t.segments[static_cast<size_t>(k)];
      if ((s.start - t.segments[0].start).norm() < 1e-7 && (s.direction - t.segments[0].direction).norm() < 1e-7) n = k;
    }
    REQUIRE(n > 0);
    double Lsim = 0;
    for (int k = 0; k < n; ++k) Lsim += t.segments[static_cast<size_t>(k)].length;
    long m1 = t.turning_counts[static_cast<size_t>(n - 1)][1][0];
    double L = periodic_length(f, c, {n, m1});
    CHECK(std::abs(L - Lsim) / Lsim < 1e-6);
    lengths.push_back(L);
  }
  for (double L : lengths) CHECK(std::abs(L - lengths[0]) < 1e-8);
}

TEST_CASE("periodic length input checks") {
  ConfocalFamily f({3, 1});
  CHECK_THROWS_AS(periodic_length(f, make_caustics(f, {0.5}), {3}), DomainError);
}
