#include <doctest.h>

#include "billiards/confocal.hpp"
#include "billiards/dynamics.hpp"
#include "oracles.hpp"

using namespace billiards;

namespace {
const std::vector<double> kAxes{4, 2.25, 1};

Vec vec(std::initializer_list<double> v) {
  Vec x(static_cast<int>(v.size()));
  int i = 0;
  for (double e : v) x[i++] = e;
  return x;
}
}  // namespace

TEST_CASE("family validation") {
  CHECK_THROWS_AS(ConfocalFamily({1, 2}), DomainError);
  CHECK_THROWS_AS(ConfocalFamily({2, -1}), DomainError);
  CHECK_THROWS_AS(ConfocalFamily({2}), DomainError);
  ConfocalFamily f(kAxes);
  CHECK(f.type_name(0.5) == "ellipsoid");
  CHECK(f.type_name(1.5) == "1-sheeted hyperboloid");
  CHECK(f.type_name(3.0) == "2-sheeted hyperboloid");
  CHECK(f.type_index(2.25) == -1);
}

TEST_CASE("jacobi_coordinates examples") {
  ConfocalFamily f(kAxes);
  auto j = jacobi_coordinates(f, vec({2, 0, 0}));
  REQUIRE(j.lambdas.size() == 3);
  CHECK(j.lambdas[0] == doctest::Approx(0).epsilon(1e-14));
  CHECK(j.lambdas[1] == 1.0);
  CHECK(j.lambdas[2] == 2.25);
  CHECK(j.on_axis[1]);
  CHECK_FALSE(j.on_axis[0]);

  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x = oracle::interior_point(kAxes, rng, 1.0);
    double q = 0;
    for (int i = 0; i < 3; ++i) q += x[i] * x[i] / kAxes[static_cast<size_t>(i)];
    x /= std::sqrt(q);  // onto the boundary
    CHECK(std::abs(jacobi_coordinates(f, x).lambdas[0]) < 1e-12);
  }
}

TEST_CASE("jacobi round trip and interlacing") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x = oracle::interior_point(kAxes, rng, 0.99);
    auto j = jacobi_coordinates(f, x);
    // Each lambda is a sign change of prod(a - l) - sum x_i^2 prod_{k != i}(a_k - l).
    auto F = [&](double lam) {
      double prod = 1;
      for (double a : kAxes) prod *= a - lam;
      for (int i = 0; i < 3; ++i) {
        double t = x[i] * x[i];
        for (int k = 0; k < 3; ++k)
          if (k != i) t *= kAxes[static_cast<size_t>(k)] - lam;
        prod -= t;
      }
      return prod;
    };
    for (double lam : j.lambdas) {
      double h = 1e-11 * (1 + std::abs(lam));
      CHECK(F(lam - h) * F(lam + h) <= 0);
    }
    CHECK(j.lambdas[0] < 1.0);
    CHECK(j.lambdas[1] >= 1.0);
    CHECK(j.lambdas[1] <= 2.25);
    CHECK(j.lambdas[2] >= 2.25);
    CHECK(j.lambdas[2] <= 4.0);
    Vec y = cartesian_from_jacobi(f, j);
    CHECK((x - y).cwiseAbs().maxCoeff() < 1e-10);
    auto j2 = jacobi_coordinates(f, y);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(j2.lambdas[static_cast<size_t>(k)] - j.lambdas[static_cast<size_t>(k)]) < 1e-10);
  }
}

TEST_CASE("cartesian_from_jacobi examples") {
  ConfocalFamily f(kAxes);
  JacobiPoint j{{0, 1, 2.25}, {1, 1, 1}, {}};
  Vec x = cartesian_from_jacobi(f, j);
  CHECK(x[0] == doctest::Approx(2));
  CHECK(std::abs(x[1]) < 1e-12);
  CHECK(std::abs(x[2]) < 1e-12);
  JacobiPoint bad{{1.5, 1.2, 3}, {1, 1, 1}, {}};
  CHECK_THROWS_AS(cartesian_from_jacobi(f, bad), DomainError);
  JacobiPoint bad2{{0.5, 2.5, 3}, {1, 1, 1}, {}};
  CHECK_THROWS_AS(cartesian_from_jacobi(f, bad2), DomainError);
}

TEST_CASE("caustic_parameters examples") {
  ConfocalFamily f(kAxes);
  auto axis = caustic_parameters(f, Line(vec({0, 0, 0}), vec({1, 0, 0})));
  REQUIRE(axis.gammas.size() == 2);
  CHECK(axis.gammas[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(axis.gammas[1] == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(axis.degenerate);

  Ray r = ray_from_caustics(f, {0.5, 3}, {0.4, 0.7});
  auto t = simulate(f, r, 40);
  for (const auto& seg : t.segments) {
    auto c = caustic_parameters(f, seg.line());
    CHECK(std::abs(c.gammas[0] - 0.5) < 1e-9);
    CHECK(std::abs(c.gammas[1] - 3.0) < 1e-9);
    CHECK_FALSE(c.degenerate);
  }
}

TEST_CASE("caustics satisfy the tangency discriminant") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p = oracle::interior_point(kAxes, rng);
    Vec v = oracle::random_unit(3, rng);
    auto c = caustic_parameters(f, Line(p, v));
    REQUIRE(c.gammas.size() == 2);
    for (double g : c.gammas) {
      // Relative to the scale of the discriminant's terms.
      double h = 1e-6;
      double dplus = oracle::tangency_discriminant(kAxes, p, v, g + h);
      double dminus = oracle::tangency_discriminant(kAxes, p, v, g - h);
      CHECK(dplus * dminus <= 0);
    }
  }
}

TEST_CASE("caustic parameters are constant along a line") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    Vec p = oracle::interior_point(kAxes, rng, 0.3);
    Vec v = oracle::random_unit(3, rng);
    auto ref = caustic_parameters(f, Line(p, v));
    for (int k = 0; k < 100; ++k) {
      double s = -0.5 + k * 0.01;
      auto c = caustic_parameters(f, Line(p + s * v, v));
      for (size_t j = 0; j < 2; ++j) CHECK(std::abs(c.gammas[j] - ref.gammas[j]) < 1e-10 * (1 + std::abs(ref.gammas[j])));
    }
  }
}

TEST_CASE("audin_check examples") {
  ConfocalFamily f(kAxes);
  auto r1 = audin_check(f, make_caustics(f, {0.5, 3}));
  CHECK(r1.ok);
  CHECK(r1.positions == std::vector<int>{1, 4});
  // Two ellipsoid caustics: gamma_2 sits at b_2, outside {b_3, b_4}.
  auto r2 = audin_check(f, make_caustics(f, {0.5, 0.7}));
  CHECK(r2.positions == std::vector<int>{1, 2});
  CHECK_FALSE(r2.ok);
  auto r3 = audin_check(f, make_caustics(f, {1.5, 3.5}));
  CHECK(r3.ok);
  CHECK(r3.positions == std::vector<int>{2, 4});
  CHECK_FALSE(audin_check(f, make_caustics(f, {2.3, 2.4})).ok);
}

TEST_CASE("audin alternative holds for random lines through the interior") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Vec p = oracle::interior_point(kAxes, rng);
    Vec v = oracle::random_unit(3, rng);
    CHECK(audin_check(f, caustic_parameters(f, Line(p, v))).ok);
  }
}

TEST_CASE("interval_system examples") {
  ConfocalFamily f(kAxes);
  auto s = interval_system(f, make_caustics(f, {0.5, 3}));
  std::vector<double> want{2, 1, 4.0 / 9, 1.0 / 3, 0.25, 0};
  REQUIRE(s.c.size() == 6);
  for (size_t i = 0; i < 6; ++i) CHECK(s.c[i] == doctest::Approx(want[i]).epsilon(1e-15));
  CHECK(s.band_lo(1) == 1);
  CHECK(s.band_hi(1) == 2);
  CHECK(s.band_lo(3) == 0);
  CHECK(s.gap_lo(1) == doctest::Approx(4.0 / 9));
  CHECK(s.gap_hi(1) == 1);
  ConfocalFamily f2({2, 1});
  auto s2 = interval_system(f2, make_caustics(f2, {0.5}));
  CHECK(s2.c == std::vector<double>{2, 1, 0.5, 0});
  CHECK_THROWS_AS(interval_system(f, make_caustics(f, {-0.5, 3})), DomainError);
  // Reciprocal is involutive on b.
  for (size_t i = 0; i + 1 < s.c.size(); ++i) CHECK(1.0 / s.c[i] == doctest::Approx(s.b[i]).epsilon(1e-15));
}

TEST_CASE("bands never overlap") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p = oracle::interior_point(kAxes, rng);
    Vec v = oracle::random_unit(3, rng);
    auto c = caustic_parameters(f, Line(p, v));
    if (c.gammas[0] <= 0) continue;
    auto s = interval_system(f, c);
    for (size_t i = 1; i < s.c.size(); ++i) CHECK(s.c[i] < s.c[i - 1]);
  }
}
