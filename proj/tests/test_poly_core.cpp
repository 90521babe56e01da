#include <doctest.h>

#include "billiards/poly_core.hpp"

#include <functional>
#include <random>

using namespace billiards;

namespace {

// Generalized binomial coefficient C(1/2, k), exact.
Rational half_binomial(int k) {
  Rational c(1);
  for (int j = 0; j < k; ++j) c = c * (Rational(1, 2) - j) / (j + 1);
  return c;
}

Polynomial<Real> five_factor(const Real& g1, const Real& g2) {
  return Polynomial<Real>::from_roots({Real(4), Real("2.25"), Real(1), g1, g2}, Real(-1));
}

Real hankel2_det(const Real& g2) {
  auto s = sqrt_series(five_factor(Real("0.5"), g2), 8);
  return s[4] * s[6] - s[5] * s[5];
}

}  // namespace

TEST_CASE("scalar kinds do not mix") {
  static_assert(!std::is_invocable_v<std::plus<>, Polynomial<Rational>, Polynomial<Real>>);
  static_assert(!std::is_invocable_v<std::multiplies<>, Polynomial<double>, Polynomial<Rational>>);
  static_assert(std::is_invocable_v<std::plus<>, Polynomial<Real>, Polynomial<Real>>);
  auto p = convert<Real>(Polynomial<Rational>{Rational(1, 3), Rational(2)});
  CHECK(abs(p(Real(1)) - Real(7) / 3) < Real("1e-35"));
}

TEST_CASE("eval") {
  Polynomial<Rational> p{-1, 0, 1};
  CHECK(p(Rational(1)) == 0);
  CHECK(Polynomial<Rational>{}(Rational(7)) == 0);
  CHECK(Polynomial<Rational>{}.degree() == -1);
  Polynomial<Rational> t3{0, -3, 0, 4};
  CHECK(eval(t3, Rational(1, 2)) == -1);
}

TEST_CASE("arithmetic and zero polynomial") {
  Polynomial<Rational> a{1, 1}, b{-1, 1};
  CHECK((a * b) == Polynomial<Rational>{-1, 0, 1});
  CHECK((a - a).degree() == -1);
  CHECK((a * Polynomial<Rational>{}).is_zero());
  CHECK(Polynomial<Rational>{}.derivative().is_zero());
  auto c = Polynomial<Rational>{0, 0, 1}.compose(a);  // (1+x)^2
  CHECK(c == Polynomial<Rational>{1, 2, 1});
  auto [q, r] = divmod(Polynomial<Rational>{-1, 0, 0, 1}, b);
  CHECK(q == Polynomial<Rational>{1, 1, 1});
  CHECK(r.is_zero());
  CHECK(gcd(a * b, a * a).degree() == 1);
}

TEST_CASE("sqrt_series examples") {
  auto s = sqrt_series(Polynomial<Rational>{1, 2, 1}, 4);
  CHECK(s.coeffs == std::vector<Rational>{1, 1, 0, 0});
  auto b = sqrt_series(Polynomial<Rational>{1, 1}, 3);
  CHECK(b[0] == 1);
  CHECK(b[1] == Rational(1, 2));
  CHECK(b[2] == Rational(-1, 8));
  auto c = sqrt_series(Polynomial<Real>{Real(3)}, 2);
  CHECK(abs(c[0] - sqrt(Real(3))) < Real("1e-35"));
  CHECK(c[1] == 0);
  CHECK_THROWS_AS(sqrt_series(Polynomial<Real>{Real(-1), Real(1)}, 3), DomainError);
  CHECK_THROWS_AS(sqrt_series(Polynomial<Rational>{2}, 3), DomainError);
}

TEST_CASE("sqrt_series matches the binomial series") {
  auto s = sqrt_series(Polynomial<Rational>{1, 1}, 12);
  for (int k = 0; k < 12; ++k) CHECK(s[static_cast<size_t>(k)] == half_binomial(k));
}

TEST_CASE("quotient_series examples") {
  Polynomial<Rational> P{1, 1};
  CHECK(quotient_series(P, Polynomial<Rational>{1}, 5).coeffs == sqrt_series(P, 5).coeffs);
  CHECK(quotient_series(Polynomial<Rational>{1, 2, 1}, Polynomial<Rational>{1, 1}, 3).coeffs == std::vector<Rational>{1, 0, 0});
  auto q = quotient_series(P, Polynomial<Rational>{1, -1}, 3);
  // (1 + x/2 - x^2/8)(1 + x + x^2) = 1 + 3x/2 + 11x^2/8
  CHECK(q.coeffs == std::vector<Rational>{1, Rational(3, 2), Rational(11, 8)});
  // 1/(1-x) is the geometric series, so partial sums of the binomial series.
  auto q8 = quotient_series(P, Polynomial<Rational>{1, -1}, 8);
  Rational partial(0);
  for (int k = 0; k < 8; ++k) {
    partial += half_binomial(k);
    CHECK(q8[static_cast<size_t>(k)] == partial);
  }
  CHECK_THROWS_AS(quotient_series(P, Polynomial<Rational>{0, 1}, 3), DomainError);
}

TEST_CASE("sqrt_series squares back to P") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Real> roots;
    for (int i = 0; i < 5; ++i) roots.push_back(Real(u(rng)));
    auto P = Polynomial<Real>::from_roots(roots, Real(-1));
    const int K = 14;
    auto s = sqrt_series(P, K);
    Real scale = max_abs_coeff(P);
    for (int k = 0; k < K; ++k) {
      Real acc(0);
      for (int j = 0; j <= k; ++j) acc += s[static_cast<size_t>(j)] * s[static_cast<size_t>(k - j)];
      CHECK(abs(acc - P.coeff(k)) < Real("1e-12") * scale);
    }
  }
  auto r = sqrt_series(Polynomial<Rational>{4, 4, 1, Rational(3, 7)}, 10);
  for (int k = 0; k < 4; ++k) {
    Rational acc(0);
    for (int j = 0; j <= k; ++j) acc += r[static_cast<size_t>(j)] * r[static_cast<size_t>(k - j)];
    CHECK(acc == Polynomial<Rational>{4, 4, 1, Rational(3, 7)}.coeff(k));
  }
}

TEST_CASE("hankel_rank examples") {
  auto sq = sqrt_series(Polynomial<Rational>{1, 2, 1}, 12);
  CHECK(hankel_rank(sq, 4, 3, 3) == 0);
  auto sr = sqrt_series(Polynomial<Real>{Real(1), Real(2), Real(1)}, 12);
  CHECK(hankel_rank(sr, 4, 2, 4) == 0);
  auto b = sqrt_series(Polynomial<Rational>{1, 1}, 6);
  CHECK(hankel_rank(b, 4, 1, 1) == 1);
  CHECK_THROWS_AS(hankel_rank(b, 4, 2, 2), DomainError);
}

TEST_CASE("hankel_rank is invariant under positive scaling") {
  auto P = five_factor(Real("0.5"), Real("3"));
  auto s = sqrt_series(P, 14);
  for (double c : {1e-6, 0.3, 7.0, 1e5}) {
    SeriesPrefix<Real> t = s;
    for (auto& v : t.coeffs) v *= Real(c);
    for (int r = 1; r <= 4; ++r) CHECK(hankel_rank(t, 4, r, r) == hankel_rank(s, 4, r, r));
  }
  auto sx = sqrt_series(Polynomial<Rational>{1, 1}, 12);
  SeriesPrefix<Rational> tx = sx;
  for (auto& v : tx.coeffs) v *= Rational(5, 3);
  CHECK(hankel_rank(tx, 3, 3, 3) == hankel_rank(sx, 3, 3, 3));
}

TEST_CASE("hankel_rank drops by one at a bisected determinant root") {
  Real lo("0.78"), hi("0.89");
  REQUIRE(hankel2_det(lo) * hankel2_det(hi) < 0);
  for (int it = 0; it < 200; ++it) {
    Real mid = (lo + hi) / 2;
    if (hankel2_det(mid) * hankel2_det(lo) > 0)
      lo = mid;
    else
      hi = mid;
  }
  Real root = (lo + hi) / 2;
  CHECK(hankel_rank(sqrt_series(five_factor(Real("0.5"), root), 8), 4, 2, 2) == 1);
  CHECK(hankel_rank(sqrt_series(five_factor(Real("0.5"), Real("0.6")), 8), 4, 2, 2) == 2);
  {
    PrecisionScope wide(256);
    Real g = root;  // widen the stored value, then re-evaluate
    CHECK(hankel_rank(sqrt_series(five_factor(Real("0.5"), g), 8), 4, 2, 2) == 1);
  }
}

TEST_CASE("isolate_real_roots examples") {
  auto r1 = isolate_real_roots(Polynomial<Rational>{-1, 0, 1}, Rational(0), Rational(2));
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].value == 1);
  CHECK(r1[0].odd);
  auto r2 = isolate_real_roots(Polynomial<Rational>{1, -2, 1}, Rational(0), Rational(2));
  REQUIRE(r2.size() == 1);
  CHECK(r2[0].value == 1);
  CHECK_FALSE(r2[0].odd);
  auto r3 = isolate_real_roots(Polynomial<Rational>{0, -2, 0, 1}, Rational(-2), Rational(2));
  REQUIRE(r3.size() == 3);
  CHECK(abs(to_double(r3[0].value) + std::sqrt(2.0)) < 1e-12);
  CHECK(r3[1].value == 0);
  CHECK(abs(to_double(r3[2].value) - std::sqrt(2.0)) < 1e-12);
  for (auto& r : r3) CHECK(r.odd);

  auto d3 = isolate_real_roots(Polynomial<double>{0, -2, 0, 1}, -2.0, 2.0);
  REQUIRE(d3.size() == 3);
  CHECK(d3[0].value == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(d3[1].value) < 1e-15);
  auto m3 = isolate_real_roots(Polynomial<Real>{Real(0), Real(-2), Real(0), Real(1)}, Real(-2), Real(2));
  REQUIRE(m3.size() == 3);
  CHECK(abs(m3[2].value - sqrt(Real(2))) < Real("1e-35"));
  auto dd = isolate_real_roots(Polynomial<double>{1, -2, 1}, 0.0, 2.0);
  REQUIRE(dd.size() == 1);
  CHECK_FALSE(dd[0].odd);
  auto cube = isolate_real_roots(Polynomial<Rational>{-1, 3, -3, 1}, Rational(0), Rational(2));
  REQUIRE(cube.size() == 1);
  CHECK(cube[0].odd);
}

TEST_CASE("isolate_real_roots recovers planted roots") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-40, 40);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Rational> roots;
    for (int i = 0; i < 6; ++i) roots.push_back(Rational(num(rng), 7));
    std::sort(roots.begin(), roots.end());
    auto p = Polynomial<Rational>::from_roots(roots, Rational(3, 2));
    auto found = isolate_real_roots(p, Rational(-7), Rational(7));
    std::vector<Rational> distinct = roots;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    REQUIRE(found.size() == distinct.size());
    for (size_t i = 0; i < found.size(); ++i) {
      CHECK(abs(found[i].value - distinct[i]) < Rational(1, 1000000000));
      int mult = static_cast<int>(std::count(roots.begin(), roots.end(), distinct[i]));
      CHECK(found[i].odd == (mult % 2 == 1));
      CHECK(abs(to_double(p(found[i].value))) < 1e-6);
    }
    auto pd = convert<double>(p);
    auto fd = isolate_real_roots(pd, -7.0, 7.0);
    CHECK(fd.size() == distinct.size());
  }
}

TEST_CASE("odd roots are bracketed by a sign change") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> roots;
    for (int i = 0; i < 5; ++i) roots.push_back(u(rng));
    auto p = Polynomial<double>::from_roots(roots);
    auto found = isolate_real_roots(p, -4.0, 4.0);
    CHECK(found.size() == 5);
    for (auto& r : found) {
      CHECK(std::abs(p(r.value)) < 1e-10);
      double h = 1e-7;
      if (r.odd) CHECK(p(r.value - h) * p(r.value + h) < 0);
    }
  }
}

TEST_CASE("coprimality") {
  Polynomial<double> a{-1, 0, 1}, b{-2, 1};
  CHECK(coprime(a, b));
  CHECK_FALSE(coprime(a * b, Polynomial<double>{-1, 1}));
  CHECK_FALSE(coprime(Polynomial<Rational>{-1, 0, 1}, Polynomial<Rational>{1, 1}));
}
