#include <doctest.h>

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

TEST_CASE("next_reflection examples") {
  ConfocalFamily f(kAxes);
  auto r = next_reflection(f, Ray(vec({0, -1.5, 0}), vec({0, 1, 0})));
  CHECK((r.impact - vec({0, 1.5, 0})).norm() < 1e-14);
  CHECK((r.reflected.direction - vec({0, -1, 0})).norm() < 1e-14);
  CHECK((r.reflected.origin - r.impact).norm() == 0);
}

TEST_CASE("impact agrees with a brute-force line search") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    Vec o = oracle::interior_point(kAxes, rng);
    Vec v = oracle::random_unit(3, rng);
    auto r = next_reflection(f, Ray(o, v));
    double t = oracle::forward_hit(kAxes, o, v);
    CHECK((r.impact - (o + t * v)).norm() < 1e-9);
    // Mirror law: normal component flips, tangential part is kept.
    Vec n(3);
    for (int i = 0; i < 3; ++i) n[i] = r.impact[i] / kAxes[static_cast<size_t>(i)];
    n.normalize();
    Vec w = r.reflected.direction;
    CHECK(std::abs(w.dot(n) + v.dot(n)) < 1e-12);
    CHECK(((w - w.dot(n) * n) - (v - v.dot(n) * n)).norm() < 1e-12);
  }
}

TEST_CASE("planar section is invariant") {
  ConfocalFamily f(kAxes);
  Ray r(vec({0.3, -0.2, 0}), vec({0.6, 0.8, 0}));
  auto t = simulate(f, r, 60, {1e-10, true});
  for (const auto& s : t.segments) {
    CHECK(s.start[2] == 0);
    CHECK(s.direction[2] == 0);
  }
}

TEST_CASE("reflection preserves caustics") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    Ray r(oracle::interior_point(kAxes, rng), oracle::random_unit(3, rng));
    auto refl = next_reflection(f, r);
    auto before = caustic_parameters(f, Line(r.origin, r.direction));
    auto after = caustic_parameters(f, Line(refl.reflected.origin, refl.reflected.direction));
    for (size_t j = 0; j < 2; ++j) CHECK(std::abs(before.gammas[j] - after.gammas[j]) < 1e-9 * (1 + std::abs(before.gammas[j])));
  }
}

TEST_CASE("simulate: axis 2-periodic trajectory") {
  ConfocalFamily f(kAxes);
  auto t = simulate(f, Ray(vec({0, -1.5, 0}), vec({0, 1, 0})), 10, {1e-10, true});
  REQUIRE(t.segments.size() == 10);
  for (const auto& s : t.segments) {
    CHECK(std::abs(s.start[0]) < 1e-15);
    CHECK(std::abs(s.start[2]) < 1e-15);
    CHECK(std::abs(s.direction[1]) == doctest::Approx(1.0));
    CHECK(s.length == doctest::Approx(3.0));
  }
  auto pc = classify_segment_pair(t.segments[0].line(), t.segments[2].line());
  CHECK(pc.kind == PairKind::coincident);
}

TEST_CASE("ray_from_caustics produces the requested caustics") {
  ConfocalFamily f(kAxes);
  for (auto g : std::vector<std::vector<double>>{{0.5, 3}, {1.5, 3.5}, {0.3, 1.7}, {1.2, 1.9}}) {
    for (double fr : {0.1, 0.5, 0.9}) {
      Ray r = ray_from_caustics(f, g, {fr, 1 - fr});
      auto c = caustic_parameters(f, Line(r.origin, r.direction));
      CHECK(std::abs(c.gammas[0] - g[0]) < 1e-10);
      CHECK(std::abs(c.gammas[1] - g[1]) < 1e-10);
      CHECK(std::abs(f.pencil_value(0, r.origin) - 1) < 1e-12);
    }
  }
}

TEST_CASE("caustic conservation along 100 reflections") {
  ConfocalFamily f(kAxes);
  std::mt19937 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    Ray r(oracle::interior_point(kAxes, rng), oracle::random_unit(3, rng));
    auto t = simulate(f, r, 100);
    for (const auto& s : t.segments) {
      auto c = caustic_parameters(f, s.line());
      for (size_t j = 0; j < 2; ++j) CHECK(std::abs(c.gammas[j] - t.caustics.gammas[j]) < 1e-9 * std::abs(t.caustics.gammas[j]));
      CHECK(audin_check(f, c).ok);
      CHECK(std::abs(s.direction.norm() - 1) < 1e-12);
    }
    for (size_t i = 1; i < t.segments.size(); ++i) CHECK((t.segments[i - 1].end() - t.segments[i].start).norm() < 1e-12);
  }
}

TEST_CASE("turning counts: every impact is a hit of lambda_1 = 0") {
  ConfocalFamily f(kAxes);
  Ray r = ray_from_caustics(f, {0.5, 3}, {0.3, 0.6});
  auto t = simulate(f, r, 50);
  for (size_t s = 0; s < t.segments.size(); ++s) CHECK(t.turning_counts[s][0][0] == static_cast<long>(s) + 1);
  // Upper hits of lambda_1 (tangency with the ellipsoid caustic): once per chord.
  CHECK(std::labs(t.turning_counts.back()[0][1] - 50) <= 1);
}

TEST_CASE("classify_segment_pair") {
  ConfocalFamily f(kAxes);
  Ray r = ray_from_caustics(f, {0.5, 3}, {0.35, 0.55});
  auto t = simulate(f, r, 10);
  for (size_t i = 0; i + 1 < t.segments.size(); ++i) {
    auto pc = classify_segment_pair(t.segments[i].line(), t.segments[i + 1].line());
    CHECK(pc.kind == PairKind::intersecting);
    REQUIRE(pc.point);
    CHECK((*pc.point - t.segments[i + 1].start).norm() < 1e-9);
  }
  CHECK(classify_segment_pair(t.segments[0].line(), t.segments[2].line()).kind == PairKind::skew);
  Line a(vec({0, 0, 0}), vec({1, 0, 0})), b(vec({0, 1, 0}), vec({-1, 0, 0}));
  CHECK(classify_segment_pair(a, b).kind == PairKind::parallel);
}

TEST_CASE("weak_closure_check: periodic and generic") {
  ConfocalFamily f(kAxes);
  auto axis = simulate(f, Ray(vec({0, -1.5, 0}), vec({0, 1, 0})), 10, {1e-10, true});
  auto c = weak_closure_check(f, axis, 2, -1);
  CHECK(c.kind == ClosureKind::periodic);
  CHECK(c.residuals[0] < 1e-12);

  Ray r = ray_from_caustics(f, {0.5, 3}, {0.35, 0.55});
  auto t = simulate(f, r, 52);
  for (int n = 1; n <= 50; ++n) {
    CHECK(weak_closure_check(f, t, n, -1).kind == ClosureKind::none);
    CHECK(weak_closure_check(f, t, n, 0).kind == ClosureKind::none);
  }
  CHECK_THROWS_AS(weak_closure_check(f, t, 3, 1), DomainError);
  CHECK_THROWS_AS(weak_closure_check(f, t, 60, 0), DomainError);
}
