#include "doctest.h"

#include <cmath>
#include <random>

#include "adseq/dyadic.hpp"

using namespace adseq;

TEST_CASE("cube_at basic examples") {
  CHECK(cube_at(0, std::vector<double>{0.5}) == DyadicCube(0, {0}));
  CHECK(cube_at(1, std::vector<double>{0.75}) == DyadicCube(1, {1}));
  CHECK(cube_at(0, std::vector<double>{-0.1, 2.3}) == DyadicCube(0, {-1, 2}));
}

TEST_CASE("derived geometry") {
  DyadicCube q(1, {1});
  CHECK(q.edge() == 0.5);
  CHECK(q.volume() == 0.5);
  CHECK(q.corner()[0] == 0.5);
  CHECK(q.center()[0] == 0.75);
  DyadicCube q2(2, {-3, 5});
  CHECK(q2.volume() == 1.0 / 16);
  CHECK(q2.corner()[0] == -0.75);
  CHECK(q2.corner()[1] == 1.25);
}

TEST_CASE("parent/children and containment") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> level(-6, 6);
  std::uniform_int_distribution<std::int64_t> pos(-40, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 300; ++trial) {
      DyadicCube q(level(rng), {});
      q.k.resize(n);
      for (auto& ki : q.k) ki = pos(rng);
      for (const auto& child : q.children()) CHECK(child.parent() == q);

      // x in Q  <=>  cube_at(j, x) == Q
      std::vector<double> x(n);
      const auto corner = q.corner();
      for (int i = 0; i < n; ++i) x[i] = corner[i] + unit(rng) * q.edge();
      CHECK(q.contains(x));
      CHECK(cube_at(q.j, x) == q);
    }
  }
}

TEST_CASE("distance_factor examples and symmetry") {
  CHECK(distance_factor(DyadicCube(0, {0}), DyadicCube(0, {0})) == 1.0);
  CHECK(distance_factor(DyadicCube(0, {0}), DyadicCube(0, {3})) == 4.0);
  CHECK(distance_factor(DyadicCube(1, {0}), DyadicCube(0, {2})) == 3.0);

  std::mt19937 rng(11);
  std::uniform_int_distribution<int> level(-4, 4);
  std::uniform_int_distribution<std::int64_t> pos(-20, 20);
  for (int trial = 0; trial < 500; ++trial) {
    DyadicCube q(level(rng), {pos(rng), pos(rng)});
    DyadicCube r(level(rng), {pos(rng), pos(rng)});
    CHECK(distance_factor(q, r) == distance_factor(r, q));
  }
}

TEST_CASE("window enumeration") {
  Window w{0, 0, 1, 1};
  auto cubes = w.enumerate();
  REQUIRE(cubes.size() == 2);
  CHECK(cubes[0] == DyadicCube(0, {-1}));
  CHECK(cubes[1] == DyadicCube(0, {0}));

  CHECK(Window{0, 1, 1, 1}.enumerate().size() == 6);
  CHECK(Window{0, 0, 2, 2}.enumerate().size() == 16);
}

TEST_CASE("window levels partition the box") {
  Window w{-1, 2, 2, 2};
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> coord(-w.box_halfwidth(),
                                               w.box_halfwidth());
  for (int j = w.j_min; j <= w.j_max; ++j) {
    const auto cubes = w.level_cubes(j);
    for (int trial = 0; trial < 400; ++trial) {
      std::vector<double> x{coord(rng), coord(rng)};
      int hits = 0;
      for (const auto& q : cubes)
        if (q.contains(x)) ++hits;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("window guards") {
  CHECK_THROWS(Window{2, 1, 1, 1}.validate());
  CHECK_THROWS(Window{0, 0, 0, 1}.validate());
  CHECK_THROWS(Window{0, 40, 4, 3}.validate());
}

TEST_CASE("shifted cover examples") {
  {
    const auto cover = shifted_cover(RealCube{{0.7}, 0.5});
    CHECK(cover.gamma[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(cover.cube.edge() == 1.0);
    CHECK(cover.cube.corner()[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  {
    const auto cover = shifted_cover(RealCube{{-0.2}, 0.25});
    CHECK(cover.gamma[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(cover.cube.edge() == 0.5);
    CHECK(cover.cube.corner()[0] == doctest::Approx(-1.0 / 3).epsilon(1e-12));
  }
  {
    const auto cover = shifted_cover(RealCube{{0.1}, 0.5});
    CHECK(cover.gamma[0] == 0.0);
    CHECK(cover.cube.edge() == 1.0);
    CHECK(cover.cube.corner()[0] == 0.0);
  }
  CHECK_THROWS(shifted_cover(RealCube{{0.0}, -1.0}));
}

TEST_CASE("shifted cover postcondition on random cubes") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  std::uniform_real_distribution<double> log_edge(-6.0, 6.0);
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 5000; ++trial) {
      RealCube q;
      q.edge = std::exp2(log_edge(rng));
      q.corner.resize(n);
      for (auto& c : q.corner) c = coord(rng);
      const auto cover = shifted_cover(q);
      const double ls = cover.cube.edge();
      CHECK(ls > 1.5 * q.edge);
      CHECK(ls <= 3.0 * q.edge);
      const auto sc = cover.cube.corner();
      for (int i = 0; i < n; ++i) {
        CHECK(sc[i] <= q.corner[i] + 1e-12 * ls);
        CHECK(q.corner[i] + q.edge <= sc[i] + ls + 1e-12 * ls);
      }
    }
  }
}

// 1 + |x-y|/(l v l) is comparable for any choice of points in the two cubes,
// with constant 1 + 2 sqrt(n).
TEST_CASE("anchor comparability") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> level(-4, 4);
  std::uniform_int_distribution<std::int64_t> pos(-30, 30);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 1; n <= 3; ++n) {
    const double c_n = 1.0 + 2.0 * std::sqrt(static_cast<double>(n));
    for (int trial = 0; trial < 3500; ++trial) {
      DyadicCube q(level(rng), {}), r(level(rng), {});
      q.k.resize(n);
      r.k.resize(n);
      for (auto& ki : q.k) ki = pos(rng);
      for (auto& ki : r.k) ki = pos(rng);
      const double lmax = std::max(q.edge(), r.edge());
      double d2 = 0.0;
      const auto cq = q.corner(), cr = r.corner();
      for (int i = 0; i < n; ++i) {
        const double x = cq[i] + unit(rng) * q.edge();
        const double y = cr[i] + unit(rng) * r.edge();
        d2 += (x - y) * (x - y);
      }
      const double sample = 1.0 + std::sqrt(d2) / lmax;
      const double anchored = distance_factor(q, r);
      CHECK(sample / anchored <= c_n);
      CHECK(anchored / sample <= c_n);
    }
  }
}

// 1 + 2^j |x-y| ~ 2^{j-j_P} |k| for x in P, y in P + k l(P), ||k||_inf >= 2.
TEST_CASE("separated translate comparability") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> level(-3, 3), excess(0, 5);
  std::uniform_int_distribution<std::int64_t> pos(-10, 10), shift(2, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n = 1; n <= 2; ++n) {
    const double c_n = 4.0 + 2.0 * std::sqrt(static_cast<double>(n));
    for (int trial = 0; trial < 2000; ++trial) {
      DyadicCube p(level(rng), {});
      p.k.resize(n);
      for (auto& ki : p.k) ki = pos(rng);
      std::vector<std::int64_t> k(n);
      k[0] = shift(rng);  // ensures ||k||_inf >= 2
      for (int i = 1; i < n; ++i) k[i] = pos(rng) % 3;
      const int j = p.j + excess(rng);
      const auto corner = p.corner();
      double d2 = 0.0, k2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = corner[i] + unit(rng) * p.edge();
        const double y = corner[i] + static_cast<double>(k[i]) * p.edge() +
                         unit(rng) * p.edge();
        d2 += (x - y) * (x - y);
        k2 += static_cast<double>(k[i]) * static_cast<double>(k[i]);
      }
      const double lhs = 1.0 + std::ldexp(std::sqrt(d2), j);
      const double rhs = std::ldexp(std::sqrt(k2), j - p.j);
      CHECK(lhs / rhs <= c_n);
      CHECK(rhs / lhs <= c_n);
    }
  }
}
