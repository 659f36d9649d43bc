#include "doctest.h"

#include <cmath>
#include <random>

#include "adseq/seqspace.hpp"

using namespace adseq;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CoeffSequence random_sequence(std::mt19937& rng, const Window& win, int m,
                              double fill = 0.3) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CoeffSequence t(win.n, m);
  for (const auto& q : win.enumerate()) {
    if (u(rng) > fill) continue;
    Vector v(m);
    for (int i = 0; i < m; ++i) v(i) = {g(rng), g(rng)};
    t.set(q, v);
  }
  return t;
}

}  // namespace

TEST_CASE("delta sequence has unit norm in every space") {
  Window win{-2, 2, 4, 1};
  CoeffSequence t(1, 2);
  t.set(DyadicCube(0, {0}), Vector::Unit(2, 0));
  const WeightMode mode = WeightMode::unweighted();
  for (Family fam : {Family::besov, Family::triebel}) {
    for (double s : {-1.0, 0.0, 1.5}) {
      for (double p : {0.5, 1.0, 2.0}) {
        for (double q : {0.7, 1.0, 3.0, kInf}) {
          SpaceParams params{fam, s, 0.0, p, q};
          CHECK(seq_norm(t, params, mode, win).value ==
                doctest::Approx(1.0).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("single-cube closed form") {
  // ||t||_{b^s_{p,q}} = 2^{j(s + n/2 - n/p)} for a unit coefficient on Q_{j,0}
  Window win{0, 2, 2, 1};
  CoeffSequence t(1, 1);
  t.set(DyadicCube(1, {0}), Vector::Ones(1));
  SpaceParams params{Family::besov, 0.0, 0.0, 1.0, 1.0};
  CHECK(seq_norm(t, params, WeightMode::unweighted(), win).value ==
        doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));

  SpaceParams p2{Family::besov, 0.7, 0.0, 3.0, 2.0};
  CHECK(seq_norm(t, p2, WeightMode::unweighted(), win).value ==
        doctest::Approx(std::pow(2.0, 0.7 + 0.5 - 1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("level-0 averaging sequence with tau = 1/p") {
  for (double p : {0.5, 1.0, 2.0}) {
    Window win{0, 0, 8, 1};
    const auto fam = ReducingFamily::closed_form_power(0.5, p, 1);
    CoeffSequence t(1, 1);
    for (const auto& q : win.enumerate())
      t.set(q, fam.apply_inverse(q, Vector::Ones(1)));
    SpaceParams params{Family::besov, 0.0, 1.0 / p, p, 2.0};
    const auto result = seq_norm(t, params, WeightMode::averaging(fam), win);
    CHECK(result.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.attaining.has_value());
  }
}

TEST_CASE("homogeneity is exact") {
  std::mt19937 rng(7);
  Window win{-1, 2, 2, 1};
  const WeightModel power = WeightModel::scalar_power(0.5);
  const auto rfam = ReducingFamily::closed_form_power(0.5, 1.5, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const CoeffSequence t = random_sequence(rng, win, 1);
    if (t.entries.empty()) continue;
    const std::complex<double> lambda(1.7, -2.3);
    const CoeffSequence lt = t.scaled(lambda);
    for (Family fam : {Family::besov, Family::triebel}) {
      SpaceParams params{fam, 0.3, 0.2, 1.4, 2.2};
      for (const WeightMode& mode :
           {WeightMode::unweighted(), WeightMode::averaging(rfam),
            WeightMode::matrix(power)}) {
        const double a = seq_norm(lt, params, mode, win).value;
        const double b = std::abs(lambda) * seq_norm(t, params, mode, win).value;
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("r-power quasi-triangle inequality") {
  std::mt19937 rng(11);
  Window win{-1, 1, 2, 1};
  for (const auto& [p, q] : std::vector<std::pair<double, double>>{
           {0.5, 0.7}, {1.0, 2.0}, {2.0, 0.3}, {3.0, kInf}}) {
    const double r = std::min({p, q, 1.0});
    for (Family fam : {Family::besov, Family::triebel}) {
      SpaceParams params{fam, 0.4, 0.0, p, q};
      for (int trial = 0; trial < 200; ++trial) {
        const CoeffSequence t = random_sequence(rng, win, 1);
        const CoeffSequence u = random_sequence(rng, win, 1);
        const CoeffSequence sum = CoeffSequence::linear(1.0, t, 1.0, u);
        const double lhs =
            std::pow(seq_norm(sum, params, WeightMode::unweighted(), win).value, r);
        const double rhs =
            std::pow(seq_norm(t, params, WeightMode::unweighted(), win).value, r) +
            std::pow(seq_norm(u, params, WeightMode::unweighted(), win).value, r);
        CHECK(lhs <= rhs * (1.0 + 1e-11));
      }
    }
  }
}

TEST_CASE("besov and triebel coincide at p = q") {
  std::mt19937 rng(13);
  Window win{-1, 2, 2, 1};
  for (double p : {0.5, 1.0, 2.5}) {
    for (double tau : {0.0, 0.4}) {
      SpaceParams pb{Family::besov, 0.2, tau, p, p};
      SpaceParams pf{Family::triebel, 0.2, tau, p, p};
      for (int trial = 0; trial < 30; ++trial) {
        const CoeffSequence t = random_sequence(rng, win, 1);
        const double b = seq_norm(t, pb, WeightMode::unweighted(), win).value;
        const double f = seq_norm(t, pf, WeightMode::unweighted(), win).value;
        CHECK(b == doctest::Approx(f).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("embedding between besov and triebel scales") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> su(-1.5, 1.5), pu(0.4, 3.0);
  Window win{-1, 2, 2, 1};
  for (int draw = 0; draw < 5; ++draw) {
    const double s = su(rng), p = pu(rng), q = pu(rng);
    SpaceParams f{Family::triebel, s, 0.0, p, q};
    SpaceParams b_hi{Family::besov, s, 0.0, p, std::max(p, q)};
    SpaceParams b_lo{Family::besov, s, 0.0, p, std::min(p, q)};
    for (int trial = 0; trial < 50; ++trial) {
      const CoeffSequence t = random_sequence(rng, win, 1);
      const double nf = seq_norm(t, f, WeightMode::unweighted(), win).value;
      CHECK(seq_norm(t, b_hi, WeightMode::unweighted(), win).value <=
            nf * (1.0 + 1e-12) + 1e-12);
      CHECK(nf <= seq_norm(t, b_lo, WeightMode::unweighted(), win).value *
                      (1.0 + 1e-12) +
                  1e-12);
    }
  }
}

TEST_CASE("lq monotonicity in q") {
  std::mt19937 rng(19);
  Window win{-1, 1, 2, 1};
  for (int trial = 0; trial < 50; ++trial) {
    const CoeffSequence t = random_sequence(rng, win, 1);
    double previous = kInf;
    for (double q : {0.4, 1.0, 2.0, kInf}) {
      SpaceParams params{Family::besov, 0.1, 0.0, 1.3, q};
      const double value = seq_norm(t, params, WeightMode::unweighted(), win).value;
      CHECK(value <= previous * (1.0 + 1e-12));
      previous = value;
    }
  }
}

TEST_CASE("scalar weights: W-mode equals averaging mode") {
  std::mt19937 rng(23);
  Window win{-1, 2, 2, 1};
  WeightModel power = WeightModel::scalar_power(0.5);
  for (double p : {0.8, 2.0}) {
    const auto fam = ReducingFamily::fit(power, p, win);
    SpaceParams params{Family::besov, 0.3, 0.0, p, 1.7};
    for (int trial = 0; trial < 10; ++trial) {
      const CoeffSequence t = random_sequence(rng, win, 1);
      const double w_mode = seq_norm(t, params, WeightMode::matrix(power), win).value;
      const double a_mode = seq_norm(t, params, WeightMode::averaging(fam), win).value;
      CHECK(w_mode == doctest::Approx(a_mode).epsilon(1e-6));
    }
  }
}

TEST_CASE("window monotonicity") {
  std::mt19937 rng(29);
  Window small{-1, 1, 2, 1};
  Window large{-2, 2, 8, 1};
  for (double tau : {0.0, 0.3, 1.0}) {
    SpaceParams params{Family::triebel, 0.2, tau, 1.2, 2.4};
    for (int trial = 0; trial < 20; ++trial) {
      const CoeffSequence t = random_sequence(rng, small, 1);
      const double a = seq_norm(t, params, WeightMode::unweighted(), small).value;
      const double b = seq_norm(t, params, WeightMode::unweighted(), large).value;
      CHECK(b >= a * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("series splitting inequality") {
  // sum a_i b_i <= (sum a_i)^{(1-1/q)_+} (sum a_i^{min(1,q)} b_i^q)^{1/q}
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (double q : {0.3, 1.0, 2.0, kInf}) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> a(12), b(12);
      for (auto& v : a) v = u(rng);
      for (auto& v : b) v = u(rng);
      double lhs = 0.0, sa = 0.0, weighted = 0.0, sup_b = 0.0;
      for (int i = 0; i < 12; ++i) {
        lhs += a[i] * b[i];
        sa += a[i];
        sup_b = std::max(sup_b, b[i]);
        if (!std::isinf(q))
          weighted += std::pow(a[i], std::min(1.0, q)) * std::pow(b[i], q);
      }
      const double rhs =
          std::isinf(q)
              ? sa * sup_b
              : std::pow(sa, std::max(0.0, 1.0 - 1.0 / q)) *
                    std::pow(weighted, 1.0 / q);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("f-infinity norm examples") {
  Window win{-2, 3, 2, 1};
  const auto ident = ReducingFamily::identity(1);

  // single cube with |A_R t_R| = |R|^{1/2} attains 2^{js} at P = R
  for (int j : {-1, 0, 2}) {
    for (double s : {0.0, 0.8}) {
      CoeffSequence t(1, 1);
      DyadicCube r(j, {0});
      t.set(r, std::sqrt(r.volume()) * Vector::Ones(1));
      const auto res = f_infty_norm(t, s, 2.0, ident, win);
      CHECK(res.value == doctest::Approx(std::pow(2.0, j * s)).epsilon(1e-12));
      CHECK(*res.attaining == r);
    }
  }

  // q = inf on t_Q = |Q|^{s/n + 1/2} A_Q^{-1} e gives exactly 1
  const auto fam = ReducingFamily::closed_form_power(0.5, 2.0, 1);
  CoeffSequence t(1, 1);
  const double s = 0.4;
  for (const auto& q : win.enumerate())
    t.set(q, std::pow(q.volume(), s / 1 + 0.5) *
                 fam.apply_inverse(q, Vector::Ones(1)));
  CHECK(f_infty_norm(t, s, kInf, fam, win).value ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("f-infinity norm of the level-damped sequence is bounded") {
  // t_Q = (1+|j_Q|)^{-1} |Q|^{s/n+1/2} A_Q^{-1} e: the value equals
  // sup_P (sum_{j >= j_P} (1+|j|)^{-q})^{1/q} over the window levels
  const double s = -0.3, q = 2.0;
  const auto fam = ReducingFamily::closed_form_power(0.5, 2.0, 1);
  double previous = 0.0;
  for (int size : {2, 4, 6}) {
    Window win{-size, size, 1, 1};
    CoeffSequence t(1, 1);
    for (const auto& cube : win.enumerate())
      t.set(cube, std::pow(cube.volume(), s + 0.5) / (1.0 + std::abs(cube.j)) *
                      fam.apply_inverse(cube, Vector::Ones(1)));
    const double value = f_infty_norm(t, s, q, fam, win).value;
    double oracle = 0.0;
    for (int j = -size; j <= size; ++j) oracle += std::pow(1.0 + std::abs(j), -q);
    CHECK(value <= std::pow(oracle, 1.0 / q) * (1.0 + 1e-10));
    CHECK(value >= previous * (1.0 - 1e-12));
    previous = value;
  }
  // bounded over growing windows: sup over all levels converges for q > 1
  CHECK(previous <= std::pow(2.0 * 1.6449340668482264 - 1.0, 1.0 / q));
}

TEST_CASE("weighted Lp norm") {
  const WeightModel ident = WeightModel::identity(2);
  std::map<DyadicCube, Vector> field;
  Vector v(2);
  v << std::complex<double>(3.0, 0.0), std::complex<double>(0.0, 4.0);
  field[DyadicCube(1, {0, 0})] = v;
  field[DyadicCube(1, {3, 1})] = 2.0 * v;
  // plain L^p of a piecewise-constant field
  const double p = 1.7;
  const double expected =
      std::pow(0.25 * std::pow(5.0, p) + 0.25 * std::pow(10.0, p), 1.0 / p);
  CHECK(lp_weighted_norm(field, ident, p) == doctest::Approx(expected).epsilon(1e-12));

  // analytic oracle: e 1_{[1,2)}, W = |x|^{-1/2}, p = 2
  const WeightModel power = WeightModel::scalar_power(0.5);
  std::map<DyadicCube, Vector> single;
  single[DyadicCube(0, {1})] = Vector::Ones(1);
  CHECK(lp_weighted_norm(single, power, 2.0) ==
        doctest::Approx(std::sqrt(2.0 * std::sqrt(2.0) - 2.0)).epsilon(1e-6));

  // scaling
  std::map<DyadicCube, Vector> scaled = single;
  scaled[DyadicCube(0, {1})] *= std::complex<double>(0.0, -2.5);
  CHECK(lp_weighted_norm(scaled, power, 2.0) ==
        doctest::Approx(2.5 * lp_weighted_norm(single, power, 2.0)).epsilon(1e-12));
}

TEST_CASE("norm rejects malformed input") {
  Window win{0, 1, 2, 1};
  CoeffSequence t(1, 1);
  t.set(DyadicCube(0, {0}), Vector::Ones(1));
  CHECK_THROWS(seq_norm(t, SpaceParams{Family::besov, 0, 0, 0.0, 1.0},
                        WeightMode::unweighted(), win));
  CHECK_THROWS(seq_norm(t, SpaceParams{Family::besov, 0, 0, 1.0, 0.0},
                        WeightMode::unweighted(), win));
  CHECK_THROWS(seq_norm(t, SpaceParams{Family::triebel, 0, 0, kInf, 1.0},
                        WeightMode::unweighted(), win));

  CoeffSequence outside(1, 1);
  outside.set(DyadicCube(0, {100}), Vector::Ones(1));
  CHECK_THROWS(seq_norm(outside, SpaceParams{Family::besov, 0, 0, 1, 1},
                        WeightMode::unweighted(), win));
  CHECK_THROWS(Window{1, 0, 2, 1}.validate());
}

TEST_CASE("tau-sup reports the attaining cube and boundary bias") {
  Window win{0, 2, 2, 1};
  CoeffSequence t(1, 1);
  t.set(DyadicCube(2, {-8}), Vector::Ones(1));  // leftmost fine cube
  SpaceParams params{Family::besov, 0.0, 0.7, 1.0, 1.0};
  const auto res = seq_norm(t, params, WeightMode::unweighted(), win);
  REQUIRE(res.attaining.has_value());
  CHECK(res.boundary_biased);

  CoeffSequence inner(1, 1);
  inner.set(DyadicCube(2, {1}), Vector::Ones(1));
  const auto res2 = seq_norm(inner, params, WeightMode::unweighted(), win);
  REQUIRE(res2.attaining.has_value());
  CHECK_FALSE(res2.boundary_biased);
}
