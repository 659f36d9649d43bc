#include "doctest.h"

#include <cmath>
#include <random>

#include "adseq/weights.hpp"

using namespace adseq;

namespace {
const double kRho12 = std::sqrt(2.0 * std::sqrt(2.0) - 2.0);  // avg of x^{-1/2} on [1,2), sqrt
}

TEST_CASE("weight_root examples") {
  const WeightModel ident = WeightModel::identity(3);
  CHECK(ident.root(std::vector<double>{0.3}, 1.7).isApprox(Matrix::Identity(3, 3)));

  const WeightModel power = WeightModel::scalar_power(0.5);
  const Matrix r = power.root(std::vector<double>{4.0}, 2.0);
  CHECK(r(0, 0).real() == doctest::Approx(std::pow(4.0, -0.25)).epsilon(1e-14));

  const WeightModel diag = WeightModel::diagonal_power({0.2, 0.8});
  const Matrix rd = diag.root(std::vector<double>{2.0}, 1.0);
  CHECK(rd(0, 0).real() == doctest::Approx(std::pow(2.0, -0.2)).epsilon(1e-14));
  CHECK(rd(1, 1).real() == doctest::Approx(std::pow(2.0, -0.8)).epsilon(1e-14));
  CHECK(rd(0, 1) == std::complex<double>(0.0));

  CHECK_THROWS_AS(power.root(std::vector<double>{0.0}, 2.0), std::domain_error);
}

TEST_CASE("weight_root recomposes to the weight") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> coord(0.1, 8.0);
  std::uniform_real_distribution<double> expo(0.3, 3.0);

  std::vector<GridSample> samples;
  for (int i = 0; i < 16; ++i) {
    GridSample s;
    s.x = {coord(rng)};
    Matrix a(2, 2);
    a << std::complex<double>(2.0 + i * 0.1, 0.0), std::complex<double>(0.3, 0.2),
        std::complex<double>(0.3, -0.2), std::complex<double>(1.5, 0.0);
    s.w = a;
    samples.push_back(std::move(s));
  }
  const WeightModel grid = WeightModel::grid(samples);
  const WeightModel power = WeightModel::scalar_power(0.7, 2);
  const WeightModel diag = WeightModel::diagonal_power({0.2, 0.9});

  for (int trial = 0; trial < 1000; ++trial) {
    const std::vector<double> x{coord(rng)};
    const double p = expo(rng);
    for (const WeightModel* w : {&grid, &power, &diag}) {
      const Matrix root = w->root(x, p);
      const Matrix direct = w->eval(x);
      // raise W^{1/p} back to power p spectrally
      Eigen::SelfAdjointEigenSolver<Matrix> es(root);
      Eigen::VectorXd powered(es.eigenvalues().size());
      for (Eigen::Index i = 0; i < powered.size(); ++i)
        powered(i) = std::pow(std::max(es.eigenvalues()(i), 0.0), p);
      const Matrix recomposed = es.eigenvectors() * powered.asDiagonal() *
                                es.eigenvectors().adjoint();
      CHECK((recomposed - direct).norm() <= 1e-10 * (1.0 + direct.norm()));
    }
  }
}

TEST_CASE("rho_q identity and analytic oracles") {
  const WeightModel ident = WeightModel::identity(2);
  Vector z(2);
  z << std::complex<double>(3.0, 4.0), std::complex<double>(0.0, 1.0);
  for (double p : {0.5, 1.0, 2.0, 3.5})
    CHECK(rho_q(ident, DyadicCube(2, {5, -3}), p, z) ==
          doctest::Approx(z.norm()).epsilon(1e-12));

  const WeightModel power = WeightModel::scalar_power(0.5);
  // avg of x^{-d} on [1,2) is (2^{1-d}-1)/(1-d); d = 0.5, p = 2
  CHECK(rho_q(power, DyadicCube(0, {1}), 2.0, Vector::Ones(1)) ==
        doctest::Approx(kRho12).epsilon(1e-6));
  // singular cube [0,1): avg of x^{-1/2} = 2
  CHECK(rho_q(power, DyadicCube(0, {0}), 2.0, Vector::Ones(1)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(2e-3));
}

TEST_CASE("rho_q homogeneity") {
  const WeightModel power = WeightModel::scalar_power(0.4, 2);
  std::mt19937 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector z(2);
    z << std::complex<double>(g(rng), g(rng)), std::complex<double>(g(rng), g(rng));
    const std::complex<double> lambda(g(rng), g(rng));
    const DyadicCube q(1, {3, 1});
    const double lhs = rho_q(power, q, 1.3, lambda * z);
    const double rhs = std::abs(lambda) * rho_q(power, q, 1.3, z);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("reducing operator strategies") {
  const WeightModel ident = WeightModel::identity(2);
  const auto rid = reducing_operator(ident, DyadicCube(0, {0, 0}), 1.5);
  CHECK(rid.a.isApprox(Matrix::Identity(2, 2)));
  CHECK(rid.spread == 1.0);

  const WeightModel power = WeightModel::scalar_power(0.5);
  const auto rpow = reducing_operator(power, DyadicCube(0, {1}), 2.0);
  CHECK(rpow.a(0, 0).real() == doctest::Approx(kRho12).epsilon(1e-6));
  CHECK(rpow.provenance == ReducingProvenance::exact_scalar);

  // p = 2 diagonal: per-entry scalar values
  const WeightModel diag = WeightModel::diagonal_power({0.2, 0.8});
  const DyadicCube q(0, {2});
  const auto rd = reducing_operator(diag, q, 2.0);
  CHECK(rd.provenance == ReducingProvenance::exact_p2);
  const WeightModel s1 = WeightModel::scalar_power(0.2);
  const WeightModel s2 = WeightModel::scalar_power(0.8);
  CHECK(rd.a(0, 0).real() ==
        doctest::Approx(rho_q(s1, q, 2.0, Vector::Ones(1))).epsilon(1e-10));
  CHECK(rd.a(1, 1).real() ==
        doctest::Approx(rho_q(s2, q, 2.0, Vector::Ones(1))).epsilon(1e-10));
}

TEST_CASE("ellipsoid fit agrees with the exact scalar strategy") {
  const WeightModel power = WeightModel::scalar_power(0.6, 2);
  for (const DyadicCube& q : {DyadicCube(0, {1, 1}), DyadicCube(-1, {0, -1})}) {
    const auto exact = reducing_operator(power, q, 1.4, false);
    const auto fitted = reducing_operator(power, q, 1.4, true);
    CHECK(fitted.provenance == ReducingProvenance::ellipsoid_fit);
    CHECK((fitted.a - exact.a).norm() <= 1e-6 * exact.a.norm());
    CHECK(fitted.spread <= 1.0 + 1e-9);
  }
}

TEST_CASE("ellipsoid fit on a genuinely matrix weight") {
  // diagonal power at p != 2 goes through the fit; |A z| must reproduce
  // rho_Q(z) within the recorded spread on fresh directions
  const WeightModel diag = WeightModel::diagonal_power({0.1, 0.7});
  const DyadicCube q(1, {3, 2});
  const double p = 1.0;
  const auto fit = reducing_operator(diag, q, p);
  CHECK(fit.provenance == ReducingProvenance::ellipsoid_fit);
  std::mt19937 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 64; ++trial) {
    Vector z(2);
    z << std::complex<double>(g(rng), g(rng)), std::complex<double>(g(rng), g(rng));
    z.normalize();
    const double target = rho_q(diag, q, p, z);
    const double got = (fit.a * z).norm();
    CHECK(got / target <= fit.spread * 1.05);
    CHECK(target / got <= fit.spread * 1.05);
  }
}

TEST_CASE("closed-form reducing operators") {
  CHECK(reducing_power_closed_form(0.7, 1.3, DyadicCube(0, {0})) == 1.0);
  CHECK(reducing_power_closed_form(1.0, 2.0, DyadicCube(0, {3})) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(reducing_power_closed_form(0.5, 2.0, DyadicCube(2, {0})) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("closed-form vs quadrature reducing operators stay comparable") {
  const WeightModel power = WeightModel::scalar_power(0.5);
  std::mt19937 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  double lo = 1e300, hi = 0.0;
  for (int j = -3; j <= 3; ++j) {
    for (std::int64_t k = -8; k <= 8; ++k) {
      const DyadicCube q(j, {k});
      const double numeric =
          reducing_operator(power, q, 2.0).a(0, 0).real();
      const double closed = reducing_power_closed_form(0.5, 2.0, q);
      const double ratio = numeric / closed;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  CHECK(hi / lo <= 4.0);
  CHECK(lo > 0.0);
  (void)g;
}

TEST_CASE("ap constant") {
  const Window win{-2, 2, 4, 1};
  const WeightModel ident = WeightModel::identity(2);
  CHECK(ap_constant(ident, 0.7, win).value == 1.0);
  CHECK(ap_constant(ident, 3.0, win).value == 1.0);

  // monotone under window growth
  const WeightModel power = WeightModel::scalar_power(0.5);
  const double small = ap_constant(power, 2.0, Window{-1, 1, 2, 1}).value;
  const double large = ap_constant(power, 2.0, Window{-2, 2, 4, 1}).value;
  CHECK(large >= small);

  // quadrature stability at +-5%
  WeightModel fine = power;
  fine.quad.points = 8;
  const double refined = ap_constant(fine, 2.0, Window{-2, 2, 4, 1}).value;
  CHECK(std::abs(refined - large) / large < 0.05);
}

TEST_CASE("non-Ap weight detected by refinement divergence") {
  // d = 1.5 > n = 1: averages of |x|^{-3/2} blow up on cubes approaching 0
  const WeightModel bad = WeightModel::scalar_power(1.5);
  double previous = 0.0;
  for (int jmax = 0; jmax <= 8; jmax += 4) {
    const double value = ap_constant(bad, 1.0, Window{0, jmax, 2, 1}).value;
    CHECK(value > previous);
    previous = value;
  }
  CHECK(previous > 100.0);
}

TEST_CASE("ap dimension fit") {
  const Window win{-2, 2, 4, 1};
  const WeightModel ident = WeightModel::identity(1);
  const auto flat = ap_dimension_fit(ident, 2.0, win, 4);
  CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-12));
  for (const auto& [i, v] : flat.per_i) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  const WeightModel power = WeightModel::scalar_power(0.5);
  CHECK(std::abs(ap_dimension_fit(power, 2.0, win, 8).slope - 0.5) < 0.1);
  CHECK(std::abs(ap_dimension_fit(power, 0.75, win, 8).slope - 0.5) < 0.1);
  CHECK_THROWS(ap_dimension_fit(power, 2.0, win, 1));
}

TEST_CASE("weight profile validation") {
  WeightProfile prof{0.5, 0.5, 0.0, std::nullopt};
  prof.validate(1);
  CHECK(prof.delta() == doctest::Approx(1.0).epsilon(1e-15));

  WeightProfile bad{0.5, 0.5, 0.3, std::nullopt};
  CHECK_THROWS(bad.validate(1));

  WeightProfile p2{2.0, 0.5, 0.3, std::nullopt};
  p2.validate(1);
  CHECK(p2.delta() == doctest::Approx(0.25 + 0.15).epsilon(1e-15));
}

TEST_CASE("lemma22 envelope examples") {
  const auto fam = ReducingFamily::closed_form_power(0.5, 1.0, 1);
  WeightProfile prof{1.0, 0.5, 0.0, std::nullopt};

  std::vector<std::pair<DyadicCube, DyadicCube>> same{{DyadicCube(0, {2}), DyadicCube(0, {2})}};
  CHECK(lemma22_check(fam, prof, same).c == doctest::Approx(1.0).epsilon(1e-14));

  // LHS = ((1+3)/(1+0))^{0.5} = 2, envelope = (1+3)^{0.5} = 2
  std::vector<std::pair<DyadicCube, DyadicCube>> pair{{DyadicCube(0, {0}), DyadicCube(0, {3})}};
  const auto rep = lemma22_check(fam, prof, pair);
  CHECK(rep.c == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.arg_q == DyadicCube(0, {0}));
}

TEST_CASE("grid weight validation and lookup") {
  std::vector<GridSample> bad(1);
  bad[0].x = {0.0};
  Matrix notherm(2, 2);
  notherm << std::complex<double>(1, 0), std::complex<double>(1, 0),
      std::complex<double>(0, 0), std::complex<double>(1, 0);
  bad[0].w = notherm;
  CHECK_THROWS(WeightModel::grid(bad));

  std::vector<GridSample> table(2);
  table[0].x = {0.0};
  table[0].w = 2.0 * Matrix::Identity(1, 1);
  table[1].x = {1.0};
  table[1].w = 8.0 * Matrix::Identity(1, 1);
  const WeightModel grid = WeightModel::grid(table);
  CHECK(grid.eval(std::vector<double>{0.1})(0, 0).real() == 2.0);
  CHECK(grid.eval(std::vector<double>{0.9})(0, 0).real() == 8.0);
  CHECK(grid.root(std::vector<double>{0.9}, 3.0)(0, 0).real() ==
        doctest::Approx(2.0).epsilon(1e-12));
}
