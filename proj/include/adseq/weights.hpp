#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adseq/dyadic.hpp"
#include "adseq/quadrature.hpp"

namespace adseq {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Spectral norm (largest singular value).
double spectral_norm(const Matrix& a);

/// A sample of a grid-backed weight: the matrix value at a point.
struct GridSample {
  std::vector<double> x;
  Matrix w;
};

/// Matrix weight W: R^n -> nonnegative-definite m x m matrices.
/// Kinds: identity; |x|^{-d} I (scalar power); diag(|x|^{-d_i}) (diagonal
/// power); table of samples looked up by nearest point (grid).
class WeightModel {
 public:
  enum class Kind { identity, scalar_power, diagonal_power, grid };

  static WeightModel identity(int m = 1);
  static WeightModel scalar_power(double d, int m = 1);
  static WeightModel diagonal_power(std::vector<double> exponents);
  static WeightModel grid(std::vector<GridSample> samples);

  Kind kind() const { return kind_; }
  int m() const { return m_; }
  const std::vector<double>& exponents() const { return exponents_; }

  QuadraturePolicy quad;

  Matrix eval(std::span<const double> x) const;
  /// W^{1/p}(x) via Hermitian eigendecomposition. Throws std::domain_error at
  /// singular points of power weights.
  Matrix root(std::span<const double> x, double p) const;
  /// |W^{1/p}(x) z|.
  double root_apply(std::span<const double> x, double p, const Vector& z) const;
  /// ||W^{1/p}(x) W^{-1/p}(y)||.
  double transition_norm(std::span<const double> x, std::span<const double> y,
                         double p) const;

  /// True when the closed cell [corner, corner+edge]^n meets the singular set
  /// (the origin, for power weights with a positive exponent).
  bool cell_singular(std::span<const double> corner, double edge) const;

 private:
  WeightModel() = default;
  Kind kind_ = Kind::identity;
  int m_ = 1;
  std::vector<double> exponents_;
  std::vector<GridSample> samples_;
  const GridSample& nearest(std::span<const double> x) const;
};

/// rho_Q(z) = (avg_Q |W^{1/p}(x) z|^p dx)^{1/p}.
double rho_q(const WeightModel& w, const DyadicCube& q, double p, const Vector& z);

/// Average of W over Q, entrywise quadrature.
Matrix average_weight(const WeightModel& w, const DyadicCube& q);

enum class ReducingProvenance { exact_scalar, exact_p2, ellipsoid_fit, closed_form_power, identity };

struct ReducingResult {
  Matrix a;
  double spread = 1.0;  // max/min of rho(z)/|A z| over sampled directions
  ReducingProvenance provenance = ReducingProvenance::exact_scalar;
};

/// Reducing operator of order p for W on Q. Strategy dispatch: scalar kinds
/// exactly via rho_Q; p=2 exactly via (avg_Q W)^{1/2}; otherwise a
/// least-squares ellipsoid fit over 8 m^2 sampled directions.
/// `force_ellipsoid` bypasses the dispatch (cross-strategy checks).
ReducingResult reducing_operator(const WeightModel& w, const DyadicCube& q, double p,
                                 bool force_ellipsoid = false);

/// The closed form 2^{j d/p} (1+|k|)^{-d/p} for the power weight |x|^{-d}.
double reducing_power_closed_form(double d, double p, const DyadicCube& q);

/// Per-cube family A_Q: identity, closed-form power, or a fitted table.
class ReducingFamily {
 public:
  static ReducingFamily identity(int m = 1);
  static ReducingFamily closed_form_power(double d, double p, int m = 1);
  static ReducingFamily fit(const WeightModel& w, double p, const Window& win);

  Matrix at(const DyadicCube& q) const;
  /// |A_Q z| without forming the matrix when a scalar shortcut exists.
  double apply_norm(const DyadicCube& q, const Vector& z) const;
  Vector apply_inverse(const DyadicCube& q, const Vector& z) const;
  bool covers(const DyadicCube& q) const;
  int m() const { return m_; }
  ReducingProvenance provenance() const { return provenance_; }
  double max_spread() const { return max_spread_; }
  bool is_scalar() const;
  double scalar_at(const DyadicCube& q) const;

 private:
  ReducingFamily() = default;
  ReducingProvenance provenance_ = ReducingProvenance::identity;
  int m_ = 1;
  double d_ = 0.0, p_ = 1.0;  // closed-form parameters
  std::map<DyadicCube, Matrix> table_;
  double max_spread_ = 1.0;
};

/// A_p-dimension data (d, d~, Delta) with p; d~ forced to 0 when p <= 1 and
/// Delta always recomputed as d/p + d~/p'.
struct WeightProfile {
  double p = 1.0;
  double d = 0.0;
  double d_tilde = 0.0;
  std::optional<double> ap_constant;

  double p_prime() const;
  double delta() const;
  void validate(int n) const;
};

struct ApEstimate {
  double value = 0.0;
  DyadicCube argmax;
};

/// [W]_{A_p} over the window; ess-sup replaced by the max over quadrature
/// nodes (a lower bound of the true ess-sup).
ApEstimate ap_constant(const WeightModel& w, double p, const Window& win);

struct DimensionFit {
  double slope = 0.0;
  std::vector<std::pair<int, double>> per_i;  // (i, max_Q quantity)
};

/// Least-squares slope of log2(max_Q quantity(Q, 2^i Q)) against i.
DimensionFit ap_dimension_fit(const WeightModel& w, double p, const Window& win,
                              int i_max, int max_cubes = 32);

struct Lemma22Report {
  double c = 0.0;
  DyadicCube arg_q, arg_r;
  std::size_t pairs = 0;
};

/// Fitted constant of ||A_Q A_R^{-1}|| against the two-sided envelope
/// max{(lR/lQ)^{d/p}, (lQ/lR)^{d~/p'}} (1+|c_Q-c_R|/(l v l))^Delta.
Lemma22Report lemma22_check(const ReducingFamily& fam, const WeightProfile& prof,
                            std::span<const std::pair<DyadicCube, DyadicCube>> pairs);

}  // namespace adseq
