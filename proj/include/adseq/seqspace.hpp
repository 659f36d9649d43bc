#pragma once

#include <complex>
#include <map>
#include <optional>

#include "adseq/dyadic.hpp"
#include "adseq/weights.hpp"

namespace adseq {

enum class Family { besov, triebel };

/// Space parameters (s, tau, p, q); q = +inf selects the sup modification,
/// p = +inf is accepted for the Besov family only.
struct SpaceParams {
  Family family = Family::besov;
  double s = 0.0;
  double tau = 0.0;
  double p = 1.0;
  double q = 1.0;

  double r() const { return std::min({p, q, 1.0}); }
  void validate() const;
};

/// Finitely supported map from dyadic cubes to C^m coefficients.
struct CoeffSequence {
  int n = 1;
  int m = 1;
  std::map<DyadicCube, Vector> entries;

  CoeffSequence() = default;
  CoeffSequence(int dim, int target) : n(dim), m(target) {}

  void set(const DyadicCube& q, Vector v);
  const Vector* find(const DyadicCube& q) const;

  CoeffSequence scaled(std::complex<double> factor) const;
  static CoeffSequence linear(std::complex<double> a, const CoeffSequence& t,
                              std::complex<double> b, const CoeffSequence& u);
};

struct NormResult {
  double value = 0.0;
  /// Attaining cube of the tau-sup; absent for tau = 0, where the norm is the
  /// full-window quasi-norm without the outer sup.
  std::optional<DyadicCube> attaining;
  double quad_error = 0.0;
  /// Attaining cube touches the window boundary (truncation bias suspected).
  bool boundary_biased = false;
};

/// Weighting of the level functions: plain |t_j|, matrix |W^{1/p} t_j|, or
/// averaging |A_j t_j|.
struct WeightMode {
  enum class Tag { unweighted, matrix, averaging };
  Tag tag = Tag::unweighted;
  const WeightModel* weight = nullptr;
  const ReducingFamily* family = nullptr;

  static WeightMode unweighted() { return {}; }
  static WeightMode matrix(const WeightModel& w) {
    return {Tag::matrix, &w, nullptr};
  }
  static WeightMode averaging(const ReducingFamily& f) {
    return {Tag::averaging, nullptr, &f};
  }
};

/// The b/f quasi-norm. For tau > 0 the outer sup runs over window cubes P
/// with j_P in [j_min, j_max]; for tau = 0 the norm is taken over the whole
/// window (the classical quasi-norm, which the sup over truncated P cannot
/// reach across the coordinate planes).
NormResult seq_norm(const CoeffSequence& t, const SpaceParams& params,
                    const WeightMode& mode, const Window& win);

/// f^s_{inf,q}(A) norm: sup_P (avg_P sum_{j>=j_P} 2^{jsq} |A_j t_j|^q)^{1/q};
/// for q = inf, sup_Q |Q|^{-(s/n+1/2)} |A_Q t_Q|.
NormResult f_infty_norm(const CoeffSequence& t, double s, double q,
                        const ReducingFamily& fam, const Window& win);

/// L^p(W) norm of a piecewise-constant vector field given per cube.
double lp_weighted_norm(const std::map<DyadicCube, Vector>& field,
                        const WeightModel& w, double p);

}  // namespace adseq
