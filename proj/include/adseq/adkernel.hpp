#pragma once

#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <variant>

#include "adseq/seqspace.hpp"

namespace adseq {

/// Exponents of the almost-diagonal envelope b^{DEF}.
struct AdParams {
  double D = 0.0;
  double E = 0.0;
  double F = 0.0;
};

/// b^{DEF}_{Q,R} = [1+|x_Q-x_R|/(l(Q) v l(R))]^{-D} (l(Q)/l(R))^E if
/// l(Q) <= l(R), else (l(R)/l(Q))^F. Equal edges take the E branch.
double bdef_entry(const DyadicCube& q, const DyadicCube& r, const AdParams& p);

/// Two-dimensional truncation of kernel application: level band plus entry
/// magnitude cutoff.
struct TruncationPolicy {
  int level_band = std::numeric_limits<int>::max();
  double eps_cut = 0.0;
};

/// Infinite matrix over dyadic cubes in one of several evaluable forms.
class AdKernel {
 public:
  struct Analytic {
    AdParams params;
    double amplitude = 1.0;
  };
  struct Diagonal {
    std::complex<double> value{1.0, 0.0};
    std::map<DyadicCube, std::complex<double>> overrides;
  };
  struct Explicit {
    std::map<std::pair<DyadicCube, DyadicCube>, std::complex<double>> entries;
  };
  struct Conjugated {
    std::shared_ptr<const AdKernel> base;
    std::shared_ptr<const ReducingFamily> family;
  };
  struct Scaled {
    std::shared_ptr<const AdKernel> base;
    double s = 0.0;
  };
  struct Triangular {
    std::shared_ptr<const AdKernel> base;
    bool keep_coarser = true;  // keep l(R) >= l(Q) (B0); else l(R) < l(Q) (B1)
  };
  using Form = std::variant<Analytic, Diagonal, Explicit, Conjugated, Scaled, Triangular>;

  AdKernel() : form_(Diagonal{}) {}
  explicit AdKernel(Form f, TruncationPolicy t = {})
      : form_(std::move(f)), trunc(t) {}

  static AdKernel analytic(AdParams p, double amplitude = 1.0,
                           TruncationPolicy t = {});
  static AdKernel diagonal(std::complex<double> value, TruncationPolicy t = {});
  static AdKernel explicit_table(
      std::map<std::pair<DyadicCube, DyadicCube>, std::complex<double>> entries,
      TruncationPolicy t = {});

  std::complex<double> entry(const DyadicCube& q, const DyadicCube& r) const;
  const Form& form() const { return form_; }

  /// Envelope decay exponent across levels, when the form admits one
  /// (min(E,F) for analytic, adjusted under scaling/conjugation).
  std::optional<double> level_decay() const;
  /// A bound for |entry| at level offset dj (any spatial offset), used by the
  /// tail accounting; nullopt when the form gives none.
  std::optional<double> level_envelope(int dj) const;

  TruncationPolicy trunc;

 private:
  Form form_;
};

/// Entrywise multiplication by (l(R)/l(Q))^s; analytic (D,E,F) becomes
/// (D, E-s, F+s) exactly.
AdKernel rescale(const AdKernel& b, double s);

/// Entrywise |b_{Q,R}| ||A_Q A_R^{-1}||.
AdKernel conjugate(const AdKernel& b, std::shared_ptr<const ReducingFamily> fam);

/// Upper/lower triangular split by edge length; entrywise B = B0 + B1.
std::pair<AdKernel, AdKernel> split_triangular(const AdKernel& b);

struct VerifyResult {
  double c = 0.0;  // max |b_{Q,R}| / b^{DEF}_{Q,R} over window pairs
  bool passed = true;
  DyadicCube witness_q, witness_r;
  double witness_ratio = 0.0;
};

/// Fitted almost-diagonality constant against (D,E,F); fails with a witness
/// pair when C exceeds `bound`.
VerifyResult verify_ad(const AdKernel& b, const AdParams& params, const Window& win,
                       double bound = std::numeric_limits<double>::infinity());

struct ApplyResult {
  CoeffSequence out;
  /// Uniform bound on the truncation error of every output coefficient;
  /// +inf when the kernel form gives no computable envelope decay.
  double tail_bound = 0.0;
};

/// (B t)_Q = sum_R b_{Q,R} t_R over the window, truncated by the kernel's
/// policy (level band and entry cutoff).
ApplyResult apply(const AdKernel& b, const CoeffSequence& t, const Window& win);

/// Finite-window composition (A o B)_{Q,P} = sum_R a_{Q,R} b_{R,P} as an
/// explicit table, with the same cutoff accounting as apply.
AdKernel compose(const AdKernel& a, const AdKernel& b, const Window& win);

struct OpNormStats {
  double delta_family = 0.0;
  double level_family = 0.0;
  double dense_family = 0.0;
  double overall = 0.0;
  std::vector<double> window_trend;  // overall max on nested windows
};

/// Empirical sup of |B t| / |t| over structured unit inputs: deltas,
/// level-concentrated rows, dense Gaussians.
OpNormStats op_norm_estimate(const AdKernel& b, const SpaceParams& params,
                             const WeightMode& mode, const Window& win,
                             int trials, unsigned seed = 1u);

}  // namespace adseq
