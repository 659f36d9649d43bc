#pragma once

#include <string>
#include <vector>

#include "adseq/adkernel.hpp"
#include "adseq/seqspace.hpp"

namespace adseq {

/// Structured test sequences: the unweighted ones live at level 0 / level N /
/// all fine levels; the sharp2_* ones carry closed-form reducing-operator
/// inverses for the power weight |x|^{-d}.
enum class ExperimentFamily {
  exa1_delta,
  tN_level0,
  exa2_levelN,
  exa3_smallcubes,
  exa4_decay,
  exa5_level0_ones,
  binf_power,
  sharp2_D,
  sharp2_E,
  sharp2_F,
};

ExperimentFamily parse_family(const std::string& name);
std::string to_string(ExperimentFamily f);

struct ExperimentSpec {
  ExperimentFamily family = ExperimentFamily::exa1_delta;
  int n = 1;
  int m = 1;
  SpaceParams space;
  AdParams kernel;
  double amplitude = 1.0;
  double weight_d = 0.0;  // power-weight exponent for the sharp2 families
  std::vector<long> ladder;

  bool weighted() const;
  void validate() const;
};

/// Exact construction of the family member at ladder point N.
CoeffSequence make_sequence(const ExperimentSpec& spec, long N);

/// Window implied by N: sized so the support plus the documented decay
/// margin fits inside (margin capped at the support radius; see README).
Window family_window(const ExperimentSpec& spec, long N);

struct ReferenceNorm {
  double lo = 0.0;
  double hi = 0.0;
  bool exact = false;
};

/// Paper-stated value (exact families) or recorded two-sided bounds
/// (equivalence families). Throws when the family has no reference for the
/// given parameters.
ReferenceNorm reference_norm(const ExperimentSpec& spec, long N);

enum class GrowthModel { bounded, logarithmic, power };
std::string to_string(GrowthModel m);

struct GrowthPoint {
  long N = 0;
  double norm_in = 0.0, norm_out = 0.0, ratio = 0.0;
};

struct GrowthSeries {
  std::vector<GrowthPoint> points;
  // ratio ~ c0 + c1 log N, least squares on the upper half-ladder
  double log_c0 = 0.0, log_c1 = 0.0, log_r2 = 0.0;
  // ratio ~ c N^alpha, least squares in log-log coordinates
  double pow_c = 0.0, pow_alpha = 0.0, pow_r2 = 0.0;
  GrowthModel model = GrowthModel::bounded;
  double last_step_change = 0.0;
};

/// Ladder run of ||B t^{(N)}|| / ||t^{(N)}|| with eps_cut = 0 inside the
/// family window, plus the growth-model fit.
GrowthSeries growth_run(const ExperimentSpec& spec);

std::string growth_csv(const GrowthSeries& series);

enum class SeriesFamily { sum_33x, sum_33z, sharp2_E_series, sharp2_F_series };
SeriesFamily parse_series_family(const std::string& name);

struct SeriesParams {
  int n = 1;
  double a = 2.0;             // decay exponent of the lattice/integral sums
  int j = 0;                  // scale parameter of sum_33z / sum_33x
  std::vector<double> y;      // offset (defaults to 0)
  double E = 0.0, F = 0.0, s = 0.0, d = 0.0, p = 1.0;  // sharp2 series data
};

struct SeriesProbe {
  std::vector<std::pair<long, double>> partial;  // (depth, partial sum)
  double value = 0.0;       // deepest partial sum
  double tail_ratio = 0.0;  // limiting block-sum ratio (doubling blocks)
  bool convergent = false;
};

/// Partial sums with a block ratio test on dyadic tail blocks.
SeriesProbe series_probe(SeriesFamily family, const SeriesParams& params, long depth);

/// Spread of the normalized (33z) sums over `count` random offsets y.
std::pair<double, double> sum33z_spread(double a, int n, int j, int count,
                                        unsigned seed, long depth);

}  // namespace adseq
