#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "adseq/seqspace.hpp"

namespace adseq {

enum class Regime { subcritical, critical, supercritical };

enum class Rule { adFJ, adYY, thm77, adBF, eq173, adBF2 };

std::string to_string(Rule rule);
std::string to_string(Regime regime);

struct RuleBounds {
  Rule rule;
  bool applicable = true;
  double d_bound = 0.0, e_bound = 0.0, f_bound = 0.0;
};

/// Every derived exponent of the admissibility calculus, plus the per-rule
/// (D,E,F) lower bounds.
struct ThresholdReport {
  int n = 1;
  Family family = Family::besov;
  double s = 0.0, tau = 0.0, p = 1.0, q = 1.0;
  double d = 0.0, d_tilde = 0.0;

  double delta = 0.0;       // d/p + d~/p'
  double j_exponent = 0.0;  // n / min(1,p) or n / min(1,p,q)
  double j_tau = 0.0;
  Regime regime = Regime::subcritical;
  double tau_hat = 0.0;     // [(tau - 1/p) + d/(np)]_+
  double j_tilde = 0.0;     // J_tau + min(n tau_hat, d/p)
  double s_tilde = 0.0;     // s + n tau_hat
  double r_tilde = 0.0;     // n / J_tilde, in (0,1]

  std::vector<RuleBounds> rules;
  const RuleBounds& bounds(Rule rule) const;
};

/// Full exponent/admissibility report; d~ is forced to 0 when p <= 1.
ThresholdReport classify(int n, Family family, double s, double tau, double p,
                         double q, double d, double d_tilde = 0.0);

struct Admissibility {
  bool admissible = false;
  std::array<double, 3> margins{};  // signed (D - bound, E - bound, F - bound)
};

/// Strict-inequality check of (D,E,F) against a rule's bounds; throws when
/// the rule is not applicable to this report.
Admissibility admissible(double D, double E, double F,
                         const ThresholdReport& report, Rule rule);

struct EquivalentExponents {
  double r_tilde = 0.0;
  double s_tilde = 0.0;
  std::string constraint;  // admissible (p~, q~) description
};

/// The (s~, r~, r~) reduction: adBF2-admissibility of (D,E,F) equals
/// adFJ-admissibility in the space with those exponents.
EquivalentExponents equivalent_exponents(const ThresholdReport& report);

struct RuleComparison {
  std::string fact;
  bool holds = false;
};

/// Verified order relations between the rules' bounds in this report's
/// regime (adBF vs thm77 in the subcritical range, eq173 vs thm77 in the
/// critical/supercritical range, adBF2 = adFJ at tau = d = 0).
std::vector<RuleComparison> compare_rules(const ThresholdReport& report);

}  // namespace adseq
