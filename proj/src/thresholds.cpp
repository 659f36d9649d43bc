#include "adseq/thresholds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace adseq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double positive_part(double v) { return v > 0.0 ? v : 0.0; }
}  // namespace

std::string to_string(Rule rule) {
  switch (rule) {
    case Rule::adFJ: return "adFJ";
    case Rule::adYY: return "adYY";
    case Rule::thm77: return "thm77";
    case Rule::adBF: return "adBF";
    case Rule::eq173: return "eq173";
    case Rule::adBF2: return "adBF2";
  }
  return "?";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::subcritical: return "subcritical";
    case Regime::critical: return "critical";
    case Regime::supercritical: return "supercritical";
  }
  return "?";
}

const RuleBounds& ThresholdReport::bounds(Rule rule) const {
  for (const auto& rb : rules)
    if (rb.rule == rule) return rb;
  throw std::logic_error("report: missing rule");
}

ThresholdReport classify(int n, Family family, double s, double tau, double p,
                         double q, double d, double d_tilde) {
  if (n < 1) throw std::invalid_argument("classify: n >= 1 required");
  if (!(p > 0.0) || std::isinf(p))
    throw std::invalid_argument("classify: p in (0,inf) required");
  if (!(q > 0.0)) throw std::invalid_argument("classify: q in (0,inf] required");
  if (tau < 0.0) throw std::invalid_argument("classify: tau >= 0 required");
  if (d < 0.0 || d >= n) throw std::invalid_argument("classify: d in [0,n) required");
  if (p <= 1.0 && d_tilde != 0.0)
    throw std::invalid_argument("classify: d~ must be 0 when p <= 1");
  if (d_tilde < 0.0 || d_tilde >= n)
    throw std::invalid_argument("classify: d~ in [0,n) required");

  ThresholdReport rep;
  rep.n = n;
  rep.family = family;
  rep.s = s;
  rep.tau = tau;
  rep.p = p;
  rep.q = q;
  rep.d = d;
  rep.d_tilde = d_tilde;

  const double nd = static_cast<double>(n);
  const double p_prime = p > 1.0 ? p / (p - 1.0) : kInf;
  rep.delta = d / p + (p > 1.0 ? d_tilde / p_prime : 0.0);

  const double min1p = std::min(1.0, p);
  const double min1q = std::isinf(q) ? 1.0 : std::min(1.0, q);
  rep.j_exponent =
      family == Family::besov ? nd / min1p : nd / std::min(min1p, min1q);

  const double inv_p = 1.0 / p;
  if (tau > inv_p || (tau == inv_p && std::isinf(q))) {
    rep.regime = Regime::supercritical;
    rep.j_tau = nd;
  } else if (tau == inv_p && family == Family::triebel) {
    rep.regime = Regime::critical;
    rep.j_tau = nd / min1q;
  } else {
    rep.regime = Regime::subcritical;
    rep.j_tau = rep.j_exponent;
  }

  rep.tau_hat = positive_part((tau - inv_p) + d / (nd * p));
  rep.j_tilde = rep.j_tau + std::min(nd * rep.tau_hat, d / p);
  rep.s_tilde = s + nd * rep.tau_hat;
  rep.r_tilde = nd / rep.j_tilde;

  const double tp = positive_part(tau - inv_p);

  rep.rules.push_back({Rule::adFJ, true, rep.j_exponent, nd / 2 + s,
                       rep.j_exponent - nd / 2 - s});
  rep.rules.push_back({Rule::adYY, true, rep.j_tau, nd / 2 + s + nd * tp,
                       rep.j_tau - nd / 2 - s - nd * tp});
  rep.rules.push_back({Rule::thm77, true, rep.j_tau + rep.delta,
                       nd / 2 + s + nd * tp + d / p,
                       rep.j_tau - nd / 2 - s - nd * tp +
                           (p > 1.0 ? d_tilde / p_prime : 0.0)});
  rep.rules.push_back({Rule::adBF, true, rep.j_exponent + nd * rep.tau_hat,
                       nd / 2 + s + nd * rep.tau_hat,
                       rep.j_exponent - nd / 2 - s});
  const bool eq173_ok =
      tau >= inv_p &&
      (tau > inv_p || std::isinf(q) || family == Family::triebel);
  RuleBounds eq173{Rule::eq173, eq173_ok, 0.0, 0.0, 0.0};
  if (eq173_ok) {
    eq173.d_bound = rep.j_tau + d / p;
    eq173.e_bound = nd / 2 + s + nd * (tau - inv_p) + d / p;
    eq173.f_bound = rep.j_tau - nd / 2 - s - nd * (tau - inv_p);
  }
  rep.rules.push_back(eq173);
  rep.rules.push_back({Rule::adBF2, true, rep.j_tilde, nd / 2 + rep.s_tilde,
                       rep.j_tilde - nd / 2 - rep.s_tilde});
  return rep;
}

Admissibility admissible(double D, double E, double F,
                         const ThresholdReport& report, Rule rule) {
  const RuleBounds& rb = report.bounds(rule);
  if (!rb.applicable) {
    std::ostringstream msg;
    msg << "admissible: rule " << to_string(rule) << " not applicable in the "
        << to_string(report.regime) << " regime";
    throw std::invalid_argument(msg.str());
  }
  Admissibility a;
  a.margins = {D - rb.d_bound, E - rb.e_bound, F - rb.f_bound};
  a.admissible = a.margins[0] > 0.0 && a.margins[1] > 0.0 && a.margins[2] > 0.0;
  return a;
}

EquivalentExponents equivalent_exponents(const ThresholdReport& report) {
  EquivalentExponents eq;
  eq.r_tilde = report.r_tilde;
  eq.s_tilde = report.s_tilde;
  std::ostringstream c;
  if (report.family == Family::besov)
    c << "p~ = " << eq.r_tilde << ", q~ in (0,inf] arbitrary";
  else
    c << "min(p~, q~) = " << eq.r_tilde;
  eq.constraint = c.str();
  return eq;
}

std::vector<RuleComparison> compare_rules(const ThresholdReport& report) {
  std::vector<RuleComparison> facts;
  const double tol = 1e-12;
  auto leq = [&](double a, double b) { return a <= b + tol; };
  if (report.regime == Regime::subcritical) {
    const auto& bf = report.bounds(Rule::adBF);
    const auto& t77 = report.bounds(Rule::thm77);
    facts.push_back({"adBF D-bound <= thm77 D-bound",
                     leq(bf.d_bound, t77.d_bound)});
    facts.push_back({"adBF E-bound <= thm77 E-bound",
                     leq(bf.e_bound, t77.e_bound)});
    facts.push_back({"adBF F-bound <= thm77 F-bound",
                     leq(bf.f_bound, t77.f_bound)});
  } else {
    const auto& e173 = report.bounds(Rule::eq173);
    const auto& t77 = report.bounds(Rule::thm77);
    if (e173.applicable) {
      facts.push_back({"eq173 D-bound <= thm77 D-bound",
                       leq(e173.d_bound, t77.d_bound)});
      facts.push_back({"eq173 F-bound <= thm77 F-bound",
                       leq(e173.f_bound, t77.f_bound)});
    }
  }
  if (report.tau == 0.0 && report.d == 0.0) {
    const auto& bf2 = report.bounds(Rule::adBF2);
    const auto& fj = report.bounds(Rule::adFJ);
    facts.push_back({"adBF2 = adFJ at tau = d = 0",
                     bf2.d_bound == fj.d_bound && bf2.e_bound == fj.e_bound &&
                         bf2.f_bound == fj.f_bound});
  }
  return facts;
}

}  // namespace adseq
