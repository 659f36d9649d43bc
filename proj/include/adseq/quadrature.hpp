#pragma once

#include <functional>
#include <span>
#include <vector>

namespace adseq {

/// Quadrature controls for cube integrals of weights: tensor Gauss-Legendre
/// with `points` nodes per axis; cubes whose closure meets the integrand's
/// singular set are dyadically subdivided to depth `singular_depth` first.
struct QuadraturePolicy {
  int points = 4;
  int singular_depth = 12;
};

/// Nodes and weights of the g-point Gauss-Legendre rule on [0,1] (cached).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_rule(int points);

/// Integral (not average) of f over the half-open cube [corner, corner+edge)^n.
/// `singular` reports whether a sub-cell's closure meets the singular set;
/// pass nullptr for smooth integrands.
double integrate_cube(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> corner, double edge, const QuadraturePolicy& policy,
    const std::function<bool(std::span<const double>, double)>& singular = nullptr);

}  // namespace adseq
