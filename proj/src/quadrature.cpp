#include "adseq/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace adseq {

namespace {

// Legendre nodes on [-1,1] by Newton iteration, mapped to [0,1].
GaussRule build_rule(int g) {
  GaussRule rule;
  rule.nodes.resize(g);
  rule.weights.resize(g);
  for (int i = 0; i < g; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (g + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= g; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = g * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= g; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = g * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[g - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[g - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int points) {
  if (points < 1 || points > 64)
    throw std::invalid_argument("gauss_rule: points out of range");
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, build_rule(points)).first;
  return it->second;
}

namespace {

double tensor_gauss(const std::function<double(std::span<const double>)>& f,
                    std::span<const double> corner, double edge, int points) {
  const auto& rule = gauss_rule(points);
  const int n = static_cast<int>(corner.size());
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      x[i] = corner[i] + edge * rule.nodes[idx[i]];
      w *= rule.weights[idx[i]];
    }
    sum += w * f(x);
    int axis = n - 1;
    while (axis >= 0) {
      if (++idx[axis] < points) break;
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return sum * std::pow(edge, n);
}

double integrate_rec(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> corner, double edge, const QuadraturePolicy& policy,
    const std::function<bool(std::span<const double>, double)>& singular,
    int depth) {
  if (!singular || depth >= policy.singular_depth || !singular(corner, edge))
    return tensor_gauss(f, corner, edge, policy.points);
  const int n = static_cast<int>(corner.size());
  const double h = edge / 2.0;
  double sum = 0.0;
  std::vector<double> c(n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    for (int i = 0; i < n; ++i)
      c[i] = corner[i] + (((bits >> i) & 1u) ? h : 0.0);
    sum += integrate_rec(f, c, h, policy, singular, depth + 1);
  }
  return sum;
}

}  // namespace

double integrate_cube(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> corner, double edge, const QuadraturePolicy& policy,
    const std::function<bool(std::span<const double>, double)>& singular) {
  if (!(edge > 0.0)) throw std::invalid_argument("integrate_cube: bad edge");
  return integrate_rec(f, corner, edge, policy, singular, 0);
}

}  // namespace adseq
