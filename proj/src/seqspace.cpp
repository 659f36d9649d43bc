#include "adseq/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "adseq/util.hpp"

namespace adseq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SpaceParams::validate() const {
  if (!(p > 0.0)) throw std::invalid_argument("space: p must be positive");
  if (!(q > 0.0)) throw std::invalid_argument("space: q must be positive");
  if (tau < 0.0) throw std::invalid_argument("space: tau must be nonnegative");
  if (std::isinf(p) && family == Family::triebel)
    throw std::invalid_argument("space: p = inf is Besov-only; use f_infty_norm");
}

void CoeffSequence::set(const DyadicCube& q, Vector v) {
  if (q.dim() != n) throw std::invalid_argument("coeff: cube dimension mismatch");
  if (v.size() != m) throw std::invalid_argument("coeff: vector length mismatch");
  if (v.norm() == 0.0)
    entries.erase(q);
  else
    entries[q] = std::move(v);
}

const Vector* CoeffSequence::find(const DyadicCube& q) const {
  auto it = entries.find(q);
  return it == entries.end() ? nullptr : &it->second;
}

CoeffSequence CoeffSequence::scaled(std::complex<double> factor) const {
  CoeffSequence out(n, m);
  if (factor == std::complex<double>(0.0, 0.0)) return out;
  for (const auto& [q, v] : entries) out.entries.emplace(q, factor * v);
  return out;
}

CoeffSequence CoeffSequence::linear(std::complex<double> a, const CoeffSequence& t,
                                    std::complex<double> b, const CoeffSequence& u) {
  if (t.n != u.n || t.m != u.m)
    throw std::invalid_argument("coeff: incompatible sequences");
  CoeffSequence out(t.n, t.m);
  for (const auto& [q, v] : t.entries) out.entries[q] = a * v;
  for (const auto& [q, v] : u.entries) {
    auto it = out.entries.find(q);
    if (it == out.entries.end())
      out.entries.emplace(q, b * v);
    else
      it->second += b * v;
  }
  for (auto it = out.entries.begin(); it != out.entries.end();) {
    if (it->second.norm() == 0.0)
      it = out.entries.erase(it);
    else
      ++it;
  }
  return out;
}

namespace {

// l^q aggregation of nonnegative terms; q = inf -> max.
class LqAccum {
 public:
  explicit LqAccum(double q) : q_(q) {}
  void add(double term) {
    if (term <= 0.0) return;
    if (std::isinf(q_))
      value_ = std::max(value_, term);
    else
      terms_.push_back(std::pow(term, q_));
  }
  double result() const {
    if (std::isinf(q_)) return value_;
    if (terms_.empty()) return 0.0;
    return std::pow(pairwise_sum(terms_), 1.0 / q_);
  }

 private:
  double q_;
  double value_ = 0.0;
  mutable std::vector<double> terms_;
};

// Per-cube constant of the level function inside Q: |H t_Q| |Q|^{-1/2}.
double cube_level_value(const CoeffSequence& t, const WeightMode& mode,
                        const DyadicCube& q, const Vector& v) {
  const double normalizer = std::pow(q.volume(), -0.5);
  switch (mode.tag) {
    case WeightMode::Tag::unweighted:
      return v.norm() * normalizer;
    case WeightMode::Tag::averaging:
      return mode.family->apply_norm(q, v) * normalizer;
    case WeightMode::Tag::matrix:
      throw std::logic_error("cube_level_value: matrix mode is integral-based");
  }
  return 0.0;
}

bool cube_within(const DyadicCube& q, const DyadicCube& p) {
  if (q.j < p.j) return false;
  return q.ancestor(p.j) == p;
}

// Enumerates descendants of Q at level jf (jf >= j_Q), lexicographic.
template <typename Fn>
void for_each_descendant(const DyadicCube& q, int jf, Fn&& fn) {
  const int shift = jf - q.j;
  const int n = q.dim();
  const std::int64_t span = std::int64_t{1} << shift;
  std::vector<std::int64_t> base(n), idx(n, 0);
  for (int i = 0; i < n; ++i) base[i] = q.k[i] * span;
  while (true) {
    std::vector<std::int64_t> k(n);
    for (int i = 0; i < n; ++i) k[i] = base[i] + idx[i];
    fn(DyadicCube{jf, std::move(k)});
    int axis = n - 1;
    while (axis >= 0) {
      if (++idx[axis] < span) break;
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
}

struct MatrixMasses {
  // Integral over Q of |W^{1/p}(x) t_Q|^p dx, per support cube, plus a
  // refined version on cubes meeting the singular set.
  std::map<DyadicCube, double> mass, refined;
};

MatrixMasses compute_masses(const CoeffSequence& t, const WeightModel& w, double p) {
  MatrixMasses mm;
  std::vector<const DyadicCube*> cubes;
  std::vector<const Vector*> vecs;
  for (const auto& [q, v] : t.entries) {
    cubes.push_back(&q);
    vecs.push_back(&v);
  }
  std::vector<double> mass(cubes.size()), refined(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t i) {
    const DyadicCube& q = *cubes[i];
    const Vector& v = *vecs[i];
    auto singular = [&](std::span<const double> c, double e) {
      return w.cell_singular(c, e);
    };
    auto f = [&](std::span<const double> x) {
      return std::pow(w.root_apply(x, p, v), p);
    };
    const auto corner = q.corner();
    mass[i] = integrate_cube(f, corner, q.edge(), w.quad, singular);
    if (w.cell_singular(corner, q.edge())) {
      QuadraturePolicy finer{w.quad.points + 2, w.quad.singular_depth + 2};
      refined[i] = integrate_cube(f, corner, q.edge(), finer, singular);
    } else {
      refined[i] = mass[i];
    }
  });
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    mm.mass.emplace(*cubes[i], mass[i]);
    mm.refined.emplace(*cubes[i], refined[i]);
  }
  return mm;
}

class NormEngine {
 public:
  NormEngine(const CoeffSequence& t, const SpaceParams& params,
             const WeightMode& mode, const Window& win)
      : t_(t), params_(params), mode_(mode), win_(win) {
    if (mode.tag == WeightMode::Tag::matrix) {
      if (std::isinf(params.p))
        throw std::invalid_argument("seq_norm: p = inf unsupported in W-mode");
      masses_ = compute_masses(t, *mode.weight, params.p);
    }
    for (const auto& [q, v] : t.entries) levels_.insert(q.j);
  }

  // Inner norm over region (all window cubes when region == nullptr) with
  // levels j >= j0. use_refined switches the singular-cube masses.
  double inner(const DyadicCube* region, int j0, bool use_refined) const {
    if (params_.family == Family::besov) return besov(region, j0, use_refined);
    return triebel(region, j0, use_refined);
  }

  bool has_singular_masses() const {
    if (mode_.tag != WeightMode::Tag::matrix) return false;
    for (const auto& [q, m] : masses_.mass)
      if (masses_.refined.at(q) != m) return true;
    return false;
  }

 private:
  double besov(const DyadicCube* region, int j0, bool use_refined) const {
    LqAccum lq(params_.q);
    const double p = params_.p;
    for (int j : levels_) {
      if (j < j0) continue;
      double level_norm = 0.0;
      if (std::isinf(p)) {
        for (const auto& [q, v] : t_.entries) {
          if (q.j != j || (region && !cube_within(q, *region))) continue;
          level_norm = std::max(level_norm, cube_level_value(t_, mode_, q, v));
        }
      } else {
        std::vector<double> terms;
        for (const auto& [q, v] : t_.entries) {
          if (q.j != j || (region && !cube_within(q, *region))) continue;
          if (mode_.tag == WeightMode::Tag::matrix) {
            const double mass =
                use_refined ? masses_.refined.at(q) : masses_.mass.at(q);
            terms.push_back(std::pow(q.volume(), -p / 2.0) * mass);
          } else {
            const double v_q = cube_level_value(t_, mode_, q, v);
            terms.push_back(q.volume() * std::pow(v_q, p));
          }
        }
        if (!terms.empty())
          level_norm = std::pow(pairwise_sum(terms), 1.0 / p);
      }
      lq.add(std::pow(2.0, j * params_.s) * level_norm);
    }
    return lq.result();
  }

  double triebel(const DyadicCube* region, int j0, bool use_refined) const {
    // Finest level carrying data; the integrand is resolved on level-jf cells.
    int jf = std::numeric_limits<int>::min();
    for (int j : levels_)
      if (j >= j0) jf = std::max(jf, j);
    if (jf == std::numeric_limits<int>::min()) return 0.0;

    if (mode_.tag != WeightMode::Tag::matrix)
      return triebel_exact(region, j0, jf);
    return triebel_quadrature(region, j0, jf, use_refined);
  }

  double triebel_exact(const DyadicCube* region, int j0, int jf) const {
    const double q_expo = params_.q;
    // acc[cell] = sum_j (2^{js} v_j)^q (or max for q = inf)
    std::map<DyadicCube, double> acc;
    std::size_t cells_guard = 0;
    for (const auto& [q, v] : t_.entries) {
      if (q.j < j0 || (region && !cube_within(q, *region))) continue;
      const double term =
          std::pow(2.0, q.j * params_.s) * cube_level_value(t_, mode_, q, v);
      if (term <= 0.0) continue;
      cells_guard += std::size_t{1} << ((jf - q.j) * t_.n);
      if (cells_guard > 50'000'000)
        throw std::length_error("seq_norm: Triebel cell expansion too large");
      const double contrib = std::isinf(q_expo) ? term : std::pow(term, q_expo);
      for_each_descendant(q, jf, [&](DyadicCube cell) {
        auto [it, fresh] = acc.emplace(std::move(cell), contrib);
        if (!fresh) {
          if (std::isinf(q_expo))
            it->second = std::max(it->second, contrib);
          else
            it->second += contrib;
        }
      });
    }
    const double cell_vol = std::ldexp(1.0, -jf * t_.n);
    const double p = params_.p;
    std::vector<double> terms;
    terms.reserve(acc.size());
    for (const auto& [cell, g] : acc) {
      const double gval = std::isinf(q_expo) ? g : std::pow(g, 1.0 / q_expo);
      terms.push_back(cell_vol * std::pow(gval, p));
    }
    if (terms.empty()) return 0.0;
    return std::pow(pairwise_sum(terms), 1.0 / p);
  }

  double triebel_quadrature(const DyadicCube* region, int j0, int jf,
                            bool use_refined) const {
    const WeightModel& w = *mode_.weight;
    const double p = params_.p, q_expo = params_.q, s = params_.s;
    // Cells at level jf whose ancestors carry data.
    std::set<DyadicCube> cells;
    for (const auto& [q, v] : t_.entries) {
      if (q.j < j0 || (region && !cube_within(q, *region))) continue;
      if ((cells.size() >> 20) > 0)
        throw std::length_error("seq_norm: Triebel cell expansion too large");
      for_each_descendant(q, jf, [&](DyadicCube cell) { cells.insert(std::move(cell)); });
    }
    std::vector<const DyadicCube*> cell_list;
    cell_list.reserve(cells.size());
    for (const auto& c : cells) cell_list.push_back(&c);
    std::vector<double> terms(cell_list.size());
    parallel_for(cell_list.size(), [&](std::size_t i) {
      const DyadicCube& cell = *cell_list[i];
      // Levels contributing on this cell, with their coefficients.
      std::vector<std::pair<double, const Vector*>> stack;  // (2^{js}|Q|^{-1/2}, t_Q)
      for (int j : levels_) {
        if (j < j0 || j > jf) continue;
        const DyadicCube anc = cell.ancestor(j);
        if (region && !cube_within(anc, *region)) continue;
        if (const Vector* v = t_.find(anc))
          stack.emplace_back(
              std::pow(2.0, j * s) * std::pow(anc.volume(), -0.5), v);
      }
      if (stack.empty()) {
        terms[i] = 0.0;
        return;
      }
      auto integrand = [&](std::span<const double> x) {
        double acc = 0.0;
        for (const auto& [factor, v] : stack) {
          const double val = factor * w.root_apply(x, p, *v);
          if (std::isinf(q_expo))
            acc = std::max(acc, val);
          else
            acc += std::pow(val, q_expo);
        }
        const double g = std::isinf(q_expo) ? acc : std::pow(acc, 1.0 / q_expo);
        return std::pow(g, p);
      };
      auto singular = [&](std::span<const double> c, double e) {
        return w.cell_singular(c, e);
      };
      QuadraturePolicy policy = w.quad;
      if (use_refined) {
        policy.points += 2;
        policy.singular_depth += 2;
      }
      terms[i] = integrate_cube(integrand, cell.corner(), cell.edge(), policy, singular);
    });
    return std::pow(pairwise_sum(terms), 1.0 / p);
  }

  const CoeffSequence& t_;
  const SpaceParams& params_;
  const WeightMode& mode_;
  const Window& win_;
  MatrixMasses masses_;
  std::set<int> levels_;
};

bool touches_boundary(const DyadicCube& p, const Window& win) {
  if (p.j == win.j_min) return true;
  const std::int64_t half = win.K * (std::int64_t{1} << (p.j - win.j_min));
  for (auto ki : p.k)
    if (ki == -half || ki == half - 1) return true;
  return false;
}

void check_support(const CoeffSequence& t, const Window& win) {
  if (t.n != win.n) throw std::invalid_argument("norm: dimension mismatch");
  for (const auto& [q, v] : t.entries)
    if (!win.contains(q))
      throw std::invalid_argument("norm: support escapes the window");
}

}  // namespace

NormResult seq_norm(const CoeffSequence& t, const SpaceParams& params,
                    const WeightMode& mode, const Window& win) {
  params.validate();
  win.validate();
  check_support(t, win);
  NormResult result;
  if (t.entries.empty()) return result;

  NormEngine engine(t, params, mode, win);
  const bool refine = engine.has_singular_masses();

  if (params.tau == 0.0) {
    result.value = engine.inner(nullptr, win.j_min, false);
    if (refine)
      result.quad_error =
          std::abs(result.value - engine.inner(nullptr, win.j_min, true));
    return result;
  }

  const auto candidates = win.enumerate();
  std::vector<double> vals(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    const DyadicCube& p = candidates[i];
    const double inner = engine.inner(&p, p.j, false);
    vals[i] = std::pow(p.volume(), -params.tau) * inner;
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] > vals[best]) best = i;
  result.value = vals[best];
  result.attaining = candidates[best];
  result.boundary_biased = touches_boundary(candidates[best], win);
  if (refine) {
    const double refined =
        std::pow(candidates[best].volume(), -params.tau) *
        engine.inner(&candidates[best], candidates[best].j, true);
    result.quad_error = std::abs(result.value - refined);
  }
  return result;
}

NormResult f_infty_norm(const CoeffSequence& t, double s, double q,
                        const ReducingFamily& fam, const Window& win) {
  if (!(q > 0.0)) throw std::invalid_argument("f_infty_norm: q must be positive");
  win.validate();
  check_support(t, win);
  NormResult result;
  if (t.entries.empty()) return result;

  if (std::isinf(q)) {
    for (const auto& [cube, v] : t.entries) {
      const double val = std::pow(cube.volume(), -(s / win.n + 0.5)) *
                         fam.apply_norm(cube, v);
      if (val > result.value) {
        result.value = val;
        result.attaining = cube;
      }
    }
    result.boundary_biased = touches_boundary(*result.attaining, win);
    return result;
  }

  const auto candidates = win.enumerate();
  std::vector<double> vals(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) {
    const DyadicCube& p = candidates[i];
    std::vector<double> terms;
    for (const auto& [cube, v] : t.entries) {
      if (cube.j < p.j) continue;
      if (cube.ancestor(p.j) != p) continue;
      const double level_val = std::pow(2.0, cube.j * s) *
                               fam.apply_norm(cube, v) *
                               std::pow(cube.volume(), -0.5);
      terms.push_back(cube.volume() * std::pow(level_val, q));
    }
    if (terms.empty()) {
      vals[i] = 0.0;
      return;
    }
    vals[i] = std::pow(pairwise_sum(terms) / p.volume(), 1.0 / q);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] > vals[best]) best = i;
  result.value = vals[best];
  result.attaining = candidates[best];
  result.boundary_biased = touches_boundary(candidates[best], win);
  return result;
}

double lp_weighted_norm(const std::map<DyadicCube, Vector>& field,
                        const WeightModel& w, double p) {
  if (!(p > 0.0) || std::isinf(p))
    throw std::invalid_argument("lp_weighted_norm: p must be finite positive");
  std::vector<double> terms;
  terms.reserve(field.size());
  for (const auto& [q, v] : field) {
    auto singular = [&](std::span<const double> c, double e) {
      return w.cell_singular(c, e);
    };
    terms.push_back(integrate_cube(
        [&](std::span<const double> x) { return std::pow(w.root_apply(x, p, v), p); },
        q.corner(), q.edge(), w.quad, singular));
  }
  if (terms.empty()) return 0.0;
  return std::pow(pairwise_sum(terms), 1.0 / p);
}

}  // namespace adseq
