#include "adseq/adkernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "adseq/util.hpp"

namespace adseq {

double bdef_entry(const DyadicCube& q, const DyadicCube& r, const AdParams& p) {
  if (q.dim() != r.dim())
    throw std::invalid_argument("bdef_entry: dimension mismatch");
  const double spatial = std::pow(distance_factor(q, r), -p.D);
  const double lq = q.edge(), lr = r.edge();
  if (lq <= lr) return spatial * std::pow(lq / lr, p.E);
  return spatial * std::pow(lr / lq, p.F);
}

AdKernel AdKernel::analytic(AdParams p, double amplitude, TruncationPolicy t) {
  return AdKernel(Analytic{p, amplitude}, t);
}

AdKernel AdKernel::diagonal(std::complex<double> value, TruncationPolicy t) {
  return AdKernel(Diagonal{value, {}}, t);
}

AdKernel AdKernel::explicit_table(
    std::map<std::pair<DyadicCube, DyadicCube>, std::complex<double>> entries,
    TruncationPolicy t) {
  return AdKernel(Explicit{std::move(entries)}, t);
}

std::complex<double> AdKernel::entry(const DyadicCube& q, const DyadicCube& r) const {
  struct Visitor {
    const DyadicCube& q;
    const DyadicCube& r;
    std::complex<double> operator()(const Analytic& a) const {
      return a.amplitude * bdef_entry(q, r, a.params);
    }
    std::complex<double> operator()(const Diagonal& d) const {
      if (!(q == r)) return 0.0;
      auto it = d.overrides.find(q);
      return it == d.overrides.end() ? d.value : it->second;
    }
    std::complex<double> operator()(const Explicit& e) const {
      auto it = e.entries.find({q, r});
      return it == e.entries.end() ? 0.0 : it->second;
    }
    std::complex<double> operator()(const Conjugated& c) const {
      const std::complex<double> base = c.base->entry(q, r);
      if (base == std::complex<double>(0.0, 0.0)) return 0.0;
      double factor;
      if (c.family->is_scalar())
        factor = c.family->scalar_at(q) / c.family->scalar_at(r);
      else
        factor = spectral_norm(c.family->at(q) * c.family->at(r).inverse());
      return std::abs(base) * factor;
    }
    std::complex<double> operator()(const Scaled& s) const {
      return std::pow(r.edge() / q.edge(), s.s) * s.base->entry(q, r);
    }
    std::complex<double> operator()(const Triangular& t) const {
      const bool coarser = r.edge() >= q.edge();
      if (coarser != t.keep_coarser) return 0.0;
      return t.base->entry(q, r);
    }
  };
  return std::visit(Visitor{q, r}, form_);
}

std::optional<double> AdKernel::level_decay() const {
  struct Visitor {
    std::optional<double> operator()(const AdKernel::Analytic& a) const {
      return std::min(a.params.E, a.params.F);
    }
    std::optional<double> operator()(const AdKernel::Diagonal&) const {
      return std::numeric_limits<double>::infinity();
    }
    std::optional<double> operator()(const AdKernel::Explicit&) const {
      return std::nullopt;
    }
    std::optional<double> operator()(const AdKernel::Conjugated&) const {
      return std::nullopt;
    }
    std::optional<double> operator()(const AdKernel::Scaled& s) const {
      auto base = s.base->level_decay();
      if (!base) return std::nullopt;
      return *base - std::abs(s.s);
    }
    std::optional<double> operator()(const AdKernel::Triangular& t) const {
      return t.base->level_decay();
    }
  };
  return std::visit(Visitor{}, form_);
}

std::optional<double> AdKernel::level_envelope(int dj) const {
  // |entry(Q,R)| <= amplitude * 2^{-|dj| decay} with dj = j_R - j_Q, at any
  // spatial offset; only derivable for forms built over the analytic one.
  struct Visitor {
    int dj;
    std::optional<double> operator()(const AdKernel::Analytic& a) const {
      const double expo = dj >= 0 ? a.params.E : a.params.F;
      return a.amplitude * std::pow(2.0, -std::abs(dj) * expo);
    }
    std::optional<double> operator()(const AdKernel::Diagonal& d) const {
      if (dj != 0) return 0.0;
      double amp = std::abs(d.value);
      for (const auto& [q, v] : d.overrides) amp = std::max(amp, std::abs(v));
      return amp;
    }
    std::optional<double> operator()(const AdKernel::Explicit&) const {
      return std::nullopt;
    }
    std::optional<double> operator()(const AdKernel::Conjugated&) const {
      return std::nullopt;
    }
    std::optional<double> operator()(const AdKernel::Scaled& s) const {
      auto base = s.base->level_envelope(dj);
      if (!base) return std::nullopt;
      return *base * std::pow(2.0, -dj * s.s);  // (l(R)/l(Q))^s = 2^{-dj s}
    }
    std::optional<double> operator()(const AdKernel::Triangular& t) const {
      return t.base->level_envelope(dj);
    }
  };
  return std::visit(Visitor{dj}, form_);
}

AdKernel rescale(const AdKernel& b, double s) {
  if (s == 0.0) return b;
  if (const auto* a = std::get_if<AdKernel::Analytic>(&b.form())) {
    AdParams p = a->params;
    p.E -= s;
    p.F += s;
    return AdKernel(AdKernel::Analytic{p, a->amplitude}, b.trunc);
  }
  if (const auto* e = std::get_if<AdKernel::Explicit>(&b.form())) {
    auto entries = e->entries;
    for (auto& [qr, v] : entries)
      v *= std::pow(qr.second.edge() / qr.first.edge(), s);
    return AdKernel(AdKernel::Explicit{std::move(entries)}, b.trunc);
  }
  if (std::holds_alternative<AdKernel::Diagonal>(b.form())) return b;
  return AdKernel(
      AdKernel::Scaled{std::make_shared<AdKernel>(b), s}, b.trunc);
}

AdKernel conjugate(const AdKernel& b, std::shared_ptr<const ReducingFamily> fam) {
  return AdKernel(
      AdKernel::Conjugated{std::make_shared<AdKernel>(b), std::move(fam)},
      b.trunc);
}

std::pair<AdKernel, AdKernel> split_triangular(const AdKernel& b) {
  auto base = std::make_shared<AdKernel>(b);
  return {AdKernel(AdKernel::Triangular{base, true}, b.trunc),
          AdKernel(AdKernel::Triangular{base, false}, b.trunc)};
}

VerifyResult verify_ad(const AdKernel& b, const AdParams& params, const Window& win,
                       double bound) {
  const auto cubes = win.enumerate();
  if (cubes.empty()) throw std::invalid_argument("verify_ad: empty window");
  std::vector<double> per_q(cubes.size(), 0.0);
  std::vector<std::size_t> arg_r(cubes.size(), 0);
  parallel_for(cubes.size(), [&](std::size_t i) {
    for (std::size_t jr = 0; jr < cubes.size(); ++jr) {
      const double num = std::abs(b.entry(cubes[i], cubes[jr]));
      if (num == 0.0) continue;
      const double ratio = num / bdef_entry(cubes[i], cubes[jr], params);
      if (ratio > per_q[i]) {
        per_q[i] = ratio;
        arg_r[i] = jr;
      }
    }
  });
  VerifyResult result;
  std::size_t best = 0;
  for (std::size_t i = 0; i < cubes.size(); ++i)
    if (per_q[i] > per_q[best]) best = i;
  result.c = per_q[best];
  result.witness_q = cubes[best];
  result.witness_r = cubes[arg_r[best]];
  result.witness_ratio = per_q[best];
  result.passed = result.c <= bound;
  return result;
}

namespace {

// Truncation error of one output row: band-excluded support summed against
// the level envelope, plus eps_cut times the in-band l1 mass.
double row_tail_bound(const AdKernel& b, const CoeffSequence& t, int out_level,
                      bool& envelope_missing) {
  const auto& tr = b.trunc;
  double tail = 0.0;
  for (const auto& [r, v] : t.entries) {
    const double mass = v.norm();
    if (std::abs(r.j - out_level) > tr.level_band) {
      auto env = b.level_envelope(r.j - out_level);
      if (!env) {
        envelope_missing = true;
        return std::numeric_limits<double>::infinity();
      }
      tail += *env * mass;
    } else {
      tail += tr.eps_cut * mass;
    }
  }
  return tail;
}

}  // namespace

ApplyResult apply(const AdKernel& b, const CoeffSequence& t, const Window& win) {
  win.validate();
  if (t.n != win.n) throw std::invalid_argument("apply: dimension mismatch");
  for (const auto& [q, v] : t.entries)
    if (!win.contains(q))
      throw std::invalid_argument("apply: support escapes the window");

  ApplyResult result;
  result.out = CoeffSequence(t.n, t.m);
  const auto outputs = win.enumerate();
  std::vector<Vector> rows(outputs.size());
  std::vector<double> tails(outputs.size(), 0.0);
  const auto& tr = b.trunc;

  // Support grouped by level for the band check.
  std::map<int, std::vector<std::pair<const DyadicCube*, const Vector*>>> by_level;
  for (const auto& [r, v] : t.entries) by_level[r.j].emplace_back(&r, &v);

  bool envelope_missing = false;
  parallel_for(outputs.size(), [&](std::size_t i) {
    const DyadicCube& q = outputs[i];
    Vector acc = Vector::Zero(t.m);
    for (const auto& [level, items] : by_level) {
      if (std::abs(level - q.j) > tr.level_band) continue;
      for (const auto& [r, v] : items) {
        const std::complex<double> e = b.entry(q, *r);
        if (std::abs(e) < tr.eps_cut) continue;
        acc += e * (*v);
      }
    }
    rows[i] = std::move(acc);
    bool missing = false;
    tails[i] = row_tail_bound(b, t, q.j, missing);
    if (missing) envelope_missing = true;
  });

  double tail = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    tail = std::max(tail, tails[i]);
    if (rows[i].norm() != 0.0) result.out.entries.emplace(outputs[i], std::move(rows[i]));
  }
  result.tail_bound =
      envelope_missing ? std::numeric_limits<double>::infinity() : tail;
  if (tr.eps_cut == 0.0 && tr.level_band == std::numeric_limits<int>::max())
    result.tail_bound = 0.0;
  return result;
}

AdKernel compose(const AdKernel& a, const AdKernel& b, const Window& win) {
  const auto cubes = win.enumerate();
  const double eps = std::max(a.trunc.eps_cut, b.trunc.eps_cut);
  std::vector<std::map<std::pair<DyadicCube, DyadicCube>, std::complex<double>>>
      partial(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t iq) {
    const DyadicCube& q = cubes[iq];
    // row of A at q
    std::vector<std::pair<std::size_t, std::complex<double>>> row;
    for (std::size_t ir = 0; ir < cubes.size(); ++ir) {
      const auto e = a.entry(q, cubes[ir]);
      if (e == std::complex<double>(0.0) || std::abs(e) < eps) continue;
      row.emplace_back(ir, e);
    }
    for (std::size_t ip = 0; ip < cubes.size(); ++ip) {
      std::complex<double> acc = 0.0;
      for (const auto& [ir, ae] : row) {
        const auto be = b.entry(cubes[ir], cubes[ip]);
        if (be == std::complex<double>(0.0) || std::abs(be) < eps) continue;
        acc += ae * be;
      }
      if (acc != std::complex<double>(0.0))
        partial[iq].emplace(std::make_pair(q, cubes[ip]), acc);
    }
  });
  std::map<std::pair<DyadicCube, DyadicCube>, std::complex<double>> entries;
  for (auto& p : partial) entries.merge(p);
  TruncationPolicy tr;
  tr.eps_cut = eps;
  tr.level_band = std::min(a.trunc.level_band, b.trunc.level_band);
  return AdKernel::explicit_table(std::move(entries), tr);
}

namespace {

double norm_of(const CoeffSequence& t, const SpaceParams& params,
               const WeightMode& mode, const Window& win) {
  return seq_norm(t, params, mode, win).value;
}

}  // namespace

OpNormStats op_norm_estimate(const AdKernel& b, const SpaceParams& params,
                             const WeightMode& mode, const Window& win,
                             int trials, unsigned seed) {
  if (trials < 1) throw std::invalid_argument("op_norm_estimate: trials >= 1");
  OpNormStats stats;
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int m = 1;
  if (mode.tag == WeightMode::Tag::averaging) m = mode.family->m();
  if (mode.tag == WeightMode::Tag::matrix) m = mode.weight->m();

  auto ratio_of = [&](const CoeffSequence& t) {
    const double denom = norm_of(t, params, mode, win);
    if (denom == 0.0) return 0.0;
    return norm_of(apply(b, t, win).out, params, mode, win) / denom;
  };

  auto run_window = [&](const Window& w) {
    const auto cubes = w.enumerate();
    double delta_max = 0.0, level_max = 0.0, dense_max = 0.0;
    std::uniform_int_distribution<std::size_t> pick(0, cubes.size() - 1);
    for (int trial = 0; trial < trials; ++trial) {
      CoeffSequence t(w.n, m);
      t.set(cubes[pick(rng)], Vector::Ones(m));
      delta_max = std::max(delta_max, ratio_of(t));
    }
    for (int j = w.j_min; j <= w.j_max; ++j) {
      CoeffSequence t(w.n, m);
      for (const auto& q : w.level_cubes(j))
        t.set(q, std::pow(q.volume(), params.s / w.n + 0.5) * Vector::Ones(m));
      level_max = std::max(level_max, ratio_of(t));
    }
    for (int trial = 0; trial < trials; ++trial) {
      CoeffSequence t(w.n, m);
      for (const auto& q : cubes) {
        Vector v(m);
        for (int a = 0; a < m; ++a) v(a) = {gauss(rng), gauss(rng)};
        t.set(q, v);
      }
      dense_max = std::max(dense_max, ratio_of(t));
    }
    return std::array<double, 3>{delta_max, level_max, dense_max};
  };

  // Nested windows K/4 <= K/2 <= K give the growth trend.
  for (std::int64_t k : {std::max<std::int64_t>(1, win.K / 4),
                         std::max<std::int64_t>(1, win.K / 2), win.K}) {
    Window w = win;
    w.K = k;
    const auto r = run_window(w);
    stats.window_trend.push_back(std::max({r[0], r[1], r[2]}));
    if (k == win.K) {
      stats.delta_family = r[0];
      stats.level_family = r[1];
      stats.dense_family = r[2];
    }
  }
  stats.overall = std::max({stats.delta_family, stats.level_family, stats.dense_family});
  return stats;
}

}  // namespace adseq
