#include "adseq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace adseq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double lattice_norm(const std::vector<std::int64_t>& k) {
  double s = 0.0;
  for (auto v : k) s += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(s);
}
}  // namespace

ExperimentFamily parse_family(const std::string& name) {
  if (name == "exa1_delta") return ExperimentFamily::exa1_delta;
  if (name == "tN_level0") return ExperimentFamily::tN_level0;
  if (name == "exa2_levelN") return ExperimentFamily::exa2_levelN;
  if (name == "exa3_smallcubes") return ExperimentFamily::exa3_smallcubes;
  if (name == "exa4_decay") return ExperimentFamily::exa4_decay;
  if (name == "exa5_level0_ones") return ExperimentFamily::exa5_level0_ones;
  if (name == "binf_power") return ExperimentFamily::binf_power;
  if (name == "sharp2_D") return ExperimentFamily::sharp2_D;
  if (name == "sharp2_E") return ExperimentFamily::sharp2_E;
  if (name == "sharp2_F") return ExperimentFamily::sharp2_F;
  throw std::invalid_argument("unknown experiment family: " + name);
}

std::string to_string(ExperimentFamily f) {
  switch (f) {
    case ExperimentFamily::exa1_delta: return "exa1_delta";
    case ExperimentFamily::tN_level0: return "tN_level0";
    case ExperimentFamily::exa2_levelN: return "exa2_levelN";
    case ExperimentFamily::exa3_smallcubes: return "exa3_smallcubes";
    case ExperimentFamily::exa4_decay: return "exa4_decay";
    case ExperimentFamily::exa5_level0_ones: return "exa5_level0_ones";
    case ExperimentFamily::binf_power: return "binf_power";
    case ExperimentFamily::sharp2_D: return "sharp2_D";
    case ExperimentFamily::sharp2_E: return "sharp2_E";
    case ExperimentFamily::sharp2_F: return "sharp2_F";
  }
  return "?";
}

std::string to_string(GrowthModel m) {
  switch (m) {
    case GrowthModel::bounded: return "bounded";
    case GrowthModel::logarithmic: return "log";
    case GrowthModel::power: return "power";
  }
  return "?";
}

bool ExperimentSpec::weighted() const {
  return family == ExperimentFamily::sharp2_D ||
         family == ExperimentFamily::sharp2_E ||
         family == ExperimentFamily::sharp2_F;
}

void ExperimentSpec::validate() const {
  if (n < 1) throw std::invalid_argument("experiment: n >= 1 required");
  if (ladder.empty()) throw std::invalid_argument("experiment: empty ladder");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1])
      throw std::invalid_argument("experiment: ladder must be strictly increasing");
  if (ladder.front() < 1)
    throw std::invalid_argument("experiment: ladder entries must be positive");
  if (weighted() && (weight_d < 0.0 || weight_d >= n))
    throw std::invalid_argument("experiment: weight_d in [0,n) required");
}

namespace {

// Spatial margin beyond the support: the distance where the D-power envelope
// drops below 1e-8, capped at the support radius so threshold kernels stay
// tractable.
std::int64_t margin_for(const AdParams& kernel, std::int64_t support_radius) {
  const double d_expo = std::max(kernel.D, 0.5);
  const double dist = std::pow(1e8, 1.0 / d_expo);
  const double capped =
      std::min(dist, static_cast<double>(std::max<std::int64_t>(support_radius, 4)));
  return static_cast<std::int64_t>(std::ceil(capped));
}

}  // namespace

Window family_window(const ExperimentSpec& spec, long N) {
  Window w;
  w.n = spec.n;
  const std::int64_t margin = margin_for(spec.kernel, N);
  switch (spec.family) {
    case ExperimentFamily::exa1_delta:
      w.j_min = -3;
      w.j_max = 3;
      w.K = 1;  // box [-8, 8)
      break;
    case ExperimentFamily::tN_level0:
    case ExperimentFamily::exa5_level0_ones:
    case ExperimentFamily::sharp2_D:
      w.j_min = w.j_max = 0;
      w.K = N + margin;
      break;
    case ExperimentFamily::exa2_levelN:
    case ExperimentFamily::exa3_smallcubes:
      w.j_min = 0;
      w.j_max = static_cast<int>(N);
      w.K = 2;
      break;
    case ExperimentFamily::exa4_decay:
      w.j_min = 0;
      w.j_max = static_cast<int>(std::min<long>(N, 10));
      w.K = 4;
      break;
    case ExperimentFamily::binf_power:
      w.j_min = -static_cast<int>(N);
      w.j_max = static_cast<int>(N);
      w.K = 1;
      break;
    case ExperimentFamily::sharp2_E:
      w.j_min = -static_cast<int>(N);
      w.j_max = 0;
      w.K = 1;
      break;
    case ExperimentFamily::sharp2_F:
      w.j_min = 0;
      w.j_max = static_cast<int>(N);
      w.K = 2;
      break;
  }
  w.validate();
  return w;
}

CoeffSequence make_sequence(const ExperimentSpec& spec, long N) {
  spec.validate();
  if (std::find(spec.ladder.begin(), spec.ladder.end(), N) == spec.ladder.end())
    throw std::invalid_argument("make_sequence: N not on the ladder");
  const int n = spec.n, m = spec.m;
  const double s = spec.space.s;
  CoeffSequence t(n, m);
  Vector e = Vector::Unit(m, 0);
  const Window w = family_window(spec, N);
  const double snh = s / n + 0.5;

  auto closed_inverse = [&](const DyadicCube& q) {
    return 1.0 / reducing_power_closed_form(spec.weight_d, spec.space.p, q);
  };

  switch (spec.family) {
    case ExperimentFamily::exa1_delta:
      t.set(DyadicCube(0, std::vector<std::int64_t>(n, 0)), e);
      break;
    case ExperimentFamily::tN_level0:
      for (const auto& q : w.level_cubes(0))
        if (lattice_norm(q.k) < static_cast<double>(N)) t.set(q, e);
      break;
    case ExperimentFamily::exa2_levelN:
      for (const auto& q : w.level_cubes(static_cast<int>(N))) {
        const auto x = q.corner();
        double r = 0.0;
        for (double v : x) r += v * v;
        if (std::sqrt(r) < 1.0) t.set(q, std::pow(q.volume(), snh) * e);
      }
      break;
    case ExperimentFamily::exa3_smallcubes:
      for (int j = 0; j <= w.j_max; ++j)
        for (const auto& q : w.level_cubes(j)) {
          const auto x = q.corner();
          double r = 0.0;
          for (double v : x) r += v * v;
          if (std::sqrt(r) < 1.0) t.set(q, std::pow(q.volume(), snh) * e);
        }
      break;
    case ExperimentFamily::exa4_decay:
      for (int j = 0; j <= w.j_max; ++j)
        for (const auto& q : w.level_cubes(j)) {
          const auto x = q.corner();
          double r = 0.0;
          for (double v : x) r += v * v;
          const double decay =
              std::pow(1.0 + std::sqrt(r), -(n + 1.0) / spec.space.p);
          t.set(q, std::pow(q.volume(), snh) * decay * e);
        }
      break;
    case ExperimentFamily::exa5_level0_ones:
      for (const auto& q : w.level_cubes(0))
        if (lattice_norm(q.k) < static_cast<double>(N)) t.set(q, e);
      break;
    case ExperimentFamily::binf_power:
      for (int j = w.j_min; j <= w.j_max; ++j)
        for (const auto& q : w.level_cubes(j))
          t.set(q, std::pow(q.volume(), snh) * e);
      break;
    case ExperimentFamily::sharp2_D:
      for (const auto& q : w.level_cubes(0))
        if (lattice_norm(q.k) < static_cast<double>(N))
          t.set(q, closed_inverse(q) * e);
      break;
    case ExperimentFamily::sharp2_E:
      for (int j = w.j_min; j <= 0; ++j) {
        DyadicCube q(j, std::vector<std::int64_t>(n, 0));
        t.set(q, std::pow(q.volume(), snh) * closed_inverse(q) * e);
      }
      break;
    case ExperimentFamily::sharp2_F:
      for (int j = w.j_min; j <= w.j_max; ++j)
        for (const auto& q : w.level_cubes(j)) {
          const double damp = 1.0 / (1.0 + std::abs(q.j));
          t.set(q, damp * std::pow(q.volume(), snh) * closed_inverse(q) * e);
        }
      break;
  }
  return t;
}

ReferenceNorm reference_norm(const ExperimentSpec& spec, long N) {
  const int n = spec.n;
  const double p = spec.space.p, q = spec.space.q;
  auto count_lattice = [&](double radius) {
    // #{k in Z^n : |k| < radius}
    long count = 0;
    const long r = static_cast<long>(std::ceil(radius));
    std::vector<long> idx(n, -r);
    while (true) {
      double s = 0.0;
      for (long v : idx) s += static_cast<double>(v) * v;
      if (std::sqrt(s) < radius) ++count;
      int axis = n - 1;
      while (axis >= 0) {
        if (++idx[axis] <= r) break;
        idx[axis] = -r;
        --axis;
      }
      if (axis < 0) break;
    }
    return count;
  };
  switch (spec.family) {
    case ExperimentFamily::exa1_delta:
      return {1.0, 1.0, true};
    case ExperimentFamily::tN_level0: {
      const double v = std::pow(static_cast<double>(count_lattice(N)),
                                std::isinf(p) ? 0.0 : 1.0 / p);
      return {v, v, true};
    }
    case ExperimentFamily::exa2_levelN:
      return {1.0, std::pow(2.0, 1.0 / p), false};
    case ExperimentFamily::exa3_smallcubes:
      if (!std::isinf(q))
        throw std::invalid_argument("reference_norm: exa3 reference needs q = inf");
      return {1.0, std::pow(2.0, 1.0 / p), false};
    case ExperimentFamily::exa4_decay: {
      if (!std::isinf(q) || n != 1)
        throw std::invalid_argument("reference_norm: exa4 reference needs q = inf, n = 1");
      return {1.0, std::pow(3.0, 1.0 / p), false};
    }
    case ExperimentFamily::exa5_level0_ones:
      return {1.0, 1.0, true};
    case ExperimentFamily::binf_power:
      if (!std::isinf(q))
        throw std::invalid_argument("reference_norm: binf reference needs q = inf");
      return {1.0, 1.0, true};
    case ExperimentFamily::sharp2_D:
      return {1.0, 1.0, true};
    case ExperimentFamily::sharp2_E: {
      if (std::isinf(q)) return {1.0, 1.0, true};
      const double hi =
          std::pow(1.0 - std::pow(2.0, -n * q / p), -1.0 / q);
      return {1.0, hi, false};
    }
    case ExperimentFamily::sharp2_F: {
      if (std::isinf(q)) return {1.0, 1.0, true};
      if (!(q > 1.0))
        throw std::invalid_argument("reference_norm: sharp2_F needs q > 1");
      double full = 0.0;
      for (int j = -2000; j <= 2000; ++j)
        full += std::pow(1.0 + std::abs(j), -q);
      double lo = 0.0;
      for (int j = 0; j <= 2000; ++j) lo += std::pow(1.0 + j, -q);
      return {std::pow(lo, 1.0 / q), std::pow(full, 1.0 / q), false};
    }
  }
  throw std::invalid_argument("reference_norm: no reference for family");
}

namespace {

struct LinFit {
  double c0 = 0.0, c1 = 0.0, r2 = 0.0;
};

LinFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinFit fit;
  const double denom = n * sxx - sx * sx;
  fit.c1 = (n * sxy - sx * sy) / denom;
  fit.c0 = (sy - fit.c1 * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.c0 + fit.c1 * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace

GrowthSeries growth_run(const ExperimentSpec& spec) {
  spec.validate();
  GrowthSeries series;
  const AdKernel kernel = AdKernel::analytic(spec.kernel, spec.amplitude);

  for (long N : spec.ladder) {
    const Window win = family_window(spec, N);
    const CoeffSequence t = make_sequence(spec, N);
    WeightMode mode = WeightMode::unweighted();
    ReducingFamily fam = ReducingFamily::identity(spec.m);
    if (spec.weighted()) {
      fam = ReducingFamily::closed_form_power(spec.weight_d, spec.space.p, spec.m);
      mode = WeightMode::averaging(fam);
    }
    const double norm_in = seq_norm(t, spec.space, mode, win).value;
    const CoeffSequence bt = apply(kernel, t, win).out;
    const double norm_out = seq_norm(bt, spec.space, mode, win).value;
    series.points.push_back(
        {N, norm_in, norm_out, norm_in > 0 ? norm_out / norm_in : kInf});
  }

  // Fits on the upper half of the ladder.
  const std::size_t count = series.points.size();
  const std::size_t start = count > 3 ? count / 2 : 0;
  std::vector<double> logs, ratios, loglogs;
  for (std::size_t i = start; i < count; ++i) {
    logs.push_back(std::log(static_cast<double>(series.points[i].N)));
    ratios.push_back(series.points[i].ratio);
    loglogs.push_back(std::log(std::max(series.points[i].ratio, 1e-300)));
  }
  const LinFit log_fit = least_squares(logs, ratios);
  series.log_c0 = log_fit.c0;
  series.log_c1 = log_fit.c1;
  series.log_r2 = log_fit.r2;
  const LinFit pow_fit = least_squares(logs, loglogs);
  series.pow_c = std::exp(pow_fit.c0);
  series.pow_alpha = pow_fit.c1;
  series.pow_r2 = pow_fit.r2;

  if (count >= 2) {
    const double last = series.points[count - 1].ratio;
    const double prev = series.points[count - 2].ratio;
    series.last_step_change = prev > 0 ? std::abs(last - prev) / prev : kInf;
  }

  if (series.pow_alpha < 0.02 && series.last_step_change < 0.02) {
    series.model = GrowthModel::bounded;
  } else {
    // residual comparison of the two fits in ratio space
    double log_sse = 0.0, pow_sse = 0.0;
    for (std::size_t i = start; i < count; ++i) {
      const double x = std::log(static_cast<double>(series.points[i].N));
      const double r = series.points[i].ratio;
      const double log_pred = series.log_c0 + series.log_c1 * x;
      const double pow_pred = series.pow_c * std::exp(series.pow_alpha * x);
      log_sse += (r - log_pred) * (r - log_pred);
      pow_sse += (r - pow_pred) * (r - pow_pred);
    }
    series.model = log_sse <= pow_sse ? GrowthModel::logarithmic : GrowthModel::power;
  }
  return series;
}

std::string growth_csv(const GrowthSeries& series) {
  std::ostringstream out;
  out << "N,norm_in,norm_out,ratio,fitted_model,alpha,r2\n";
  out.precision(17);
  const double r2 = series.model == GrowthModel::logarithmic ? series.log_r2
                                                             : series.pow_r2;
  for (const auto& p : series.points) {
    out << p.N << ',' << p.norm_in << ',' << p.norm_out << ',' << p.ratio << ','
        << to_string(series.model) << ',' << series.pow_alpha << ',' << r2
        << '\n';
  }
  return out.str();
}

SeriesFamily parse_series_family(const std::string& name) {
  if (name == "sum_33x") return SeriesFamily::sum_33x;
  if (name == "sum_33z") return SeriesFamily::sum_33z;
  if (name == "sharp2_E_series") return SeriesFamily::sharp2_E_series;
  if (name == "sharp2_F_series") return SeriesFamily::sharp2_F_series;
  throw std::invalid_argument("unknown series family: " + name);
}

namespace {

// Sum of 2^{jn} (1+|2^j k + y|)^{-a} over the lattice shell ||k||_inf = r.
// Surface points are enumerated once each, classified by the first axis
// attaining |k_i| = r.
double shell_sum_33z(const SeriesParams& prm, long r) {
  const int n = prm.n;
  const double scale = std::ldexp(1.0, prm.j);
  const double weight = std::pow(scale, n);
  auto value_at = [&](const std::vector<long>& k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double yi = i < static_cast<int>(prm.y.size()) ? prm.y[i] : 0.0;
      const double u = scale * static_cast<double>(k[i]) + yi;
      s += u * u;
    }
    return std::pow(1.0 + std::sqrt(s), -prm.a);
  };
  if (r == 0) return weight * value_at(std::vector<long>(n, 0));
  double total = 0.0;
  std::vector<long> k(n, 0);
  for (int pin = 0; pin < n; ++pin) {
    for (int sign = -1; sign <= 1; sign += 2) {
      // axes before `pin` range over |k_i| <= r-1, axes after over [-r, r]
      k.assign(n, 0);
      k[pin] = sign * r;
      for (int i = 0; i < pin; ++i) k[i] = -(r - 1);
      for (int i = pin + 1; i < n; ++i) k[i] = -r;
      while (true) {
        total += value_at(k);
        int axis = n - 1;
        while (axis >= 0) {
          if (axis == pin) {
            --axis;
            continue;
          }
          const long hi = axis < pin ? r - 1 : r;
          if (++k[axis] <= hi) break;
          k[axis] = axis < pin ? -(r - 1) : -r;
          --axis;
        }
        if (axis < 0) break;
      }
    }
  }
  return weight * total;
}

}  // namespace

SeriesProbe series_probe(SeriesFamily family, const SeriesParams& params, long depth) {
  if (depth < 8) throw std::invalid_argument("series_probe: depth >= 8 required");
  SeriesProbe probe;
  std::vector<long> checkpoints;
  for (long c = 8; c < depth; c *= 2) checkpoints.push_back(c);
  checkpoints.push_back(depth);

  auto term = [&](long i) -> double {
    switch (family) {
      case SeriesFamily::sum_33z:
        return shell_sum_33z(params, i);
      case SeriesFamily::sum_33x: {
        // Radial shell integral of (1+|u|)^{-a} over |u|_inf in [i, i+1)
        // (substituting u = 2^j x + y; the value is j- and y-independent).
        const int n = params.n;
        if (n != 1) {
          // crude shell estimate: surface x midpoint value
          const double r = static_cast<double>(i) + 0.5;
          const double shell =
              std::pow(2.0 * r + 1.0, n) - std::pow(2.0 * r - 1.0, n);
          return shell * std::pow(1.0 + r, -params.a);
        }
        const double lo = static_cast<double>(i), hi = lo + 1.0;
        // exact: 2 int_lo^hi (1+u)^{-a} du
        if (params.a == 1.0) return 2.0 * std::log((1.0 + hi) / (1.0 + lo));
        return 2.0 *
               (std::pow(1.0 + lo, 1.0 - params.a) -
                std::pow(1.0 + hi, 1.0 - params.a)) /
               (params.a - 1.0);
      }
      case SeriesFamily::sharp2_E_series:
        // i-th term (i >= 1) is 2^{(1-i)(E - s - n/2 - d/p)}: levels 0, -1, ...
        return std::pow(
            2.0, (1.0 - i) * (params.E - params.s - params.n / 2.0 -
                              params.d / params.p));
      case SeriesFamily::sharp2_F_series:
        return std::pow(2.0, -i * (params.F + params.s - params.n / 2.0)) /
               (1.0 + static_cast<double>(i));
    }
    return 0.0;
  };

  double sum = 0.0;
  long next_cp = 0;
  const long first = (family == SeriesFamily::sum_33z ||
                      family == SeriesFamily::sum_33x)
                         ? 0
                         : 1;
  for (long i = first; i < first + depth; ++i) {
    sum += term(i);
    const long done = i - first + 1;
    if (next_cp < static_cast<long>(checkpoints.size()) &&
        done == checkpoints[next_cp]) {
      probe.partial.emplace_back(done, sum);
      ++next_cp;
    }
  }
  if (probe.partial.empty() || probe.partial.back().first != depth)
    probe.partial.emplace_back(depth, sum);
  probe.value = sum;

  // Ratio test on doubling blocks.
  std::vector<double> blocks;
  for (std::size_t i = 1; i < probe.partial.size(); ++i)
    blocks.push_back(probe.partial[i].second - probe.partial[i - 1].second);
  double ratio = 0.0;
  int used = 0;
  for (std::size_t i = blocks.size() >= 3 ? blocks.size() - 3 : 0;
       i < blocks.size(); ++i) {
    if (i == 0) continue;
    if (blocks[i - 1] > 0) {
      ratio = std::max(ratio, blocks[i] / blocks[i - 1]);
      ++used;
    }
  }
  probe.tail_ratio = ratio;
  probe.convergent = used > 0 ? ratio < 0.98 : true;
  return probe;
}

std::pair<double, double> sum33z_spread(double a, int n, int j, int count,
                                        unsigned seed, long depth) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  double lo = kInf, hi = 0.0;
  for (int c = 0; c < count; ++c) {
    SeriesParams prm;
    prm.a = a;
    prm.n = n;
    prm.j = j;
    prm.y.resize(n);
    for (int i = 0; i < n; ++i) prm.y[i] = u(rng);
    const auto probe = series_probe(SeriesFamily::sum_33z, prm, depth);
    lo = std::min(lo, probe.value);
    hi = std::max(hi, probe.value);
  }
  return {lo, hi};
}

}  // namespace adseq
