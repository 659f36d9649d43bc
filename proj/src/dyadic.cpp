#include "adseq/dyadic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace adseq {

double DyadicCube::edge() const { return std::ldexp(1.0, -j); }

double DyadicCube::volume() const { return std::ldexp(1.0, -j * dim()); }

std::vector<double> DyadicCube::corner() const {
  std::vector<double> x(k.size());
  const double h = edge();
  for (std::size_t i = 0; i < k.size(); ++i) x[i] = h * static_cast<double>(k[i]);
  return x;
}

std::vector<double> DyadicCube::center() const {
  std::vector<double> x(k.size());
  const double h = edge();
  for (std::size_t i = 0; i < k.size(); ++i)
    x[i] = h * (static_cast<double>(k[i]) + 0.5);
  return x;
}

bool DyadicCube::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  const double h = edge();
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double lo = h * static_cast<double>(k[i]);
    if (!(x[i] >= lo && x[i] < lo + h)) return false;
  }
  return true;
}

namespace {
std::int64_t floor_div2(std::int64_t v) {
  return v >= 0 ? v / 2 : (v - 1) / 2;
}
}  // namespace

DyadicCube DyadicCube::parent() const {
  std::vector<std::int64_t> pk(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) pk[i] = floor_div2(k[i]);
  return {j - 1, std::move(pk)};
}

std::vector<DyadicCube> DyadicCube::children() const {
  const int n = dim();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    std::vector<std::int64_t> ck(k.size());
    for (int i = 0; i < n; ++i)
      ck[i] = 2 * k[i] + static_cast<std::int64_t>((bits >> i) & 1u);
    out.emplace_back(j + 1, std::move(ck));
  }
  return out;
}

DyadicCube DyadicCube::ancestor(int jc) const {
  if (jc > j) throw std::invalid_argument("ancestor: level must be coarser");
  DyadicCube q = *this;
  std::vector<std::int64_t> ak(k.size());
  const int shift = j - jc;
  for (std::size_t i = 0; i < k.size(); ++i) {
    std::int64_t v = k[i];
    for (int s = 0; s < shift; ++s) v = floor_div2(v);
    ak[i] = v;
  }
  return {jc, std::move(ak)};
}

bool DyadicCube::operator<(const DyadicCube& o) const {
  if (j != o.j) return j < o.j;
  return k < o.k;
}

DyadicCube cube_at(int j, std::span<const double> x) {
  std::vector<std::int64_t> k(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    k[i] = static_cast<std::int64_t>(std::floor(std::ldexp(x[i], j)));
  return {j, std::move(k)};
}

double distance_factor(const DyadicCube& q, const DyadicCube& r) {
  if (q.dim() != r.dim())
    throw std::invalid_argument("distance_factor: dimension mismatch");
  const auto xq = q.corner();
  const auto xr = r.corner();
  double d2 = 0.0;
  for (std::size_t i = 0; i < xq.size(); ++i) {
    const double d = xq[i] - xr[i];
    d2 += d * d;
  }
  const double lmax = std::max(q.edge(), r.edge());
  return 1.0 + std::sqrt(d2) / lmax;
}

double Window::box_halfwidth() const {
  return static_cast<double>(K) * std::ldexp(1.0, -j_min);
}

std::int64_t Window::axis_count(int j) const {
  return 2 * K * (std::int64_t{1} << (j - j_min));
}

void Window::validate() const {
  if (j_min > j_max) throw std::invalid_argument("window: j_min > j_max");
  if (K <= 0) throw std::invalid_argument("window: K must be positive");
  if (n <= 0) throw std::invalid_argument("window: dimension must be positive");
  if (j_max - j_min > 48) throw std::invalid_argument("window: level range too deep");
  cube_count();
}

std::size_t Window::cube_count() const {
  constexpr std::size_t kGuard = 200'000'000;
  long double total = 0.0L;
  for (int j = j_min; j <= j_max; ++j) {
    long double per_axis = 2.0L * static_cast<long double>(K) *
                           powl(2.0L, j - j_min);
    total += powl(per_axis, n);
    if (total > static_cast<long double>(kGuard))
      throw std::length_error("window: cube count exceeds size guard");
  }
  return static_cast<std::size_t>(total);
}

bool Window::contains(const DyadicCube& q) const {
  if (q.dim() != n || q.j < j_min || q.j > j_max) return false;
  const std::int64_t half = K * (std::int64_t{1} << (q.j - j_min));
  for (auto ki : q.k)
    if (ki < -half || ki >= half) return false;
  return true;
}

std::vector<DyadicCube> Window::level_cubes(int j) const {
  const std::int64_t half = K * (std::int64_t{1} << (j - j_min));
  std::vector<DyadicCube> out;
  std::vector<std::int64_t> idx(n, -half);
  const std::size_t count = [&] {
    long double c = powl(2.0L * static_cast<long double>(half), n);
    if (c > 200'000'000.0L) throw std::length_error("level_cubes: size guard");
    return static_cast<std::size_t>(c);
  }();
  out.reserve(count);
  while (true) {
    out.emplace_back(j, idx);
    int axis = n - 1;
    while (axis >= 0) {
      if (++idx[axis] < half) break;
      idx[axis] = -half;
      --axis;
    }
    if (axis < 0) break;
  }
  return out;
}

std::vector<DyadicCube> Window::enumerate() const {
  validate();
  std::vector<DyadicCube> out;
  out.reserve(cube_count());
  for (int j = j_min; j <= j_max; ++j) {
    auto lv = level_cubes(j);
    out.insert(out.end(), std::make_move_iterator(lv.begin()),
               std::make_move_iterator(lv.end()));
  }
  return out;
}

double ShiftedCube::edge() const { return std::ldexp(1.0, -j); }

std::vector<double> ShiftedCube::corner() const {
  std::vector<double> x(k.size());
  const double h = edge();
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  for (std::size_t i = 0; i < k.size(); ++i)
    x[i] = h * (static_cast<double>(k[i]) + sign * gamma[i]);
  return x;
}

ShiftedCover shifted_cover(const RealCube& q) {
  if (!(q.edge > 0.0) || !std::isfinite(q.edge))
    throw std::invalid_argument("shifted_cover: edge must be positive and finite");
  const int n = static_cast<int>(q.corner.size());
  if (n == 0) throw std::invalid_argument("shifted_cover: empty corner");

  // Unique level with 2^{-j} in (3/2 l, 3 l]: the single binary power in a
  // half-open octave of width 2.
  int exp = 0;
  std::frexp(3.0 * q.edge, &exp);
  const int j = 1 - exp;
  const double h = std::ldexp(1.0, -j);
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;

  const double shifts[3] = {0.0, 1.0 / 3.0, 2.0 / 3.0};
  std::vector<int> choice(n, 0);
  const double tol = 1e-12 * h;
  while (true) {
    std::vector<double> gamma(n);
    for (int i = 0; i < n; ++i) gamma[i] = shifts[choice[i]];
    bool ok = true;
    std::vector<std::int64_t> k(n);
    for (int i = 0; i < n && ok; ++i) {
      // Corner of a candidate S: h (k + sign*gamma) <= corner_i.
      double base = q.corner[i] / h - sign * gamma[i];
      std::int64_t ki = static_cast<std::int64_t>(std::floor(base + tol));
      double lo = h * (static_cast<double>(ki) + sign * gamma[i]);
      if (q.corner[i] + q.edge > lo + h + tol) ok = false;
      k[i] = ki;
    }
    if (ok) return {gamma, ShiftedCube{gamma, j, std::move(k)}};
    int axis = n - 1;
    while (axis >= 0) {
      if (++choice[axis] < 3) break;
      choice[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  throw std::runtime_error("shifted_cover: no covering system found");
}

}  // namespace adseq
