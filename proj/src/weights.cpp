#include "adseq/weights.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "adseq/util.hpp"

namespace adseq {

namespace {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Matrix hermitian_power(const Matrix& a, double expo) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_power: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  Eigen::VectorXd powered(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double v = std::max(ev(i), 0.0);
    if (v == 0.0 && expo < 0.0)
      throw std::domain_error("hermitian_power: singular matrix");
    powered(i) = std::pow(v, expo);
  }
  return es.eigenvectors() * powered.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

double spectral_norm(const Matrix& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

WeightModel WeightModel::identity(int m) {
  WeightModel w;
  w.kind_ = Kind::identity;
  w.m_ = m;
  return w;
}

WeightModel WeightModel::scalar_power(double d, int m) {
  WeightModel w;
  w.kind_ = Kind::scalar_power;
  w.m_ = m;
  w.exponents_.assign(1, d);
  return w;
}

WeightModel WeightModel::diagonal_power(std::vector<double> exponents) {
  if (exponents.empty())
    throw std::invalid_argument("diagonal_power: no exponents");
  WeightModel w;
  w.kind_ = Kind::diagonal_power;
  w.m_ = static_cast<int>(exponents.size());
  w.exponents_ = std::move(exponents);
  return w;
}

WeightModel WeightModel::grid(std::vector<GridSample> samples) {
  if (samples.empty()) throw std::invalid_argument("grid weight: empty table");
  const int m = static_cast<int>(samples.front().w.rows());
  for (const auto& s : samples) {
    if (s.w.rows() != m || s.w.cols() != m)
      throw std::invalid_argument("grid weight: inconsistent matrix size");
    if (!s.w.isApprox(s.w.adjoint(), 1e-10))
      throw std::invalid_argument("grid weight: sample not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.w);
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw std::invalid_argument("grid weight: sample not nonnegative definite");
  }
  WeightModel w;
  w.kind_ = Kind::grid;
  w.m_ = m;
  w.samples_ = std::move(samples);
  return w;
}

const GridSample& WeightModel::nearest(std::span<const double> x) const {
  const GridSample* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& s : samples_) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < s.x.size() && i < x.size(); ++i) {
      const double d = s.x[i] - x[i];
      d2 += d * d;
    }
    if (d2 < best_d) {
      best_d = d2;
      best = &s;
    }
  }
  return *best;
}

Matrix WeightModel::eval(std::span<const double> x) const {
  switch (kind_) {
    case Kind::identity:
      return Matrix::Identity(m_, m_);
    case Kind::scalar_power: {
      const double r = norm2(x);
      if (r == 0.0 && exponents_[0] != 0.0)
        throw std::domain_error("weight: evaluation at the singular point");
      return std::pow(r, -exponents_[0]) * Matrix::Identity(m_, m_);
    }
    case Kind::diagonal_power: {
      const double r = norm2(x);
      Matrix w = Matrix::Zero(m_, m_);
      for (int i = 0; i < m_; ++i) {
        if (r == 0.0 && exponents_[i] != 0.0)
          throw std::domain_error("weight: evaluation at the singular point");
        w(i, i) = std::pow(r, -exponents_[i]);
      }
      return w;
    }
    case Kind::grid:
      return nearest(x).w;
  }
  throw std::logic_error("weight: unknown kind");
}

Matrix WeightModel::root(std::span<const double> x, double p) const {
  switch (kind_) {
    case Kind::identity:
      return Matrix::Identity(m_, m_);
    case Kind::scalar_power: {
      const double r = norm2(x);
      if (r == 0.0 && exponents_[0] != 0.0)
        throw std::domain_error("weight: root at the singular point");
      return std::pow(r, -exponents_[0] / p) * Matrix::Identity(m_, m_);
    }
    case Kind::diagonal_power: {
      const double r = norm2(x);
      Matrix w = Matrix::Zero(m_, m_);
      for (int i = 0; i < m_; ++i) {
        if (r == 0.0 && exponents_[i] != 0.0)
          throw std::domain_error("weight: root at the singular point");
        w(i, i) = std::pow(r, -exponents_[i] / p);
      }
      return w;
    }
    case Kind::grid:
      return hermitian_power(nearest(x).w, 1.0 / p);
  }
  throw std::logic_error("weight: unknown kind");
}

double WeightModel::root_apply(std::span<const double> x, double p,
                               const Vector& z) const {
  switch (kind_) {
    case Kind::identity:
      return z.norm();
    case Kind::scalar_power:
      return std::pow(norm2(x), -exponents_[0] / p) * z.norm();
    case Kind::diagonal_power: {
      const double r = norm2(x);
      double s = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double f = std::pow(r, -exponents_[i] / p);
        s += f * f * std::norm(z(i));
      }
      return std::sqrt(s);
    }
    case Kind::grid:
      return (root(x, p) * z).norm();
  }
  throw std::logic_error("weight: unknown kind");
}

double WeightModel::transition_norm(std::span<const double> x,
                                    std::span<const double> y, double p) const {
  switch (kind_) {
    case Kind::identity:
      return 1.0;
    case Kind::scalar_power:
      return std::pow(norm2(y) / norm2(x), exponents_[0] / p);
    case Kind::diagonal_power: {
      const double ratio = norm2(y) / norm2(x);
      double best = 0.0;
      for (double d : exponents_) best = std::max(best, std::pow(ratio, d / p));
      return best;
    }
    case Kind::grid:
      return spectral_norm(root(x, p) * hermitian_power(nearest(y).w, -1.0 / p));
  }
  throw std::logic_error("weight: unknown kind");
}

bool WeightModel::cell_singular(std::span<const double> corner, double edge) const {
  if (kind_ == Kind::identity || kind_ == Kind::grid) return false;
  bool nonzero = false;
  for (double d : exponents_) nonzero |= (d != 0.0);
  if (!nonzero) return false;
  for (double c : corner)
    if (c > 0.0 || c + edge < 0.0) return false;
  return true;
}

namespace {

// Average of f over the cube Q under the weight's quadrature policy.
double cube_average(const WeightModel& w, const DyadicCube& q,
                    const std::function<double(std::span<const double>)>& f) {
  const auto corner = q.corner();
  auto singular = [&w](std::span<const double> c, double e) {
    return w.cell_singular(c, e);
  };
  const double integral =
      integrate_cube(f, corner, q.edge(), w.quad, singular);
  return integral / q.volume();
}

}  // namespace

double rho_q(const WeightModel& w, const DyadicCube& q, double p, const Vector& z) {
  if (z.norm() == 0.0) return 0.0;
  const double avg = cube_average(
      w, q, [&](std::span<const double> x) { return std::pow(w.root_apply(x, p, z), p); });
  return std::pow(avg, 1.0 / p);
}

Matrix average_weight(const WeightModel& w, const DyadicCube& q) {
  const int m = w.m();
  Matrix avg = Matrix::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      const double re = cube_average(w, q, [&](std::span<const double> x) {
        return w.eval(x)(a, b).real();
      });
      double im = 0.0;
      if (b > a && w.kind() == WeightModel::Kind::grid) {
        im = cube_average(w, q, [&](std::span<const double> x) {
          return w.eval(x)(a, b).imag();
        });
      }
      avg(a, b) = {re, im};
      avg(b, a) = {re, -im};
    }
  }
  return avg;
}

namespace {

std::vector<Vector> sample_directions(int m, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector> zs;
  zs.reserve(count + m);
  for (int i = 0; i < m; ++i) zs.push_back(Vector::Unit(m, i));
  for (int i = 0; i < count; ++i) {
    Vector z(m);
    for (int a = 0; a < m; ++a) z(a) = {g(rng), g(rng)};
    const double nz = z.norm();
    if (nz > 0) zs.push_back(z / nz);
  }
  return zs;
}

}  // namespace

ReducingResult reducing_operator(const WeightModel& w, const DyadicCube& q, double p,
                                 bool force_ellipsoid) {
  const int m = w.m();
  if (!force_ellipsoid) {
    if (w.kind() == WeightModel::Kind::identity)
      return {Matrix::Identity(m, m), 1.0, ReducingProvenance::exact_scalar};
    if (w.kind() == WeightModel::Kind::scalar_power) {
      const double s = rho_q(w, q, p, Vector::Unit(m, 0));
      return {s * Matrix::Identity(m, m), 1.0, ReducingProvenance::exact_scalar};
    }
    if (p == 2.0) {
      Matrix g = average_weight(w, q);
      return {hermitian_power(g, 0.5), 1.0, ReducingProvenance::exact_p2};
    }
  }

  // Ellipsoid fit: Hermitian G with z* G z ~ rho_Q(z)^2 in least squares,
  // over 8 m^2 sampled unit directions; A = G^{1/2}.
  const auto zs = sample_directions(m, 8 * m * m, 0x5eed);
  const int dof = m * m;
  Eigen::MatrixXd design(static_cast<int>(zs.size()), dof);
  Eigen::VectorXd target(static_cast<int>(zs.size()));
  std::vector<double> rhos(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const Vector& z = zs[i];
    rhos[i] = rho_q(w, q, p, z);
    target(static_cast<int>(i)) = rhos[i] * rhos[i];
    int col = 0;
    for (int a = 0; a < m; ++a) design(static_cast<int>(i), col++) = std::norm(z(a));
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        const std::complex<double> cross = std::conj(z(a)) * z(b);
        design(static_cast<int>(i), col++) = 2.0 * cross.real();
        design(static_cast<int>(i), col++) = -2.0 * cross.imag();
      }
    }
  }
  Eigen::VectorXd sol = design.colPivHouseholderQr().solve(target);
  Matrix g = Matrix::Zero(m, m);
  int col = 0;
  for (int a = 0; a < m; ++a) g(a, a) = sol(col++);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      const double re = sol(col++);
      const double im = sol(col++);
      g(a, b) = {re, im};
      g(b, a) = {re, -im};
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "reducing_operator: ellipsoid fit not positive definite; spectrum:";
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      msg << ' ' << es.eigenvalues()(i);
    throw std::runtime_error(msg.str());
  }
  Matrix a = hermitian_power(g, 0.5);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double az = (a * zs[i]).norm();
    if (az > 0 && rhos[i] > 0) {
      const double r = rhos[i] / az;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  return {std::move(a), hi / lo, ReducingProvenance::ellipsoid_fit};
}

double reducing_power_closed_form(double d, double p, const DyadicCube& q) {
  double k2 = 0.0;
  for (auto ki : q.k) k2 += static_cast<double>(ki) * static_cast<double>(ki);
  return std::pow(2.0, q.j * d / p) * std::pow(1.0 + std::sqrt(k2), -d / p);
}

ReducingFamily ReducingFamily::identity(int m) {
  ReducingFamily f;
  f.provenance_ = ReducingProvenance::identity;
  f.m_ = m;
  return f;
}

ReducingFamily ReducingFamily::closed_form_power(double d, double p, int m) {
  ReducingFamily f;
  f.provenance_ = ReducingProvenance::closed_form_power;
  f.m_ = m;
  f.d_ = d;
  f.p_ = p;
  return f;
}

ReducingFamily ReducingFamily::fit(const WeightModel& w, double p, const Window& win) {
  ReducingFamily f;
  f.m_ = w.m();
  const auto cubes = win.enumerate();
  std::vector<ReducingResult> results(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t i) {
    results[i] = reducing_operator(w, cubes[i], p);
  });
  f.provenance_ = results.empty() ? ReducingProvenance::identity
                                  : results.front().provenance;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    f.max_spread_ = std::max(f.max_spread_, results[i].spread);
    f.table_.emplace(cubes[i], std::move(results[i].a));
  }
  return f;
}

bool ReducingFamily::is_scalar() const {
  return provenance_ == ReducingProvenance::identity ||
         provenance_ == ReducingProvenance::closed_form_power;
}

double ReducingFamily::scalar_at(const DyadicCube& q) const {
  switch (provenance_) {
    case ReducingProvenance::identity:
      return 1.0;
    case ReducingProvenance::closed_form_power:
      return reducing_power_closed_form(d_, p_, q);
    default:
      throw std::logic_error("scalar_at: family is not scalar");
  }
}

Matrix ReducingFamily::at(const DyadicCube& q) const {
  if (is_scalar()) return scalar_at(q) * Matrix::Identity(m_, m_);
  auto it = table_.find(q);
  if (it == table_.end())
    throw std::out_of_range("reducing family: cube not covered");
  return it->second;
}

double ReducingFamily::apply_norm(const DyadicCube& q, const Vector& z) const {
  if (is_scalar()) return scalar_at(q) * z.norm();
  return (at(q) * z).norm();
}

Vector ReducingFamily::apply_inverse(const DyadicCube& q, const Vector& z) const {
  if (is_scalar()) return z / scalar_at(q);
  return at(q).fullPivLu().solve(z);
}

bool ReducingFamily::covers(const DyadicCube& q) const {
  return is_scalar() || table_.count(q) > 0;
}

double WeightProfile::p_prime() const {
  if (p <= 1.0) return std::numeric_limits<double>::infinity();
  return p / (p - 1.0);
}

double WeightProfile::delta() const {
  return d / p + (p > 1.0 ? d_tilde / p_prime() : 0.0);
}

void WeightProfile::validate(int n) const {
  if (!(p > 0.0)) throw std::invalid_argument("profile: p must be positive");
  if (d < 0.0 || d >= n) throw std::invalid_argument("profile: d out of [0,n)");
  if (d_tilde < 0.0 || d_tilde >= n)
    throw std::invalid_argument("profile: d~ out of [0,n)");
  if (p <= 1.0 && d_tilde != 0.0)
    throw std::invalid_argument("profile: d~ must be 0 when p <= 1");
}

namespace {

// Quadrature nodes of Q under the weight's policy (including the singular
// subdivision), used as the ess-sup surrogate set.
void collect_nodes(const WeightModel& w, std::span<const double> corner,
                   double edge, int depth, std::vector<std::vector<double>>& out) {
  const int n = static_cast<int>(corner.size());
  if (w.cell_singular(corner, edge) && depth < w.quad.singular_depth) {
    const double h = edge / 2.0;
    std::vector<double> c(n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      for (int i = 0; i < n; ++i)
        c[i] = corner[i] + (((bits >> i) & 1u) ? h : 0.0);
      collect_nodes(w, c, h, depth + 1, out);
    }
    return;
  }
  const auto& rule = gauss_rule(w.quad.points);
  std::vector<int> idx(n, 0);
  while (true) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = corner[i] + edge * rule.nodes[idx[i]];
    out.push_back(std::move(x));
    int axis = n - 1;
    while (axis >= 0) {
      if (++idx[axis] < w.quad.points) break;
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
}

struct Box {
  std::vector<double> corner;
  double edge;
};

Box expanded(const DyadicCube& q, int i) {
  // 2^i Q: same center, edge 2^i l(Q).
  const auto c = q.center();
  const double e = std::ldexp(q.edge(), i);
  Box b;
  b.edge = e;
  b.corner.resize(c.size());
  for (std::size_t a = 0; a < c.size(); ++a) b.corner[a] = c[a] - e / 2.0;
  return b;
}

// The defining A_p / A_p-dimension quantity for the pair (Q, E) where E is a
// box (E = Q itself for the A_p constant, E = 2^i Q for the dimension).
double ap_quantity(const WeightModel& w, const DyadicCube& q, const Box& e,
                   double p) {
  auto singular = [&w](std::span<const double> c, double ed) {
    return w.cell_singular(c, ed);
  };
  const double vol_q = q.volume();
  const auto corner_q = q.corner();
  if (p <= 1.0) {
    std::vector<std::vector<double>> ys;
    collect_nodes(w, e.corner, e.edge, 0, ys);
    double best = 0.0;
    for (const auto& y : ys) {
      const double avg =
          integrate_cube(
              [&](std::span<const double> x) {
                return std::pow(w.transition_norm(x, y, p), p);
              },
              corner_q, q.edge(), w.quad, singular) /
          vol_q;
      best = std::max(best, avg);
    }
    return best;
  }
  const double pp = p / (p - 1.0);
  const double vol_e = std::pow(e.edge, static_cast<int>(e.corner.size()));
  const double outer =
      integrate_cube(
          [&](std::span<const double> x) {
            const double inner =
                integrate_cube(
                    [&](std::span<const double> y) {
                      return std::pow(w.transition_norm(x, y, p), pp);
                    },
                    e.corner, e.edge, w.quad, singular) /
                vol_e;
            return std::pow(inner, p / pp);
          },
          corner_q, q.edge(), w.quad, singular) /
      vol_q;
  return outer;
}

}  // namespace

ApEstimate ap_constant(const WeightModel& w, double p, const Window& win) {
  if (w.kind() == WeightModel::Kind::identity) {
    return {1.0, win.enumerate().front()};
  }
  const auto cubes = win.enumerate();
  std::vector<double> vals(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t i) {
    Box self{cubes[i].corner(), cubes[i].edge()};
    vals[i] = ap_quantity(w, cubes[i], self, p);
  });
  ApEstimate est;
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    if (vals[i] > est.value) {
      est.value = vals[i];
      est.argmax = cubes[i];
    }
  }
  return est;
}

DimensionFit ap_dimension_fit(const WeightModel& w, double p, const Window& win,
                              int i_max, int max_cubes) {
  if (i_max < 2) throw std::invalid_argument("ap_dimension_fit: i_max >= 2 required");
  auto cubes = win.enumerate();
  if (static_cast<int>(cubes.size()) > max_cubes) {
    std::vector<DyadicCube> sampled;
    const double stride = static_cast<double>(cubes.size()) / max_cubes;
    for (int i = 0; i < max_cubes; ++i)
      sampled.push_back(cubes[static_cast<std::size_t>(i * stride)]);
    cubes = std::move(sampled);
  }
  DimensionFit fit;
  fit.per_i.resize(i_max + 1);
  std::vector<double> maxima(i_max + 1, 0.0);
  for (int i = 0; i <= i_max; ++i) {
    std::vector<double> vals(cubes.size());
    parallel_for(cubes.size(), [&](std::size_t c) {
      vals[c] = ap_quantity(w, cubes[c], expanded(cubes[c], i), p);
    });
    maxima[i] = *std::max_element(vals.begin(), vals.end());
    fit.per_i[i] = {i, maxima[i]};
  }
  // least-squares slope of log2(max) against i
  double si = 0, sy = 0, sii = 0, siy = 0;
  const int count = i_max + 1;
  for (int i = 0; i <= i_max; ++i) {
    const double y = std::log2(std::max(maxima[i], 1e-300));
    si += i;
    sy += y;
    sii += static_cast<double>(i) * i;
    siy += i * y;
  }
  fit.slope = (count * siy - si * sy) / (count * sii - si * si);
  return fit;
}

Lemma22Report lemma22_check(const ReducingFamily& fam, const WeightProfile& prof,
                            std::span<const std::pair<DyadicCube, DyadicCube>> pairs) {
  Lemma22Report report;
  report.pairs = pairs.size();
  const double dp = prof.d / prof.p;
  const double dtp = prof.p > 1.0 ? prof.d_tilde / prof.p_prime() : 0.0;
  const double delta = prof.delta();
  for (const auto& [q, r] : pairs) {
    double lhs;
    if (fam.is_scalar()) {
      lhs = fam.scalar_at(q) / fam.scalar_at(r);
    } else {
      lhs = spectral_norm(fam.at(q) * fam.at(r).inverse());
    }
    const double lq = q.edge(), lr = r.edge();
    const auto cq = q.center(), cr = r.center();
    double dist2 = 0.0;
    for (std::size_t i = 0; i < cq.size(); ++i) {
      const double d = cq[i] - cr[i];
      dist2 += d * d;
    }
    const double envelope =
        std::max(std::pow(lr / lq, dp), std::pow(lq / lr, dtp)) *
        std::pow(1.0 + std::sqrt(dist2) / std::max(lq, lr), delta);
    const double ratio = lhs / envelope;
    if (ratio > report.c) {
      report.c = ratio;
      report.arg_q = q;
      report.arg_r = r;
    }
  }
  return report;
}

}  // namespace adseq
