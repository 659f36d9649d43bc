#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace adseq {

/// Dyadic cube Q_{j,k} = 2^{-j}([0,1)^n + k): level j, lattice index k,
/// half-open geometry so each level partitions R^n exactly.
struct DyadicCube {
  int j = 0;
  std::vector<std::int64_t> k;

  DyadicCube() = default;
  DyadicCube(int level, std::vector<std::int64_t> index)
      : j(level), k(std::move(index)) {}

  int dim() const { return static_cast<int>(k.size()); }

  /// Edge length 2^{-j}, an exact binary power.
  double edge() const;
  double volume() const;

  /// Lower-left corner x_Q = 2^{-j} k.
  std::vector<double> corner() const;
  /// Center c_Q = 2^{-j}(k + 1/2).
  std::vector<double> center() const;

  bool contains(std::span<const double> x) const;

  DyadicCube parent() const;
  std::vector<DyadicCube> children() const;
  /// Ancestor at a coarser (or equal) level jc <= j.
  DyadicCube ancestor(int jc) const;

  bool operator==(const DyadicCube& o) const { return j == o.j && k == o.k; }
  /// Level-major, then lexicographic in k; the canonical enumeration order.
  bool operator<(const DyadicCube& o) const;
};

/// Cube at level j containing the point x.
DyadicCube cube_at(int j, std::span<const double> x);

/// 1 + |x_Q - x_R| / (l(Q) v l(R)), Euclidean distance of corners.
double distance_factor(const DyadicCube& q, const DyadicCube& r);

/// Finite truncation of the dyadic grid: levels j_min..j_max over the spatial
/// box [-K 2^{-j_min}, K 2^{-j_min})^n, K counted in level-j_min cubes.
struct Window {
  int j_min = 0;
  int j_max = 0;
  std::int64_t K = 1;
  int n = 1;

  double box_halfwidth() const;
  /// Per-axis cube count at level j (= 2 K 2^{j - j_min}).
  std::int64_t axis_count(int j) const;
  /// Total cube count over all levels; throws on overflow of the size guard.
  std::size_t cube_count() const;
  bool contains(const DyadicCube& q) const;

  /// Deterministic enumeration: level-major, then lexicographic k.
  std::vector<DyadicCube> enumerate() const;
  std::vector<DyadicCube> level_cubes(int j) const;

  void validate() const;
};

/// One of the 3^n shifted dyadic systems: level-j cubes are
/// 2^{-j}([0,1)^n + k + (-1)^j gamma), gamma in {0, 1/3, 2/3}^n.
struct ShiftedCube {
  std::vector<double> gamma;
  int j = 0;
  std::vector<std::int64_t> k;

  double edge() const;
  std::vector<double> corner() const;
};

struct ShiftedCover {
  std::vector<double> gamma;
  ShiftedCube cube;
};

/// Axis-parallel cube with arbitrary real corner, half-open.
struct RealCube {
  std::vector<double> corner;
  double edge = 1.0;
};

/// A shifted dyadic cube S with Q subset S and l(S) in (3/2 l(Q), 3 l(Q)].
/// Searches the 3^n systems in lexicographic gamma order and returns the
/// first hit. Throws std::invalid_argument on non-positive edge.
ShiftedCover shifted_cover(const RealCube& q);

}  // namespace adseq
