#pragma once

// Point sets in the unit cube [0,1]^d: validation, maps, low-discrepancy
// generators, and the CSV interchange format.

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "koksma/common.hpp"

namespace koksma {

// An ordered multiset of m points in [0,1]^d, row-major. Order is stable and
// duplicates are allowed; coordinates are validated, never clamped.
struct PointSet {
  int d = 0;
  std::vector<double> coords;  // m*d entries

  std::size_t size() const { return d > 0 ? coords.size() / static_cast<std::size_t>(d) : 0; }

  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }

  double at(std::size_t i, int j) const {
    return coords[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
  }
};

// Checks rectangularity, dimension, and the unit-cube invariant.
// Errors: DimensionMismatch, OutOfUnitCube(index, coordinate).
PointSet validate(const std::vector<std::vector<double>>& raw, int d);

// Same checks applied to an already-flat coordinate buffer.
PointSet validate_flat(std::vector<double> coords, int d);

// A map [0,1]^{d_in} -> [0,1]^{d_out}. Four kinds:
//  - identity
//  - select: output j copies input coordinate select_idx[j]
//  - affine_clamp: out = clamp(A*in + b, 0, 1), A is d_out x d_in row-major
//  - tabulated: exact lookup on a declared finite support
struct MapSpec {
  enum class Kind { identity, select, affine_clamp, tabulated };

  Kind kind = Kind::identity;
  int d_in = 0;
  int d_out = 0;
  std::vector<int> select_idx;  // 0-based input indices, one per output coord
  std::vector<double> matrix;   // d_out*d_in row-major
  std::vector<double> offset;   // d_out
  std::vector<std::pair<std::vector<double>, std::vector<double>>> table;

  static MapSpec identity(int d);
  static MapSpec select(int d_in, std::vector<int> idx_zero_based);
  static MapSpec affine_clamp(int d_in, int d_out, std::vector<double> matrix,
                              std::vector<double> offset);
  static MapSpec tabulated(int d_in, int d_out,
                           std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs);
};

// Applies the map to one point. Tabulated maps require an exact support hit.
std::vector<double> apply_map_point(const MapSpec& map, std::span<const double> in);

// Applies the map to every point, preserving order and multiplicity.
// Errors: DimensionMismatch (d_in != ps.d), MapRangeViolation.
PointSet apply_map(const PointSet& ps, const MapSpec& map);

// First m radical-inverse values in the given base, d=1. Errors: InvalidBase.
PointSet van_der_corput(std::size_t m, int base);

// Halton sequence on the first d primes (d <= 8). Column j is
// van_der_corput(m, prime_j). Errors: DimensionTooLarge.
PointSet halton(std::size_t m, int d);

// d=1 points (2i-1)/(2m), i = 1..m.
PointSet equispaced_centers(std::size_t m);

// CSV format: header "# d=<d>", then one comma-separated point per line,
// 17 significant digits (round-trip exact).
void write_points_csv(std::ostream& os, const PointSet& ps);
PointSet read_points_csv(std::istream& is);

}  // namespace koksma
