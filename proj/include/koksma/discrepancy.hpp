#pragma once

// Local discrepancy, exact star-discrepancy by grid enumeration (OpenMP
// kernel plus a naive serial reference kept for testing), the O(m log m)
// 1-D special case, a randomized certified lower bound, and closed-form
// reference bounds with an i.i.d. scaling study.

#include <cstdint>
#include <vector>

#include "koksma/common.hpp"
#include "koksma/measure.hpp"
#include "koksma/point_set.hpp"

namespace koksma {

inline constexpr std::uint64_t kDefaultCellBudget = 50'000'000;

struct DiscrepancyResult {
  enum class Side { over, under };  // over: empirical exceeds the measure

  double value = 0.0;
  std::vector<double> witness;
  Side side = Side::over;
  bool exact = true;
  std::uint64_t cells_evaluated = 0;
};

// Signed local discrepancy of the closed box [0,t]:
//   #{i : point_i <= t componentwise}/m - closed_mass(t).
double local_discrepancy(const PointSet& ps, const BoxMeasure& nu, std::span<const double> t);

// Left-limit companion: strict count and open mass,
//   #{i : point_i < t strictly in every coordinate}/m - open_mass(t).
double local_discrepancy_open(const PointSet& ps, const BoxMeasure& nu, std::span<const double> t);

// Exact sup over all anchored boxes of |local discrepancy|, enumerated on the
// grid spanned per axis by data coordinates, atom coordinates (atomic and
// degenerate-box mass), and 1. Each grid point is scored on both sides:
// closed count vs closed mass, and strict count vs open mass (the left-limit
// value, which is where the sup lives when it is only approached from below).
// Ties break toward the lexicographically smallest witness, then `over`.
// Errors: BudgetExceeded(required_cells) when the grid exceeds cell_budget.
DiscrepancyResult star_discrepancy_exact(const PointSet& ps, const BoxMeasure& nu,
                                         std::uint64_t cell_budget = kDefaultCellBudget);

// Naive reference kernel: walks every grid cell, counts points by direct
// coordinate comparison, and queries the mass oracles per cell. Same result
// contract as star_discrepancy_exact; kept for cross-testing and benchmarks.
DiscrepancyResult star_discrepancy_exact_serial(const PointSet& ps, const BoxMeasure& nu,
                                                std::uint64_t cell_budget = kDefaultCellBudget);

// d=1 special case via sorting; equals star_discrepancy_exact bit-for-bit on
// atomless measures. Errors: DimensionMismatch.
DiscrepancyResult star_discrepancy_1d(const PointSet& ps, const BoxMeasure& nu);

// Certified lower bound (every reported value is an evaluated or left-limit
// discrepancy at some box): multistart random anchors, then three sweeps of
// per-coordinate snapping to the enclosing grid coordinates. Nondecreasing in
// `iterations` for a fixed seed.
DiscrepancyResult star_discrepancy_lower_bound(const PointSet& ps, const BoxMeasure& nu,
                                               std::uint64_t iterations, std::uint64_t seed);

struct ReferenceBoundParams {
  double c1 = 1.0;  // existential constant, caller-supplied
  double c2 = 1.0;  // c2 >= c1 > 0
  int d = 1;
  std::uint64_t m = 1;
};

// c2 * sqrt(d/m).
double prop2_bound(const ReferenceBoundParams& params);

struct TailProbability {
  double delta = 0.0;
  bool vacuous = false;  // set when c1*c2^2*exp(-2*c2^2) >= 1
};

// delta = (1/(c2*sqrt(d))) * (c1*c2^2*exp(-2*c2^2))^d, with a vacuity flag.
TailProbability prop2_delta(const ReferenceBoundParams& params);

// 63*sqrt(d)*(2+log2(m))^((3d+1)/2) / m.
double prop3_bound(int d, std::uint64_t m);

// 10*sqrt(d/m).
double uniform_iid_bound(int d, std::uint64_t m);

struct ScalingRow {
  std::uint64_t m = 0;
  double median = 0.0;
  double p90 = 0.0;
  double scaled_median = 0.0;  // median * sqrt(m/d)
  double scaled_p90 = 0.0;
};

struct ScalingStudy {
  int d = 0;
  std::vector<ScalingRow> rows;
  // Smallest c2 for which c2*sqrt(d/m) dominates every observed 90th
  // percentile: max over rows of p90*sqrt(m/d).
  double smallest_consistent_c2 = 0.0;
};

// Draws `trials` i.i.d. sets of each size from nu, computes exact star
// discrepancies, and reports nearest-rank quantiles raw and scaled.
ScalingStudy scaling_study(const BoxMeasure& nu, const std::vector<std::uint64_t>& m_list,
                           int trials, std::uint64_t seed,
                           std::uint64_t cell_budget = kDefaultCellBudget);

}  // namespace koksma
