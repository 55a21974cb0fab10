#pragma once

// Composition of the gap bound (variation times star-discrepancy), the exact
// signed-measure identity behind it, the 0-1 loss equality case, and the
// Hoeffding and class-conditional auxiliary bounds.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "koksma/discrepancy.hpp"
#include "koksma/function_handle.hpp"
#include "koksma/measure.hpp"
#include "koksma/point_set.hpp"
#include "koksma/variation.hpp"

namespace koksma {

inline constexpr double kGapTolerance = 1e-10;

struct GapBoundReport {
  // Expected minus empirical mean; present only when the expectation is
  // exactly computable (atomic measure or signed-measure representation).
  std::optional<double> gap;
  double variation = 0.0;
  double discrepancy = 0.0;
  double bound = 0.0;  // variation * discrepancy
  bool satisfied = true;
  bool equality = false;  // |gap| matches the bound exactly (0-1 loss case)
  std::map<std::string, double> auxiliary;
  std::optional<DiscrepancyResult> discrepancy_detail;
};

// How the variation factor is obtained: a dyadic numerical estimate of the
// Hardy-Krause variation, or a caller-supplied closed-form value.
struct VariationMode {
  enum class Kind { numeric, closed_form };
  Kind kind = Kind::numeric;
  int level = 6;
  double value = 0.0;

  static VariationMode numeric(int level) {
    VariationMode m;
    m.kind = Kind::numeric;
    m.level = level;
    return m;
  }
  static VariationMode closed_form(double value) {
    VariationMode m;
    m.kind = Kind::closed_form;
    m.value = value;
    return m;
  }
};

// Exact generalization gap sum_a w_a f(map(atom_a)) - mean_i f(map(z_i)).
// Errors: ValidationError (mu not atomic), DimensionMismatch,
// MapRangeViolation.
double gap_exact(const FunctionHandle& f, const MapSpec& map, const BoxMeasure& mu,
                 const PointSet& dataset);

// bound = V[f] * D*(mapped_points, measure_T); gap is filled when measure_T
// is atomic. Errors: BudgetExceeded propagated from either factor.
GapBoundReport koksma_hlawka_bound(const FunctionHandle& f, const PointSet& mapped_points,
                                   const BoxMeasure& measure_T, const VariationMode& mode,
                                   std::uint64_t cell_budget = kDefaultCellBudget);

// Same bound for f represented by a signed atomic measure: the variation is
// its total variation and the gap is exact for any measure_T, since
// E[f] = sum_a w_a * closed_mass(measure_T, loc_a) + offset.
GapBoundReport koksma_hlawka_bound(const SignedAtomicMeasure& nu_f, const PointSet& mapped_points,
                                   const BoxMeasure& measure_T,
                                   std::uint64_t cell_budget = kDefaultCellBudget);

struct IdentityCheck {
  double lhs = 0.0;  // exact expectation minus empirical mean of f
  double rhs = 0.0;  // sum_a w_a * (mass of [0,loc_a] minus empirical fraction)
  double residual = 0.0;
};

// The exact identity: the gap of f = f_from_signed(nu_f) equals the weighted
// sum of per-atom local discrepancies. Holds for every input triple.
IdentityCheck verify_thm1_identity(const SignedAtomicMeasure& nu_f, const BoxMeasure& measure_T,
                                   const PointSet& dataset_T);

// 0-1 loss equality case: with losses in {0,1} and the true error rate, the
// gap bound holds with equality (variation 1, discrepancy |gap|).
// Errors: ValidationError.
GapBoundReport zero_one_tightness(const std::vector<int>& losses, double true_mass_one);

// M * sqrt(ln(1/delta) / (2m)). Errors: InvalidDelta, ValidationError.
double hoeffding_term(double M, std::uint64_t m, double delta);

struct ClassTerm {
  double p_y = 0.0;             // class prior
  std::uint64_t n_y = 0;        // per-class sample count
  double empirical_loss = 0.0;  // per-class empirical loss
  double variation = 0.0;       // V of the class-conditional loss function
};

// sum_y [ c2 * p_y * V_y * sqrt(d_z/n_y) + loss_y * sqrt(ln(2/delta)/(2 n_y)) ].
// Errors: InvalidClassPriors, InvalidDelta, ValidationError.
double classwise_bound(const std::vector<ClassTerm>& classes, int d_z, double c2, double delta);

}  // namespace koksma
