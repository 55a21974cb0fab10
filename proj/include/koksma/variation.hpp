#pragma once

// Vitali variation on dyadic partitions (OpenMP-parallel corner sweep plus a
// naive serial reference), Hardy-Krause aggregation over coordinate subsets,
// derivative-based bounds, closed-form bounds for quadratic losses, and the
// builtin test function registry used by the CLI.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "koksma/common.hpp"
#include "koksma/function_handle.hpp"

namespace koksma {

// Partition sweeps refuse to walk more than this many cells, and also cap the
// corner-plane size used by the sweep.
inline constexpr std::uint64_t kMaxPartitionCells = std::uint64_t{1} << 26;

// f with the coordinates outside `subset` (1-based, strictly increasing)
// fixed at 1. Errors: EmptySubset, ValidationError on bad indices.
FunctionHandle restrict_to(const FunctionHandle& f, const std::vector<int>& subset);

// Sum of absolute alternating corner differences over the uniform dyadic
// partition with 2^level cells per axis: a lower bound of the Vitali
// variation, nondecreasing in level. Errors: BudgetExceeded.
double vitali_variation(const FunctionHandle& f, int level);

// Naive reference kernel: walks every cell and re-evaluates all 2^k corners
// with alternating signs. Same contract as vitali_variation; kept for
// cross-testing and benchmarks.
double vitali_variation_serial(const FunctionHandle& f, int level);

struct SubsetVariation {
  std::vector<int> subset;  // 1-based coordinate indices, strictly increasing
  double value = 0.0;
};

struct VariationReport {
  std::vector<SubsetVariation> per_subset;  // ordered by size, then lexicographic
  double total = 0.0;
  int level = 0;
  // Relative change of total between level-1 and level below 1e-3.
  bool converged = false;
};

// Hardy-Krause variation: Vitali variation of every nonempty coordinate
// restriction, summed. Errors: BudgetExceeded above 8 arguments.
VariationReport hardy_krause_variation(const FunctionHandle& f, int level);

struct DerivativeBound {
  double sup_bound = 0.0;          // max cell estimate of |mixed partial|
  double integral_estimate = 0.0;  // midpoint quadrature of the same
};

// Finite-difference estimate of the order-k mixed partial on a uniform grid
// with grid_n cells per axis. For f with continuous mixed partials the Vitali
// variation is bounded by sup_bound and converges to integral_estimate.
// Errors: ValidationError (needs a smoothness hint, grid_n >= 4),
// BudgetExceeded.
DerivativeBound derivative_variation_bound(const FunctionHandle& f, int grid_n);

// Closed-form bound on the Hardy-Krause variation of
// f(t) = 0.5*||(W_hat - W_star) t||^2 over t in [0,1]^{d_phi}. With G the
// column Gram matrix of W_hat - W_star this is sum_{l,l'} |G_{ll'}| plus the
// strictly-upper-triangular part again. Errors: ShapeMismatch.
double thm2_variation_bound(const Eigen::MatrixXd& W_hat, const Eigen::MatrixXd& W_star);

// Closed-form bound on the Hardy-Krause variation of
// f(t,y) = 0.5*||W_hat t - y||^2 over [0,1]^{d_phi} x [0,1]^{d_y}:
// (M+1)*sum_l ||col_l||_1 + sum_{l<l'} |col_l . col_l'| + d_y*M, where M
// bounds ||W_hat t - y||_inf. Errors: ShapeMismatch, ValidationError (M < 0).
double thm3_variation_bound(const Eigen::MatrixXd& W_hat, double M, int d_y);

// Builtin test functions (also reachable from the CLI registry).
FunctionHandle builtin_constant(int d, double value);
FunctionHandle builtin_linear(std::vector<double> coeffs);  // sum_j c_j t_j
FunctionHandle builtin_product(int d);                      // prod_j t_j
// 0.5*||(W_hat - W_star) t||^2 on [0,1]^{d_phi}.
FunctionHandle quadratic_loss(const Eigen::MatrixXd& W_hat, const Eigen::MatrixXd& W_star);
// 0.5*||W_hat t - y||^2 on [0,1]^{d_phi} x [0,1]^{d_y}, arity d_phi + d_y.
FunctionHandle quadratic_loss_labels(const Eigen::MatrixXd& W_hat);

}  // namespace koksma
