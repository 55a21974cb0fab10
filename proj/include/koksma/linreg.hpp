#pragma once

// Synthetic linear-regression instances with exactly computable expected
// losses, least-squares training, and numerical verification of the two
// regression gap bounds (structured and unstructured labels).

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "koksma/discrepancy.hpp"
#include "koksma/measure.hpp"
#include "koksma/point_set.hpp"

namespace koksma {

inline constexpr double kDefaultRidge = 1e-10;
// Slack used by the satisfied flags of the regression bound checks.
inline constexpr double kThmTolerance = 1e-9;

// Finite noise support with exact zero mean and an analytically stored second
// moment, so expectations never carry Monte Carlo error.
struct NoiseSpec {
  Eigen::MatrixXd values;     // d_y x S, support columns
  std::vector<double> probs;  // S entries, sum 1
  double second_moment = 0.0;  // E ||xi||^2
};

struct LinRegInstance {
  Eigen::MatrixXd W_star;  // d_y x d_phi
  MapSpec feature_map;     // input space -> [0,1]^{d_phi}
  BoxMeasure mu_x;         // atomic input measure
  NoiseSpec noise;
};

enum class LabelMode { structured, unstructured };

struct TrainingSample {
  PointSet X;    // raw inputs
  PointSet Phi;  // feature images, one row per input
  Eigen::MatrixXd Y;   // d_y x m targets
  Eigen::MatrixXd Xi;  // d_y x m recorded noise draws (structured mode only)
  bool has_noise = false;
  LabelMode mode = LabelMode::structured;
  std::uint64_t seed = 0;
};

struct LinRegReport {
  double lhs_gap = 0.0;  // exact expected loss minus empirical training loss
  double discrepancy = 0.0;
  double variation_bound = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  std::optional<double> M;  // unstructured mode only
  double rhs_bound = 0.0;
  bool satisfied = false;
  std::optional<DiscrepancyResult> discrepancy_detail;
};

// How the expected loss is evaluated in the unstructured check: exactly via
// the atomic-times-uniform product structure, or by Monte Carlo (spot checks
// with widened tolerances).
struct ExpectationEstimator {
  enum class Kind { exact_product, monte_carlo };
  Kind kind = Kind::exact_product;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;

  static ExpectationEstimator exact_product() { return {}; }
  static ExpectationEstimator monte_carlo(std::uint64_t n, std::uint64_t seed) {
    ExpectationEstimator e;
    e.kind = Kind::monte_carlo;
    e.n = n;
    e.seed = seed;
    return e;
  }
};

struct Remark5Row {
  std::uint64_t m = 0;
  double median_dstar = 0.0;
  double median_abs_a2 = 0.0;
  double dstar_reference = 0.0;  // 10*sqrt(d_phi/m)
  double a2_reference = 0.0;     // Hoeffding term at delta = 0.05
};

// K random atoms with random weights, W* entries in [-1,1], identity feature
// map, and per-component symmetric +-noise_scale noise (exact zero mean,
// E||xi||^2 = d_y * noise_scale^2). Errors: ValidationError.
LinRegInstance make_instance(std::uint64_t seed, int d_phi, int d_y, int K, double noise_scale);

// structured: x ~ mu_x i.i.d., noise recorded, y = W* phi(x) + xi.
// unstructured: y uniform on [0,1]^{d_y}, independent of x, no noise record.
TrainingSample sample_training(const LinRegInstance& inst, std::size_t m, std::uint64_t seed,
                               LabelMode mode);

// W = Y Phi^T (Phi Phi^T + ridge I)^{-1}. Errors: SingularSystem when
// ridge = 0 and the Gram matrix is singular; ValidationError.
Eigen::MatrixXd fit_least_squares(const TrainingSample& sample, double ridge = kDefaultRidge);

// Structured-label bound check: lhs_gap <= V * D* + A1 + A2 + tolerance,
// with every term exact (atomic mu_x, recorded noise).
// Errors: MissingNoiseRecord, ShapeMismatch, BudgetExceeded.
LinRegReport verify_thm2(const LinRegInstance& inst, const TrainingSample& sample,
                         const Eigen::MatrixXd& W_hat,
                         std::uint64_t cell_budget = kDefaultCellBudget);

// sup over (t,y) in [0,1]^{d_phi} x [0,1]^{d_y} of ||W_hat t - y||_inf. The
// objective is affine in (t,y), so the sup is attained at a vertex; the t
// vertices are enumerated and the y maximum is taken per component.
// Errors: ShapeMismatch; BudgetExceeded for d_phi + d_y > 24.
double compute_M(const Eigen::MatrixXd& W_hat, int d_y);

// Unstructured-label bound check over the joint space (phi(x), y):
// lhs_gap <= V(W_hat, M) * D* + tolerance. Errors: ValidationError
// (structured sample passed), ShapeMismatch, BudgetExceeded.
LinRegReport verify_thm3(const LinRegInstance& inst, const TrainingSample& sample,
                         const Eigen::MatrixXd& W_hat,
                         const ExpectationEstimator& estimator = {},
                         std::uint64_t cell_budget = kDefaultCellBudget);

// Empirical scaling of the feature discrepancy and the noise term A2 against
// their reference rates, per sample size.
std::vector<Remark5Row> remark5_rates(const LinRegInstance& inst,
                                      const std::vector<std::uint64_t>& m_list, int trials,
                                      std::uint64_t seed,
                                      std::uint64_t cell_budget = kDefaultCellBudget);

}  // namespace koksma
