#include "koksma/linreg.hpp"

#include <algorithm>
#include <cmath>

#include "koksma/bounds.hpp"
#include "koksma/variation.hpp"

namespace koksma {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double nearest_rank(const std::vector<double>& sorted, double q) {
  std::size_t r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  if (r < 1) r = 1;
  if (r > sorted.size()) r = sorted.size();
  return sorted[r - 1];
}

void check_noise(const NoiseSpec& noise, int d_y) {
  if (noise.values.rows() != d_y)
    throw ShapeMismatch("noise support dimension disagrees with d_y");
  if (static_cast<std::size_t>(noise.values.cols()) != noise.probs.size())
    throw ShapeMismatch("noise support count disagrees with probability count");
  if (noise.probs.empty()) throw ValidationError("noise needs at least one support column");
  double total = 0.0;
  for (double p : noise.probs) {
    if (!(p >= 0.0)) throw ValidationError("noise probabilities must be nonnegative");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw ValidationError("noise probabilities sum to " + std::to_string(total) + ", expected 1");
}

Eigen::Map<const Eigen::VectorXd> row_vec(const PointSet& ps, std::size_t i) {
  return Eigen::Map<const Eigen::VectorXd>(ps.point(i).data(), ps.d);
}

std::size_t pick_category(const std::vector<double>& probs, double u) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    c += probs[i];
    if (u < c) return i;
  }
  return probs.size() - 1;
}

}  // namespace

LinRegInstance make_instance(std::uint64_t seed, int d_phi, int d_y, int K, double noise_scale) {
  if (d_phi < 1 || d_y < 1) throw ValidationError("dimensions must be at least 1");
  if (K < 2) throw ValidationError("need at least two support atoms");
  if (!(noise_scale >= 0.0)) throw ValidationError("noise scale must be nonnegative");
  if (d_y > 20)
    throw BudgetExceeded(std::uint64_t{1} << d_y, std::uint64_t{1} << 20);

  Rng rng(seed);
  PointSet support;
  support.d = d_phi;
  support.coords.resize(static_cast<std::size_t>(K) * static_cast<std::size_t>(d_phi));
  for (double& c : support.coords) c = rng.unit();

  std::vector<double> weights(static_cast<std::size_t>(K));
  double total = 0.0;
  for (double& w : weights) {
    w = 0.05 + rng.unit();
    total += w;
  }
  for (double& w : weights) w /= total;

  Eigen::MatrixXd W_star(d_y, d_phi);
  for (int l = 0; l < d_y; ++l)
    for (int j = 0; j < d_phi; ++j) W_star(l, j) = 2.0 * rng.unit() - 1.0;

  NoiseSpec noise;
  if (noise_scale > 0.0) {
    const int S = 1 << d_y;
    noise.values.resize(d_y, S);
    noise.probs.assign(static_cast<std::size_t>(S), 1.0 / static_cast<double>(S));
    for (int s = 0; s < S; ++s)
      for (int l = 0; l < d_y; ++l)
        noise.values(l, s) = ((s >> l) & 1) ? noise_scale : -noise_scale;
    noise.second_moment = static_cast<double>(d_y) * noise_scale * noise_scale;
  } else {
    noise.values = Eigen::MatrixXd::Zero(d_y, 1);
    noise.probs = {1.0};
    noise.second_moment = 0.0;
  }

  return LinRegInstance{std::move(W_star), MapSpec::identity(d_phi),
                        BoxMeasure::atomic(std::move(support), std::move(weights)),
                        std::move(noise)};
}

TrainingSample sample_training(const LinRegInstance& inst, std::size_t m, std::uint64_t seed,
                               LabelMode mode) {
  if (m < 1) throw ValidationError("need at least one training sample");
  if (!inst.mu_x.as_atomic()) throw ValidationError("the input measure must be atomic");
  if (inst.feature_map.d_in != inst.mu_x.dim())
    throw DimensionMismatch("feature map input dimension disagrees with the input measure");
  const int d_y = static_cast<int>(inst.W_star.rows());
  if (inst.W_star.cols() != inst.feature_map.d_out)
    throw ShapeMismatch("weight matrix width disagrees with the feature dimension");
  check_noise(inst.noise, d_y);

  TrainingSample sample;
  sample.seed = seed;
  sample.mode = mode;
  sample.X = inst.mu_x.sample(m, derive_seed(seed, {0}));
  sample.Phi = apply_map(sample.X, inst.feature_map);

  Rng rng(derive_seed(seed, {1}));
  sample.Y.resize(d_y, static_cast<Eigen::Index>(m));
  if (mode == LabelMode::structured) {
    sample.has_noise = true;
    sample.Xi.resize(d_y, static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t s = pick_category(inst.noise.probs, rng.unit());
      sample.Xi.col(static_cast<Eigen::Index>(i)) =
          inst.noise.values.col(static_cast<Eigen::Index>(s));
      sample.Y.col(static_cast<Eigen::Index>(i)) =
          inst.W_star * row_vec(sample.Phi, i) + sample.Xi.col(static_cast<Eigen::Index>(i));
    }
  } else {
    sample.has_noise = false;
    sample.Xi.resize(d_y, 0);
    for (std::size_t i = 0; i < m; ++i)
      for (int l = 0; l < d_y; ++l) sample.Y(l, static_cast<Eigen::Index>(i)) = rng.unit();
  }
  return sample;
}

Eigen::MatrixXd fit_least_squares(const TrainingSample& sample, double ridge) {
  if (!(ridge >= 0.0)) throw ValidationError("ridge must be nonnegative");
  const std::size_t m = sample.Phi.size();
  const int d_phi = sample.Phi.d;
  Eigen::MatrixXd PhiMat(d_phi, static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    PhiMat.col(static_cast<Eigen::Index>(i)) = row_vec(sample.Phi, i);

  Eigen::MatrixXd G = PhiMat * PhiMat.transpose();
  const Eigen::MatrixXd rhs = PhiMat * sample.Y.transpose();  // d_phi x d_y
  if (ridge > 0.0) G.diagonal().array() += ridge;

  if (ridge == 0.0) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible())
      throw SingularSystem("feature Gram matrix is singular; use a positive ridge");
    return lu.solve(rhs).transpose();
  }
  return G.ldlt().solve(rhs).transpose();
}

LinRegReport verify_thm2(const LinRegInstance& inst, const TrainingSample& sample,
                         const Eigen::MatrixXd& W_hat, std::uint64_t cell_budget) {
  if (!sample.has_noise)
    throw MissingNoiseRecord("the structured check needs a sample with recorded noise");
  if (W_hat.rows() != inst.W_star.rows() || W_hat.cols() != inst.W_star.cols())
    throw ShapeMismatch("trained weights must match the true weight shape");
  const auto* at = inst.mu_x.as_atomic();
  if (!at) throw ValidationError("the input measure must be atomic");

  const std::size_t m = sample.Phi.size();
  const Eigen::MatrixXd D = W_hat - inst.W_star;

  // Exact expected loss: the model term over the atoms plus half the noise
  // second moment (cross term vanishes by the exact zero mean).
  double expected_model = 0.0;
  for (std::size_t a = 0; a < at->weights.size(); ++a) {
    const std::vector<double> img = apply_map_point(inst.feature_map, at->support.point(a));
    const Eigen::Map<const Eigen::VectorXd> phi(img.data(), static_cast<Eigen::Index>(img.size()));
    expected_model += at->weights[a] * 0.5 * (D * phi).squaredNorm();
  }
  const double half_noise = 0.5 * inst.noise.second_moment;

  std::vector<double> empLoss(m), a1Terms(m), halfXiNorm(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Map<const Eigen::VectorXd> phi = row_vec(sample.Phi, i);
    const Eigen::Index col = static_cast<Eigen::Index>(i);
    empLoss[i] = 0.5 * (W_hat * phi - sample.Y.col(col)).squaredNorm();
    a1Terms[i] = sample.Xi.col(col).dot(D * phi);
    halfXiNorm[i] = 0.5 * sample.Xi.col(col).squaredNorm();
  }

  LinRegReport report;
  report.lhs_gap = (expected_model + half_noise) - mean_of(empLoss);
  report.A1 = mean_of(a1Terms);
  report.A2 = half_noise - mean_of(halfXiNorm);
  report.variation_bound = thm2_variation_bound(W_hat, inst.W_star);

  const BoxMeasure pushed = pushforward_atomic(inst.mu_x, inst.feature_map);
  const DiscrepancyResult dres = star_discrepancy_exact(sample.Phi, pushed, cell_budget);
  report.discrepancy = dres.value;
  report.discrepancy_detail = dres;
  report.rhs_bound = report.variation_bound * report.discrepancy + report.A1 + report.A2;
  report.satisfied = report.lhs_gap <= report.rhs_bound + kThmTolerance;
  return report;
}

double compute_M(const Eigen::MatrixXd& W_hat, int d_y) {
  if (d_y != W_hat.rows())
    throw ShapeMismatch("label dimension disagrees with the weight matrix");
  const int d_phi = static_cast<int>(W_hat.cols());
  if (d_phi + d_y > 24)
    throw BudgetExceeded(std::uint64_t{1} << std::min(d_phi + d_y, 63), std::uint64_t{1} << 24);

  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << d_phi); ++mask) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(d_phi);
    for (int j = 0; j < d_phi; ++j)
      if ((mask >> j) & 1) t(j) = 1.0;
    const Eigen::VectorXd v = W_hat * t;
    // Per component the y maximum is at one of its endpoints.
    for (int l = 0; l < d_y; ++l)
      best = std::max(best, std::max(std::fabs(v(l)), std::fabs(v(l) - 1.0)));
  }
  return best;
}

LinRegReport verify_thm3(const LinRegInstance& inst, const TrainingSample& sample,
                         const Eigen::MatrixXd& W_hat, const ExpectationEstimator& estimator,
                         std::uint64_t cell_budget) {
  if (sample.mode != LabelMode::unstructured)
    throw ValidationError("the unstructured check needs an unstructured sample");
  const auto* at = inst.mu_x.as_atomic();
  if (!at) throw ValidationError("the input measure must be atomic");
  const int d_y = static_cast<int>(W_hat.rows());
  const int d_phi = static_cast<int>(W_hat.cols());
  if (d_phi != inst.feature_map.d_out)
    throw ShapeMismatch("trained weights disagree with the feature dimension");
  if (d_y != sample.Y.rows()) throw ShapeMismatch("trained weights disagree with the labels");

  const std::size_t m = sample.Phi.size();
  LinRegReport report;
  report.M = compute_M(W_hat, d_y);
  report.variation_bound = thm3_variation_bound(W_hat, *report.M, d_y);

  // Joint points (phi(x_i), y_i) against the product of the pushed-forward
  // feature measure and the uniform label measure, encoded as a mixture of
  // boxes degenerate on the feature axes.
  PointSet joint;
  joint.d = d_phi + d_y;
  joint.coords.resize(m * static_cast<std::size_t>(joint.d));
  for (std::size_t i = 0; i < m; ++i) {
    double* row = joint.coords.data() + i * static_cast<std::size_t>(joint.d);
    const std::span<const double> phi = sample.Phi.point(i);
    for (int j = 0; j < d_phi; ++j) row[j] = phi[static_cast<std::size_t>(j)];
    for (int l = 0; l < d_y; ++l) row[d_phi + l] = sample.Y(l, static_cast<Eigen::Index>(i));
  }
  const BoxMeasure pushed = pushforward_atomic(inst.mu_x, inst.feature_map);
  const auto* pat = pushed.as_atomic();
  std::vector<WeightedBox> boxes(pat->weights.size());
  for (std::size_t a = 0; a < pat->weights.size(); ++a) {
    WeightedBox& box = boxes[a];
    box.weight = pat->weights[a];
    box.lo.assign(static_cast<std::size_t>(joint.d), 0.0);
    box.hi.assign(static_cast<std::size_t>(joint.d), 1.0);
    const std::span<const double> loc = pat->support.point(a);
    for (int j = 0; j < d_phi; ++j) {
      box.lo[static_cast<std::size_t>(j)] = loc[static_cast<std::size_t>(j)];
      box.hi[static_cast<std::size_t>(j)] = loc[static_cast<std::size_t>(j)];
    }
  }
  const BoxMeasure jointMeasure = BoxMeasure::box_mixture(joint.d, std::move(boxes));
  const DiscrepancyResult dres = star_discrepancy_exact(joint, jointMeasure, cell_budget);
  report.discrepancy = dres.value;
  report.discrepancy_detail = dres;

  double expected = 0.0;
  if (estimator.kind == ExpectationEstimator::Kind::exact_product) {
    // E[0.5||W phi - y||^2] with y uniform: 0.5||W phi||^2 - (W phi).(1/2)
    // + d_y/6, using E[y] = 1/2 and E||y||^2 = d_y/3.
    for (std::size_t a = 0; a < at->weights.size(); ++a) {
      const std::vector<double> img = apply_map_point(inst.feature_map, at->support.point(a));
      const Eigen::Map<const Eigen::VectorXd> phi(img.data(),
                                                  static_cast<Eigen::Index>(img.size()));
      const Eigen::VectorXd v = W_hat * phi;
      expected += at->weights[a] *
                  (0.5 * v.squaredNorm() - 0.5 * v.sum() + static_cast<double>(d_y) / 6.0);
    }
  } else {
    if (estimator.n < 1) throw ValidationError("Monte Carlo estimator needs at least one draw");
    const PointSet xs = inst.mu_x.sample(estimator.n, derive_seed(estimator.seed, {0}));
    const PointSet phis = apply_map(xs, inst.feature_map);
    Rng rng(derive_seed(estimator.seed, {1}));
    std::vector<double> vals(estimator.n);
    Eigen::VectorXd y(d_y);
    for (std::size_t i = 0; i < estimator.n; ++i) {
      for (int l = 0; l < d_y; ++l) y(l) = rng.unit();
      vals[i] = 0.5 * (W_hat * row_vec(phis, i) - y).squaredNorm();
    }
    expected = mean_of(vals);
  }

  std::vector<double> empLoss(m);
  for (std::size_t i = 0; i < m; ++i)
    empLoss[i] =
        0.5 * (W_hat * row_vec(sample.Phi, i) - sample.Y.col(static_cast<Eigen::Index>(i)))
                  .squaredNorm();

  report.lhs_gap = expected - mean_of(empLoss);
  report.rhs_bound = report.variation_bound * report.discrepancy;
  report.satisfied = report.lhs_gap <= report.rhs_bound + kThmTolerance;
  return report;
}

std::vector<Remark5Row> remark5_rates(const LinRegInstance& inst,
                                      const std::vector<std::uint64_t>& m_list, int trials,
                                      std::uint64_t seed, std::uint64_t cell_budget) {
  if (m_list.empty()) throw ValidationError("need at least one sample size");
  for (std::uint64_t m : m_list)
    if (m < 1) throw ValidationError("sample sizes must be at least 1");
  if (trials < 1) throw ValidationError("need at least one trial");

  const int d_phi = inst.feature_map.d_out;
  const double half_noise = 0.5 * inst.noise.second_moment;
  double noiseRange = 0.0;  // Hoeffding range of the per-sample 0.5||xi||^2
  for (Eigen::Index s = 0; s < inst.noise.values.cols(); ++s)
    noiseRange = std::max(noiseRange, 0.5 * inst.noise.values.col(s).squaredNorm());
  const BoxMeasure pushed = pushforward_atomic(inst.mu_x, inst.feature_map);

  std::vector<Remark5Row> rows;
  for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
    const std::uint64_t m = m_list[mi];
    std::vector<double> dvals(static_cast<std::size_t>(trials));
    std::vector<double> a2vals(static_cast<std::size_t>(trials));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t s =
          derive_seed(seed, {static_cast<std::uint64_t>(mi), static_cast<std::uint64_t>(trial)});
      const TrainingSample sample = sample_training(inst, m, s, LabelMode::structured);
      dvals[static_cast<std::size_t>(trial)] =
          star_discrepancy_exact(sample.Phi, pushed, cell_budget).value;
      std::vector<double> halfXiNorm(m);
      for (std::size_t i = 0; i < m; ++i)
        halfXiNorm[i] = 0.5 * sample.Xi.col(static_cast<Eigen::Index>(i)).squaredNorm();
      a2vals[static_cast<std::size_t>(trial)] = std::fabs(half_noise - mean_of(halfXiNorm));
    }
    std::sort(dvals.begin(), dvals.end());
    std::sort(a2vals.begin(), a2vals.end());
    Remark5Row row;
    row.m = m;
    row.median_dstar = nearest_rank(dvals, 0.5);
    row.median_abs_a2 = nearest_rank(a2vals, 0.5);
    row.dstar_reference = uniform_iid_bound(d_phi, m);
    row.a2_reference = noiseRange > 0.0 ? hoeffding_term(noiseRange, m, 0.05) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace koksma
