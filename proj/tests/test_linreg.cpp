#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "koksma/linreg.hpp"
#include "koksma/variation.hpp"

using namespace koksma;

TEST_CASE("instances are deterministic and well formed") {
  const LinRegInstance a = make_instance(42, 2, 3, 5, 0.25);
  const LinRegInstance b = make_instance(42, 2, 3, 5, 0.25);
  CHECK((a.W_star.array() == b.W_star.array()).all());
  CHECK(a.W_star.rows() == 3);
  CHECK(a.W_star.cols() == 2);
  CHECK(a.W_star.cwiseAbs().maxCoeff() <= 1.0);

  const AtomicMeasure* at = a.mu_x.as_atomic();
  REQUIRE(at != nullptr);
  CHECK(at->support.size() == 5);
  double wsum = 0.0;
  for (double w : at->weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));

  // Symmetric noise support: 2^{d_y} sign patterns, exact second moment.
  CHECK(a.noise.values.cols() == 8);
  CHECK(a.noise.second_moment == doctest::Approx(3.0 * 0.25 * 0.25).epsilon(1e-15));
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  for (int s = 0; s < a.noise.values.cols(); ++s)
    mean += a.noise.probs[static_cast<std::size_t>(s)] * a.noise.values.col(s);
  CHECK(mean.cwiseAbs().maxCoeff() <= 1e-15);

  const LinRegInstance clean = make_instance(42, 2, 1, 3, 0.0);
  CHECK(clean.noise.second_moment == 0.0);
  CHECK(clean.noise.values.cols() == 1);

  CHECK_THROWS_AS(make_instance(1, 0, 1, 3, 0.1), ValidationError);
  CHECK_THROWS_AS(make_instance(1, 1, 1, 1, 0.1), ValidationError);
  CHECK_THROWS_AS(make_instance(1, 1, 1, 3, -0.1), ValidationError);
  CHECK_THROWS_AS(make_instance(1, 1, 21, 3, 0.1), BudgetExceeded);
}

TEST_CASE("structured sampling records reconstructible labels") {
  const LinRegInstance inst = make_instance(7, 2, 2, 4, 0.3);
  const TrainingSample s = sample_training(inst, 24, 99, LabelMode::structured);
  CHECK(s.has_noise);
  CHECK(s.mode == LabelMode::structured);
  REQUIRE(s.Y.cols() == 24);
  REQUIRE(s.Xi.cols() == 24);
  for (int i = 0; i < 24; ++i) {
    const Eigen::Map<const Eigen::VectorXd> phi(s.Phi.point(static_cast<std::size_t>(i)).data(),
                                                2);
    const Eigen::VectorXd y = inst.W_star * phi + s.Xi.col(i);
    CHECK((y - s.Y.col(i)).cwiseAbs().maxCoeff() == 0.0);
  }
  // Identical seeds reproduce the draw.
  const TrainingSample s2 = sample_training(inst, 24, 99, LabelMode::structured);
  CHECK((s.Y.array() == s2.Y.array()).all());

  CHECK_THROWS_AS(sample_training(inst, 0, 1, LabelMode::structured), ValidationError);
}

TEST_CASE("unstructured sampling draws labels off the model") {
  const LinRegInstance inst = make_instance(8, 1, 2, 3, 0.0);
  const TrainingSample s = sample_training(inst, 16, 5, LabelMode::unstructured);
  CHECK_FALSE(s.has_noise);
  CHECK(s.Xi.size() == 0);
  CHECK(s.Y.rows() == 2);
  CHECK(s.Y.minCoeff() >= 0.0);
  CHECK(s.Y.maxCoeff() < 1.0);
}

TEST_CASE("least squares recovers the generator on clean data") {
  const LinRegInstance inst = make_instance(15, 2, 2, 6, 0.0);
  const TrainingSample s = sample_training(inst, 40, 77, LabelMode::structured);
  const Eigen::MatrixXd w = fit_least_squares(s, 0.0);
  CHECK((w - inst.W_star).cwiseAbs().maxCoeff() <= 1e-8);

  // A tiny ridge keeps the answer close.
  const Eigen::MatrixXd wr = fit_least_squares(s);
  CHECK((wr - inst.W_star).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK_THROWS_AS(fit_least_squares(s, -1.0), ValidationError);
}

TEST_CASE("singular normal equations need a ridge") {
  // One sample cannot identify a two-feature model.
  const LinRegInstance inst = make_instance(16, 2, 1, 3, 0.0);
  const TrainingSample s = sample_training(inst, 1, 3, LabelMode::structured);
  CHECK_THROWS_AS(fit_least_squares(s, 0.0), SingularSystem);
  const Eigen::MatrixXd w = fit_least_squares(s, 1e-8);
  CHECK(w.allFinite());
}

TEST_CASE("structured-label bound holds for fitted, true, and zero weights") {
  Rng rng(333);
  for (int rep = 0; rep < 12; ++rep) {
    const int dPhi = 1 + static_cast<int>(rng.below(3));
    const int dY = 1 + static_cast<int>(rng.below(2));
    const int K = 2 + static_cast<int>(rng.below(8));
    const std::size_t m = 4 + rng.below(40);
    const double noise = rep % 4 == 0 ? 0.0 : 0.05 + 0.4 * rng.unit();
    const LinRegInstance inst = make_instance(rng.raw(), dPhi, dY, K, noise);
    const TrainingSample s = sample_training(inst, m, rng.raw(), LabelMode::structured);
    const Eigen::MatrixXd models[3] = {fit_least_squares(s), inst.W_star,
                                       Eigen::MatrixXd::Zero(dY, dPhi)};
    for (const Eigen::MatrixXd& w : models) {
      const LinRegReport r = verify_thm2(inst, s, w);
      CHECK(r.satisfied);
      CHECK(r.lhs_gap <= r.rhs_bound + kThmTolerance);
      CHECK(r.variation_bound >= 0.0);
      CHECK(r.discrepancy >= 0.0);
    }
  }
}

TEST_CASE("at the generator the structured bound collapses to the noise term") {
  const LinRegInstance inst = make_instance(91, 2, 2, 5, 0.35);
  const TrainingSample s = sample_training(inst, 32, 13, LabelMode::structured);
  const LinRegReport r = verify_thm2(inst, s, inst.W_star);
  CHECK(r.variation_bound == 0.0);
  CHECK(r.A1 == 0.0);
  CHECK(r.rhs_bound == r.A2);
  CHECK(std::fabs(r.rhs_bound - r.lhs_gap) <= 1e-9);

  // Without noise every term vanishes identically.
  const LinRegInstance clean = make_instance(92, 2, 1, 4, 0.0);
  const TrainingSample cs = sample_training(clean, 16, 14, LabelMode::structured);
  const LinRegReport cr = verify_thm2(clean, cs, clean.W_star);
  CHECK(cr.lhs_gap == 0.0);
  CHECK(cr.rhs_bound == 0.0);
  CHECK(cr.satisfied);
}

TEST_CASE("structured check refuses unstructured samples") {
  const LinRegInstance inst = make_instance(17, 1, 1, 3, 0.2);
  const TrainingSample s = sample_training(inst, 8, 2, LabelMode::unstructured);
  CHECK_THROWS_AS(verify_thm2(inst, s, inst.W_star), MissingNoiseRecord);
  const TrainingSample good = sample_training(inst, 8, 2, LabelMode::structured);
  CHECK_THROWS_AS(verify_thm2(inst, good, Eigen::MatrixXd::Zero(2, 1)), ShapeMismatch);
}

TEST_CASE("joint-cube sup of the residual is exact at the vertices") {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  CHECK(compute_M(zero, 1) == 1.0);  // |0 - y| peaks at y = 1
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  CHECK(compute_M(one, 1) == 1.0);  // t=1,y=0 and t=0,y=1 both give 1
  Eigen::MatrixXd two(1, 1);
  two << 2.0;
  CHECK(compute_M(two, 1) == 2.0);
  Eigen::MatrixXd neg(1, 2);
  neg << -0.5, 0.75;
  // Min prediction -0.5 against label 1 gives 1.5.
  CHECK(compute_M(neg, 1) == 1.5);
  CHECK_THROWS_AS(compute_M(one, 2), ShapeMismatch);
  CHECK_THROWS_AS(compute_M(Eigen::MatrixXd::Zero(1, 24), 1), BudgetExceeded);
}

TEST_CASE("unstructured-label bound holds with the exact expectation") {
  Rng rng(444);
  for (int rep = 0; rep < 8; ++rep) {
    const int dPhi = 1 + static_cast<int>(rng.below(2));
    const int dY = dPhi == 2 ? 1 : 1 + static_cast<int>(rng.below(2));
    const LinRegInstance inst =
        make_instance(rng.raw(), dPhi, dY, 2 + static_cast<int>(rng.below(6)), 0.3);
    const TrainingSample s =
        sample_training(inst, 4 + rng.below(24), rng.raw(), LabelMode::unstructured);
    const LinRegReport r = verify_thm3(inst, s, fit_least_squares(s));
    CHECK(r.satisfied);
    REQUIRE(r.M.has_value());
    CHECK(*r.M >= 0.0);
    CHECK(r.lhs_gap <= r.rhs_bound + kThmTolerance);
  }
}

TEST_CASE("zero model has expected loss d_y/6 under uniform labels") {
  const LinRegInstance inst = make_instance(51, 1, 1, 4, 0.0);
  const TrainingSample s = sample_training(inst, 20, 8, LabelMode::unstructured);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  const LinRegReport r = verify_thm3(inst, s, zero);
  double emp = 0.0;
  for (int i = 0; i < s.Y.cols(); ++i) emp += 0.5 * s.Y.col(i).squaredNorm();
  emp /= static_cast<double>(s.Y.cols());
  CHECK(r.lhs_gap + emp == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(r.satisfied);
}

TEST_CASE("monte carlo expectation approaches the exact one") {
  const LinRegInstance inst = make_instance(52, 1, 1, 3, 0.0);
  const TrainingSample s = sample_training(inst, 12, 9, LabelMode::unstructured);
  const Eigen::MatrixXd w = fit_least_squares(s);
  const LinRegReport exact = verify_thm3(inst, s, w);
  const LinRegReport mc =
      verify_thm3(inst, s, w, ExpectationEstimator::monte_carlo(20000, 123));
  CHECK(std::fabs(exact.lhs_gap - mc.lhs_gap) < 0.1);
  CHECK_THROWS_AS(verify_thm3(inst, s, w, ExpectationEstimator::monte_carlo(0, 1)),
                  ValidationError);
}

TEST_CASE("unstructured check refuses structured samples") {
  const LinRegInstance inst = make_instance(53, 1, 1, 3, 0.1);
  const TrainingSample s = sample_training(inst, 8, 4, LabelMode::structured);
  CHECK_THROWS_AS(verify_thm3(inst, s, Eigen::MatrixXd::Zero(1, 1)), ValidationError);
}

TEST_CASE("rate study reports medians against reference rates") {
  const LinRegInstance inst = make_instance(61, 2, 1, 5, 0.25);
  const std::vector<std::uint64_t> ms{8, 16};
  const std::vector<Remark5Row> rows = remark5_rates(inst, ms, 6, 777);
  REQUIRE(rows.size() == 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].m == ms[i]);
    CHECK(rows[i].median_dstar > 0.0);
    CHECK(rows[i].median_abs_a2 >= 0.0);
    CHECK(rows[i].dstar_reference ==
          doctest::Approx(uniform_iid_bound(2, ms[i])).epsilon(1e-15));
    CHECK(rows[i].a2_reference > 0.0);
  }
  // Bit-identical rerun.
  const std::vector<Remark5Row> again = remark5_rates(inst, ms, 6, 777);
  CHECK(rows[0].median_dstar == again[0].median_dstar);
  CHECK(rows[1].median_abs_a2 == again[1].median_abs_a2);

  CHECK_THROWS_AS(remark5_rates(inst, {}, 3, 1), ValidationError);
  CHECK_THROWS_AS(remark5_rates(inst, ms, 0, 1), ValidationError);
}
