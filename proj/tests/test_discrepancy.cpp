#include <cmath>
#include <vector>

#include "doctest.h"
#include "koksma/discrepancy.hpp"
#include "oracles.hpp"

using namespace koksma;

namespace {

// Recomputes the reported value from the witness box using the brute-force
// counters, on the side the kernel claims.
double replay_witness(const PointSet& ps, const BoxMeasure& nu, const DiscrepancyResult& r) {
  if (r.side == DiscrepancyResult::Side::over)
    return testutil::closed_fraction(ps, r.witness) - nu.closed_mass(r.witness);
  return nu.open_mass(r.witness) - testutil::strict_fraction(ps, r.witness);
}

}  // namespace

TEST_CASE("hand-checked corner cases") {
  const BoxMeasure u1 = BoxMeasure::uniform(1);

  // A single point at the origin: the box {0} already holds everything.
  const DiscrepancyResult origin = star_discrepancy_exact(validate({{0.0}}, 1), u1);
  CHECK(origin.value == 1.0);
  CHECK(origin.side == DiscrepancyResult::Side::over);
  CHECK(origin.witness[0] == 0.0);

  // A single point at 1: every proper sub-box is empty but carries mass.
  const DiscrepancyResult far = star_discrepancy_exact(validate({{1.0}}, 1), u1);
  CHECK(far.value == 1.0);
  CHECK(far.side == DiscrepancyResult::Side::under);
  CHECK(far.witness[0] == 1.0);

  // Two points at the midpoint of [0,1]^2 against the uniform measure.
  const PointSet mid = validate({{0.5, 0.5}, {0.5, 0.5}}, 2);
  const DiscrepancyResult r = star_discrepancy_exact(mid, BoxMeasure::uniform(2));
  CHECK(r.value == 0.75);  // box [0, (0.5, 0.5)]: count 1, volume 1/4
  CHECK(r.witness[0] == 0.5);
  CHECK(r.witness[1] == 0.5);
  CHECK(r.exact);
}

TEST_CASE("equispaced centers achieve 1/(2m) against the uniform measure") {
  for (std::size_t m : {4, 10, 33}) {
    const DiscrepancyResult r =
        star_discrepancy_exact(equispaced_centers(m), BoxMeasure::uniform(1));
    CHECK(r.value == doctest::Approx(1.0 / (2.0 * static_cast<double>(m))).epsilon(1e-14));
  }
}

TEST_CASE("exact value dominates every sampled local discrepancy") {
  Rng rng(101);
  for (int rep = 0; rep < 24; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const std::size_t m = 1 + rng.below(24);
    const BoxMeasure nu = testutil::random_measure(rng, d, rep % 3);
    const PointSet ps = testutil::random_points(rng, m, d);
    const DiscrepancyResult r = star_discrepancy_exact(ps, nu);
    CHECK(r.value >= 0.0);
    std::vector<double> t(static_cast<std::size_t>(d));
    for (int probe = 0; probe < 1500; ++probe) {
      for (double& c : t) c = rng.unit();
      CHECK(r.value >= std::fabs(local_discrepancy(ps, nu, t)) - 1e-12);
      CHECK(r.value >= std::fabs(local_discrepancy_open(ps, nu, t)) - 1e-12);
    }
    // The witness must reproduce the reported value.
    CHECK(std::fabs(replay_witness(ps, nu, r) - r.value) <= 1e-12);
  }
}

TEST_CASE("serial reference agrees with the parallel kernel") {
  Rng rng(202);
  for (int rep = 0; rep < 36; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const std::size_t m = 1 + rng.below(20);
    const int variant = rep % 3;
    const BoxMeasure nu = testutil::random_measure(rng, d, variant);
    const PointSet ps = testutil::random_points(rng, m, d);
    const DiscrepancyResult par = star_discrepancy_exact(ps, nu);
    const DiscrepancyResult ser = star_discrepancy_exact_serial(ps, nu);
    CHECK(par.cells_evaluated == ser.cells_evaluated);
    if (variant == 2) {
      // Atomic masses accumulate in a different order in the two kernels, so
      // agreement is only up to a couple of ulps.
      CHECK(std::fabs(par.value - ser.value) <= 2e-15);
    } else {
      CHECK(par.value == ser.value);
      CHECK(par.side == ser.side);
      REQUIRE(par.witness.size() == ser.witness.size());
      for (std::size_t j = 0; j < par.witness.size(); ++j)
        CHECK(par.witness[j] == ser.witness[j]);
    }
  }
}

TEST_CASE("results are independent of the worker count") {
  const int saved = worker_count();
  Rng rng(303);
  for (int rep = 0; rep < 9; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const BoxMeasure nu = testutil::random_measure(rng, d, rep % 3);
    const PointSet ps = testutil::random_points(rng, 1 + rng.below(24), d);
    set_worker_count(1);
    const DiscrepancyResult one = star_discrepancy_exact(ps, nu);
    set_worker_count(4);
    const DiscrepancyResult four = star_discrepancy_exact(ps, nu);
    CHECK(one.value == four.value);
    CHECK(one.side == four.side);
    for (std::size_t j = 0; j < one.witness.size(); ++j)
      CHECK(one.witness[j] == four.witness[j]);
  }
  set_worker_count(saved);
}

TEST_CASE("sorted formula matches the sweep in one dimension") {
  Rng rng(404);
  for (int rep = 0; rep < 30; ++rep) {
    const int variant = rep % 3;
    const BoxMeasure nu = testutil::random_measure(rng, 1, variant);
    const PointSet ps = testutil::random_points(rng, 1 + rng.below(40), 1);
    const DiscrepancyResult sweep = star_discrepancy_exact(ps, nu);
    const DiscrepancyResult fast = star_discrepancy_1d(ps, nu);
    if (variant == 0) {
      CHECK(fast.value == sweep.value);
    } else {
      CHECK(std::fabs(fast.value - sweep.value) <= 1e-14);
    }
    CHECK(std::fabs(replay_witness(ps, nu, fast) - fast.value) <= 1e-12);
  }
  CHECK_THROWS_AS(star_discrepancy_1d(testutil::random_points(rng, 4, 2),
                                      BoxMeasure::uniform(2)),
                  DimensionMismatch);
}

TEST_CASE("cell budget is enforced with an exact requirement") {
  Rng rng(505);
  const PointSet ps = testutil::random_points(rng, 10, 2);
  const BoxMeasure nu = BoxMeasure::uniform(2);
  try {
    star_discrepancy_exact(ps, nu, 100);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.required_cells == 121);  // (10 data coords + the corner 1)^2
    CHECK(e.budget == 100);
  }
  CHECK_THROWS_AS(star_discrepancy_exact_serial(ps, nu, 100), BudgetExceeded);
  CHECK(star_discrepancy_exact(ps, nu, 121).cells_evaluated == 121);
}

TEST_CASE("lower bound is certified and monotone in iterations") {
  Rng rng(606);
  for (int rep = 0; rep < 12; ++rep) {
    const int d = 1 + static_cast<int>(rng.below(3));
    const BoxMeasure nu = testutil::random_measure(rng, d, rep % 3);
    const PointSet ps = testutil::random_points(rng, 1 + rng.below(16), d);
    const DiscrepancyResult exact = star_discrepancy_exact(ps, nu);
    const std::uint64_t seed = rng.raw();
    const DiscrepancyResult lb5 = star_discrepancy_lower_bound(ps, nu, 5, seed);
    const DiscrepancyResult lb20 = star_discrepancy_lower_bound(ps, nu, 20, seed);
    CHECK_FALSE(lb5.exact);
    CHECK(lb5.value >= 0.0);
    CHECK(lb20.value >= lb5.value);
    CHECK(lb20.value <= exact.value + 1e-12);
    CHECK(std::fabs(replay_witness(ps, nu, lb20) - lb20.value) <= 1e-12);
  }
}

TEST_CASE("local discrepancy signs are coherent at the corners") {
  Rng rng(707);
  const PointSet ps = testutil::random_points(rng, 12, 2);
  const BoxMeasure nu = BoxMeasure::uniform(2);
  const std::vector<double> ones{1.0, 1.0};
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(local_discrepancy(ps, nu, ones) == 0.0);        // all points, full mass
  CHECK(local_discrepancy_open(ps, nu, zeros) == 0.0);  // no points, no mass
  const std::vector<double> bad{0.5};
  CHECK_THROWS_AS(local_discrepancy(ps, nu, bad), DimensionMismatch);
}

TEST_CASE("closed-form reference bounds") {
  CHECK(prop2_bound({1.0, 2.5, 4, 100}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(uniform_iid_bound(4, 100) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(prop3_bound(1, 1024) == doctest::Approx(63.0 * 144.0 / 1024.0).epsilon(1e-12));

  const TailProbability one = prop2_delta({1.0, 1.0, 1, 100});
  CHECK_FALSE(one.vacuous);
  CHECK(one.delta == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  const TailProbability two = prop2_delta({1.0, 2.0, 1, 100});
  CHECK(two.delta == doctest::Approx(2.0 * std::exp(-8.0)).epsilon(1e-12));
  // With c2 >= c1 the base c1*c2^2*e^{-2 c2^2} tops out near 0.145, so the
  // tail shrinks geometrically in d.
  const TailProbability deep = prop2_delta({1.0, 1.0, 6, 100});
  CHECK(deep.delta < one.delta);
  CHECK_FALSE(deep.vacuous);
  CHECK_THROWS_AS(prop2_bound({0.0, 1.0, 1, 1}), ValidationError);
  CHECK_THROWS_AS(prop2_bound({2.0, 1.0, 1, 1}), ValidationError);
  CHECK_THROWS_AS(prop3_bound(0, 4), ValidationError);
  CHECK_THROWS_AS(uniform_iid_bound(1, 0), ValidationError);
}

TEST_CASE("scaling study reports nearest-rank quantiles and a consistent c2") {
  const ScalingStudy study =
      scaling_study(BoxMeasure::uniform(1), {16, 32}, 9, 4242, kDefaultCellBudget);
  REQUIRE(study.rows.size() == 2);
  CHECK(study.d == 1);
  double maxScaledP90 = 0.0;
  for (const ScalingRow& row : study.rows) {
    CHECK(row.median > 0.0);
    CHECK(row.p90 >= row.median);
    const double scale = std::sqrt(static_cast<double>(row.m) / 1.0);
    CHECK(row.scaled_median == doctest::Approx(row.median * scale).epsilon(1e-15));
    CHECK(row.scaled_p90 == doctest::Approx(row.p90 * scale).epsilon(1e-15));
    maxScaledP90 = std::max(maxScaledP90, row.scaled_p90);
  }
  CHECK(study.smallest_consistent_c2 == doctest::Approx(maxScaledP90).epsilon(1e-15));
  CHECK_THROWS_AS(scaling_study(BoxMeasure::uniform(1), {}, 3, 1, kDefaultCellBudget),
                  ValidationError);
  CHECK_THROWS_AS(scaling_study(BoxMeasure::uniform(1), {8}, 0, 1, kDefaultCellBudget),
                  ValidationError);
}

TEST_CASE("validation failures carry the right types") {
  CHECK_THROWS_AS(star_discrepancy_exact(PointSet{}, BoxMeasure::uniform(1)),
                  ValidationError);
  Rng rng(808);
  CHECK_THROWS_AS(
      star_discrepancy_exact(testutil::random_points(rng, 4, 2), BoxMeasure::uniform(3)),
      DimensionMismatch);
}
