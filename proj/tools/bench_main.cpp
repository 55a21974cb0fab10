// Benchmarks the OpenMP kernels against their serial reference
// implementations and reports agreement alongside the timings.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "koksma/common.hpp"
#include "koksma/discrepancy.hpp"
#include "koksma/measure.hpp"
#include "koksma/point_set.hpp"
#include "koksma/variation.hpp"

namespace {

using namespace koksma;

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

PointSet random_points(Rng& rng, std::size_t m, int d) {
  PointSet ps;
  ps.d = d;
  ps.coords.resize(m * static_cast<std::size_t>(d));
  for (double& c : ps.coords) c = rng.unit();
  return ps;
}

}  // namespace

int main(int argc, char** argv) {
  std::uint64_t seed = 1;
  int repeats = 3;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (arg == "--repeats" && i + 1 < argc) {
      repeats = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--seed N] [--repeats R]\n", argv[0]);
      return 2;
    }
  }

  std::printf("workers: %d\n\n", worker_count());

  std::printf("star discrepancy, random points vs uniform measure\n");
  std::printf("%6s %3s %12s %12s %12s %9s  %s\n", "m", "d", "cells", "serial ms",
              "parallel ms", "speedup", "agreement");
  const std::pair<std::size_t, int> sizes[] = {{256, 2}, {512, 2}, {1024, 2},
                                               {64, 3},  {128, 3}, {192, 3}};
  for (const auto& [m, d] : sizes) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(d)}));
    const PointSet ps = random_points(rng, m, d);
    const BoxMeasure nu = BoxMeasure::uniform(d);

    double serialBest = 1e300, parallelBest = 1e300;
    DiscrepancyResult rs, rp;
    for (int r = 0; r < repeats; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      rs = star_discrepancy_exact_serial(ps, nu);
      serialBest = std::min(serialBest, ms_since(t0));
      t0 = std::chrono::steady_clock::now();
      rp = star_discrepancy_exact(ps, nu);
      parallelBest = std::min(parallelBest, ms_since(t0));
    }
    const char* agreement = rs.value == rp.value ? "bitwise" : "DIFFER";
    std::printf("%6zu %3d %12llu %12.2f %12.2f %8.2fx  %s\n", m, d,
                static_cast<unsigned long long>(rp.cells_evaluated), serialBest, parallelBest,
                serialBest / parallelBest, agreement);
  }

  // Functions whose top-order alternating sums do not vanish, so the
  // relative agreement column compares real values rather than rounding
  // noise.  (A quadratic in d >= 3 variables has identically zero d-th
  // mixed differences and is useless as a comparison target here.)
  std::printf("\ndyadic variation, serial cell walk vs parallel plane sweep\n");
  std::printf("%-24s %5s %12s %12s %12s %9s  %s\n", "function", "level", "cells", "serial ms",
              "parallel ms", "speedup", "agreement");
  Eigen::MatrixXd What(1, 2), Wstar(1, 2);
  What << 0.7, -0.4;
  Wstar << 0.2, 0.1;
  struct VariationCase {
    const char* name;
    FunctionHandle f;
    int level;
  };
  const VariationCase cases[] = {
      {"0.5*||(W - W*)t||^2 d=2", quadratic_loss(What, Wstar), 8},
      {"0.5*||(W - W*)t||^2 d=2", quadratic_loss(What, Wstar), 10},
      {"0.5*||(W - W*)t||^2 d=2", quadratic_loss(What, Wstar), 11},
      {"t1*t2*t3", builtin_product(3), 5},
      {"t1*t2*t3", builtin_product(3), 6},
  };
  for (const auto& vc : cases) {
    double serialBest = 1e300, parallelBest = 1e300;
    double vs = 0.0, vp = 0.0;
    for (int r = 0; r < repeats; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      vs = vitali_variation_serial(vc.f, vc.level);
      serialBest = std::min(serialBest, ms_since(t0));
      t0 = std::chrono::steady_clock::now();
      vp = vitali_variation(vc.f, vc.level);
      parallelBest = std::min(parallelBest, ms_since(t0));
    }
    const std::uint64_t cells = std::uint64_t{1} << (vc.f.arity * vc.level);
    const double rel = vs == vp ? 0.0 : std::fabs(vs - vp) / std::fabs(vs);
    std::printf("%-24s %5d %12llu %12.2f %12.2f %8.2fx  %s (rel %.2g)\n", vc.name, vc.level,
                static_cast<unsigned long long>(cells), serialBest, parallelBest,
                serialBest / parallelBest, rel <= 1e-13 ? "match" : "DIFFER", rel);
  }
  return 0;
}
