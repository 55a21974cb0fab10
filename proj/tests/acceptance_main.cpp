// Runs the ten acceptance criteria end to end and prints one verdict line
// per criterion. Exit status is nonzero if any criterion fails, so this
// binary doubles as the ctest acceptance gate.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "koksma/common.hpp"
#include "koksma/suite.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 7;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) {
      seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (!std::strcmp(argv[i], "--help")) {
      std::printf("usage: %s [--seed N]\n", argv[0]);
      return 0;
    }
  }

  std::printf("acceptance suite, seed %llu, %d workers\n",
              static_cast<unsigned long long>(seed), koksma::worker_count());
  bool ok = true;
  for (int id = 1; id <= 10; ++id) {
    const koksma::CriterionResult r = koksma::run_criterion(id, seed);
    ok = ok && r.passed;
    std::printf("%s  %2d  %-32s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf(ok ? "all criteria passed\n" : "criteria FAILED\n");
  return ok ? 0 : 1;
}
