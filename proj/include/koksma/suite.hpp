#pragma once

// The acceptance property suite: ten numbered seeded criteria with hard
// runtime caps where the contract sets one, plus a worker-count determinism
// fingerprint used by criterion 10 and the CLI.

#include <cstdint>
#include <string>
#include <vector>

namespace koksma {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;  // measured quantities, one line
};

// Runs one criterion (1..10). Seeded and pure: the same seed reproduces the
// same measurements. Errors: ValidationError on an unknown id.
CriterionResult run_criterion(int id, std::uint64_t seed);

std::vector<CriterionResult> run_all_criteria(std::uint64_t seed);

// Canonical serialization (exact hex floats) of a batch of results that
// exercises every parallel code path. Byte-equal across worker counts by
// construction; criterion 10 checks exactly that.
std::string determinism_fingerprint(std::uint64_t seed);

}  // namespace koksma
