#pragma once

// Shared plumbing: error taxonomy, deterministic RNG, bit-stable summation,
// content hashing. Everything here is header-only and allocation-light.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace koksma {

// ---------------------------------------------------------------------------
// Errors. ValidationError covers malformed inputs and contract violations
// (CLI exit code 2); BudgetExceeded covers refused work sizes (exit code 3).
// ---------------------------------------------------------------------------

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OutOfUnitCube : public ValidationError {
 public:
  OutOfUnitCube(std::size_t point_index, double coordinate)
      : ValidationError("coordinate " + std::to_string(coordinate) +
                        " of point " + std::to_string(point_index) +
                        " lies outside [0,1]"),
        index(point_index),
        coordinate(coordinate) {}
  std::size_t index;
  double coordinate;
};

class MapRangeViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidBase : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ShapeMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidDelta : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidClassPriors : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SingularSystem : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingNoiseRecord : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptySubset : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Parse failures carry a 1-based line number so the CLI can point at the spot.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line_number)
      : ValidationError("line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  explicit ParseError(const std::string& what) : ValidationError(what), line(0) {}
  std::size_t line;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t required, std::uint64_t budget)
      : std::runtime_error("work size " + std::to_string(required) +
                           " exceeds budget " + std::to_string(budget)),
        required_cells(required),
        budget(budget) {}
  std::uint64_t required_cells;
  std::uint64_t budget;
};

// ---------------------------------------------------------------------------
// RNG. mt19937_64 is bit-exact across platforms; the uniform double is built
// by hand because std::uniform_real_distribution is not.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Uniform in [0,1): top 53 bits scaled by 2^-53.
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0,n), rejection-sampled to stay unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a path of indices,
// so nested loops (instance, trial, ...) get decorrelated deterministic RNGs.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v + 0x9e3779b97f4a7c15ULL));
  return h;
}

// ---------------------------------------------------------------------------
// Bit-stable sums. Chunked accumulation with a fixed pairwise tree: chunk
// boundaries and the combine order depend only on element count, never on
// thread scheduling, so parallel and serial callers get identical bits.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kSumChunk = 4096;

inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

// ---------------------------------------------------------------------------
// FNV-1a content hash, used for input digests in CLI reports.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex_u64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

// Worker-count control; no-ops when OpenMP is absent.
void set_worker_count(int n);
int worker_count();

}  // namespace koksma
