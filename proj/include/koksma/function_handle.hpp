#pragma once

// Black-box real-valued functions on [0,1]^k, with an optional smoothness
// hint consumed by the derivative-based variation bound.

#include <functional>
#include <span>

namespace koksma {

enum class Smoothness { none = 0, continuous = 1, mixed_partials_continuous = 2 };

struct FunctionHandle {
  int arity = 0;
  Smoothness smoothness = Smoothness::none;
  std::function<double(std::span<const double>)> eval;

  double operator()(std::span<const double> t) const { return eval(t); }
};

}  // namespace koksma
