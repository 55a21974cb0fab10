#pragma once

// Normalized measures on [0,1]^d behind exact box-mass oracles, plus finitely
// supported signed measures and their induced step functions.
//
// Three variants cover everything the verification suites need:
//  - Product: independent axes, each a monotone piecewise-linear CDF;
//  - BoxMixture: weighted axis-aligned boxes with uniform density inside
//    (an axis may be degenerate, lo == hi, which puts an atom on that axis);
//  - Atomic: finitely many support points with positive weights.

#include <span>
#include <variant>
#include <vector>

#include "koksma/common.hpp"
#include "koksma/function_handle.hpp"
#include "koksma/point_set.hpp"

namespace koksma {

// One axis of a Product measure: piecewise-linear CDF through (x[i], F[i]),
// x[0]=0, x.back()=1, F[0]=0, F.back()=1, both nondecreasing.
struct AxisCdf {
  std::vector<double> x;
  std::vector<double> F;
};

struct ProductMeasure {
  std::vector<AxisCdf> axes;
};

struct WeightedBox {
  std::vector<double> lo;
  std::vector<double> hi;
  double weight = 0.0;
};

struct BoxMixtureMeasure {
  std::vector<WeightedBox> boxes;
};

struct AtomicMeasure {
  PointSet support;             // locations, order preserved
  std::vector<double> weights;  // positive, sum to 1 within 1e-12
};

class BoxMeasure {
 public:
  static BoxMeasure product(std::vector<AxisCdf> axes);
  static BoxMeasure uniform(int d);
  static BoxMeasure box_mixture(int d, std::vector<WeightedBox> boxes);
  static BoxMeasure atomic(PointSet support, std::vector<double> weights);

  int dim() const { return d_; }

  const ProductMeasure* as_product() const { return std::get_if<ProductMeasure>(&v_); }
  const BoxMixtureMeasure* as_box_mixture() const { return std::get_if<BoxMixtureMeasure>(&v_); }
  const AtomicMeasure* as_atomic() const { return std::get_if<AtomicMeasure>(&v_); }

  // Mass of the closed box [0,t].
  double closed_mass(std::span<const double> t) const;

  // Mass of the open box {s : s_j < t_j for every j}. Coincides with
  // closed_mass wherever the measure has no mass on the box boundary.
  double open_mass(std::span<const double> t) const;

  // n i.i.d. draws, deterministic given the seed.
  PointSet sample(std::size_t n, std::uint64_t seed) const;

 private:
  BoxMeasure(int d, std::variant<ProductMeasure, BoxMixtureMeasure, AtomicMeasure> v)
      : d_(d), v_(std::move(v)) {}
  int d_ = 0;
  std::variant<ProductMeasure, BoxMixtureMeasure, AtomicMeasure> v_;
};

// Maps the atoms of an Atomic measure through `map`, summing the weights of
// colliding images. Errors: ValidationError (non-atomic), MapRangeViolation.
BoxMeasure pushforward_atomic(const BoxMeasure& nu, const MapSpec& map);

// Finitely supported signed measure plus the constant offset of its induced
// function. The atom list may be empty (constant function).
struct SignedAtomicMeasure {
  int d = 0;
  std::vector<double> locations;  // row-major, size atoms*d
  std::vector<double> weights;    // signed, one per atom
  double offset = 0.0;

  std::size_t atoms() const {
    return d > 0 ? locations.size() / static_cast<std::size_t>(d) : 0;
  }
  std::span<const double> location(std::size_t a) const {
    return {locations.data() + a * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
};

// Building blocks shared with the discrepancy grid sweep, exported so both
// code paths produce bit-identical masses.
double axis_cdf_value(const AxisCdf& axis, double t);
double box_edge_fraction_closed(double lo, double hi, double t);
double box_edge_fraction_strict(double lo, double hi, double t);

SignedAtomicMeasure make_signed_atomic(int d,
                                       const std::vector<std::vector<double>>& locations,
                                       const std::vector<double>& weights, double offset);

double total_variation(const SignedAtomicMeasure& nu);

// f(t) = sum of weights over atoms a with t <= location(a), plus the offset.
FunctionHandle f_from_signed(const SignedAtomicMeasure& nu);

}  // namespace koksma
