#include "koksma/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace koksma {

namespace {

void check_dim(int d) {
  if (d <= 0) throw DimensionMismatch("measure dimension must be positive");
}

}  // namespace

// CDF value at t on one axis. Knot hits return the stored F exactly.
double axis_cdf_value(const AxisCdf& axis, double t) {
  const auto& x = axis.x;
  const auto& F = axis.F;
  if (t >= x.back()) return F.back();
  if (t <= x.front()) return F.front();
  // First knot strictly above t; the segment to its left contains t.
  const std::size_t hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
  const std::size_t lo = hi - 1;
  if (t == x[lo]) return F[lo];
  const double span = x[hi] - x[lo];
  return F[lo] + (F[hi] - F[lo]) * ((t - x[lo]) / span);
}

// Fraction of a box edge [lo,hi] covered by (-inf, t], as a factor in [0,1].
// A degenerate edge (lo == hi) carries an atom: closed keeps it at t == lo,
// strict drops it.
double box_edge_fraction_closed(double lo, double hi, double t) {
  if (lo == hi) return t >= lo ? 1.0 : 0.0;
  if (t >= hi) return 1.0;
  if (t <= lo) return 0.0;
  return (t - lo) / (hi - lo);
}

double box_edge_fraction_strict(double lo, double hi, double t) {
  if (lo == hi) return t > lo ? 1.0 : 0.0;
  if (t >= hi) return 1.0;
  if (t <= lo) return 0.0;
  return (t - lo) / (hi - lo);
}

BoxMeasure BoxMeasure::product(std::vector<AxisCdf> axes) {
  check_dim(static_cast<int>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) {
    const auto& a = axes[j];
    const std::string where = "axis " + std::to_string(j + 1);
    if (a.x.size() < 2 || a.x.size() != a.F.size())
      throw ValidationError(where + ": CDF needs matching knot and value lists of size >= 2");
    if (a.x.front() != 0.0 || a.x.back() != 1.0)
      throw ValidationError(where + ": CDF knots must start at 0 and end at 1");
    if (a.F.front() != 0.0 || a.F.back() != 1.0)
      throw ValidationError(where + ": CDF values must start at 0 and end at 1");
    for (std::size_t i = 1; i < a.x.size(); ++i) {
      if (!(a.x[i] >= a.x[i - 1]) || !(a.F[i] >= a.F[i - 1]))
        throw ValidationError(where + ": CDF must be nondecreasing");
      if (a.x[i] == a.x[i - 1] && a.F[i] != a.F[i - 1])
        throw ValidationError(where + ": CDF jump at a repeated knot is not allowed");
    }
  }
  const int d = static_cast<int>(axes.size());
  return BoxMeasure(d, ProductMeasure{std::move(axes)});
}

BoxMeasure BoxMeasure::uniform(int d) {
  check_dim(d);
  std::vector<AxisCdf> axes(static_cast<std::size_t>(d), AxisCdf{{0.0, 1.0}, {0.0, 1.0}});
  return BoxMeasure(d, ProductMeasure{std::move(axes)});
}

BoxMeasure BoxMeasure::box_mixture(int d, std::vector<WeightedBox> boxes) {
  check_dim(d);
  if (boxes.empty()) throw ValidationError("box mixture needs at least one box");
  double total = 0.0;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const auto& box = boxes[b];
    const std::string where = "box " + std::to_string(b + 1);
    if (static_cast<int>(box.lo.size()) != d || static_cast<int>(box.hi.size()) != d)
      throw DimensionMismatch(where + ": bounds must have d coordinates");
    for (int j = 0; j < d; ++j) {
      const double lo = box.lo[static_cast<std::size_t>(j)];
      const double hi = box.hi[static_cast<std::size_t>(j)];
      if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
        throw ValidationError(where + ": needs 0 <= lo <= hi <= 1 on every axis");
    }
    if (!(box.weight >= 0.0)) throw ValidationError(where + ": weight must be nonnegative");
    total += box.weight;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw ValidationError("box weights sum to " + std::to_string(total) + ", expected 1");
  return BoxMeasure(d, BoxMixtureMeasure{std::move(boxes)});
}

BoxMeasure BoxMeasure::atomic(PointSet support, std::vector<double> weights) {
  check_dim(support.d);
  if (support.size() != weights.size())
    throw ShapeMismatch("atom count disagrees with weight count");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ValidationError("atom weights must be positive");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw ValidationError("atom weights sum to " + std::to_string(total) + ", expected 1");
  const int d = support.d;
  return BoxMeasure(d, AtomicMeasure{std::move(support), std::move(weights)});
}

double BoxMeasure::closed_mass(std::span<const double> t) const {
  if (static_cast<int>(t.size()) != d_)
    throw DimensionMismatch("box corner dimension disagrees with the measure");
  if (const auto* p = as_product()) {
    double acc = 1.0;
    for (int j = 0; j < d_; ++j) acc *= axis_cdf_value(p->axes[static_cast<std::size_t>(j)], t[static_cast<std::size_t>(j)]);
    return acc;
  }
  if (const auto* bm = as_box_mixture()) {
    double total = 0.0;
    for (const auto& box : bm->boxes) {
      double acc = box.weight;
      for (int j = 0; j < d_; ++j)
        acc *= box_edge_fraction_closed(box.lo[static_cast<std::size_t>(j)], box.hi[static_cast<std::size_t>(j)],
                                    t[static_cast<std::size_t>(j)]);
      total += acc;
    }
    return total;
  }
  const auto* at = as_atomic();
  double total = 0.0;
  for (std::size_t a = 0; a < at->weights.size(); ++a) {
    const std::span<const double> loc = at->support.point(a);
    bool inside = true;
    for (int j = 0; j < d_; ++j)
      if (!(loc[static_cast<std::size_t>(j)] <= t[static_cast<std::size_t>(j)])) {
        inside = false;
        break;
      }
    if (inside) total += at->weights[a];
  }
  return total;
}

double BoxMeasure::open_mass(std::span<const double> t) const {
  if (static_cast<int>(t.size()) != d_)
    throw DimensionMismatch("box corner dimension disagrees with the measure");
  if (const auto* p = as_product()) {
    double acc = 1.0;
    for (int j = 0; j < d_; ++j) acc *= axis_cdf_value(p->axes[static_cast<std::size_t>(j)], t[static_cast<std::size_t>(j)]);
    return acc;
  }
  if (const auto* bm = as_box_mixture()) {
    double total = 0.0;
    for (const auto& box : bm->boxes) {
      double acc = box.weight;
      for (int j = 0; j < d_; ++j)
        acc *= box_edge_fraction_strict(box.lo[static_cast<std::size_t>(j)], box.hi[static_cast<std::size_t>(j)],
                                    t[static_cast<std::size_t>(j)]);
      total += acc;
    }
    return total;
  }
  const auto* at = as_atomic();
  double total = 0.0;
  for (std::size_t a = 0; a < at->weights.size(); ++a) {
    const std::span<const double> loc = at->support.point(a);
    bool inside = true;
    for (int j = 0; j < d_; ++j)
      if (!(loc[static_cast<std::size_t>(j)] < t[static_cast<std::size_t>(j)])) {
        inside = false;
        break;
      }
    if (inside) total += at->weights[a];
  }
  return total;
}

namespace {

// Inverse of a piecewise-linear CDF at u in [0,1). Flat stretches resolve to
// their left endpoint.
double cdf_invert(const AxisCdf& axis, double u) {
  const auto& x = axis.x;
  const auto& F = axis.F;
  // First value strictly above u; the segment to its left crosses level u.
  std::size_t hi = static_cast<std::size_t>(std::upper_bound(F.begin(), F.end(), u) - F.begin());
  if (hi == 0) return x.front();
  if (hi >= F.size()) return x.back();
  std::size_t lo = hi - 1;
  if (u == F[lo]) {
    // Walk back over a flat run so the level lands on its leftmost preimage.
    while (lo > 0 && F[lo - 1] == F[lo]) --lo;
    return x[lo];
  }
  // F[lo] < u < F[hi] with lo and hi adjacent: one genuine linear segment.
  const double rise = F[hi] - F[lo];
  return x[lo] + (x[hi] - x[lo]) * ((u - F[lo]) / rise);
}

std::size_t categorical(const std::vector<double>& weights, double u) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    c += weights[i];
    if (u < c) return i;
  }
  return weights.size() - 1;
}

}  // namespace

PointSet BoxMeasure::sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw ValidationError("need at least one sample");
  Rng rng(seed);
  PointSet out;
  out.d = d_;
  out.coords.resize(n * static_cast<std::size_t>(d_));
  double* row = out.coords.data();
  if (const auto* p = as_product()) {
    for (std::size_t i = 0; i < n; ++i, row += d_)
      for (int j = 0; j < d_; ++j) row[j] = cdf_invert(p->axes[static_cast<std::size_t>(j)], rng.unit());
    return out;
  }
  if (const auto* bm = as_box_mixture()) {
    std::vector<double> w(bm->boxes.size());
    for (std::size_t b = 0; b < w.size(); ++b) w[b] = bm->boxes[b].weight;
    for (std::size_t i = 0; i < n; ++i, row += d_) {
      const auto& box = bm->boxes[categorical(w, rng.unit())];
      for (int j = 0; j < d_; ++j) {
        const double lo = box.lo[static_cast<std::size_t>(j)];
        const double hi = box.hi[static_cast<std::size_t>(j)];
        row[j] = lo == hi ? lo : lo + rng.unit() * (hi - lo);
      }
    }
    return out;
  }
  const auto* at = as_atomic();
  for (std::size_t i = 0; i < n; ++i, row += d_) {
    const std::size_t a = categorical(at->weights, rng.unit());
    std::memcpy(row, at->support.point(a).data(), sizeof(double) * static_cast<std::size_t>(d_));
  }
  return out;
}

BoxMeasure pushforward_atomic(const BoxMeasure& nu, const MapSpec& map) {
  const auto* at = nu.as_atomic();
  if (!at) throw ValidationError("pushforward is implemented for atomic measures only");
  if (map.d_in != nu.dim())
    throw DimensionMismatch("map input dimension disagrees with the measure");
  // Map atoms in order; merge exactly colliding images, first occurrence wins
  // the slot so the output order is deterministic.
  std::vector<double> locs;
  std::vector<double> weights;
  const std::size_t K = at->weights.size();
  for (std::size_t a = 0; a < K; ++a) {
    std::vector<double> img = apply_map_point(map, at->support.point(a));
    for (double c : img)
      if (!(c >= 0.0 && c <= 1.0))
        throw MapRangeViolation("atom image coordinate " + std::to_string(c) +
                                " lies outside [0,1]");
    std::size_t slot = weights.size();
    const std::size_t dout = static_cast<std::size_t>(map.d_out);
    for (std::size_t b = 0; b < weights.size(); ++b) {
      if (std::memcmp(locs.data() + b * dout, img.data(), sizeof(double) * dout) == 0) {
        slot = b;
        break;
      }
    }
    if (slot == weights.size()) {
      locs.insert(locs.end(), img.begin(), img.end());
      weights.push_back(at->weights[a]);
    } else {
      weights[slot] += at->weights[a];
    }
  }
  PointSet support;
  support.d = map.d_out;
  support.coords = std::move(locs);
  // Weight drift from merging is additive only; renormalization is not needed
  // (the sum is unchanged up to rounding), so reuse the validating factory.
  return BoxMeasure::atomic(std::move(support), std::move(weights));
}

SignedAtomicMeasure make_signed_atomic(int d,
                                       const std::vector<std::vector<double>>& locations,
                                       const std::vector<double>& weights, double offset) {
  if (d <= 0) throw DimensionMismatch("signed measure dimension must be positive");
  if (locations.size() != weights.size())
    throw ShapeMismatch("atom count disagrees with weight count");
  SignedAtomicMeasure nu;
  nu.d = d;
  nu.offset = offset;
  nu.weights = weights;
  nu.locations.reserve(locations.size() * static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < locations.size(); ++a) {
    if (static_cast<int>(locations[a].size()) != d)
      throw DimensionMismatch("atom " + std::to_string(a) + " has the wrong dimension");
    for (double c : locations[a]) {
      if (!(c >= 0.0 && c <= 1.0)) throw OutOfUnitCube(a, c);
      nu.locations.push_back(c);
    }
  }
  return nu;
}

double total_variation(const SignedAtomicMeasure& nu) {
  double s = 0.0;
  for (double w : nu.weights) s += std::fabs(w);
  return s;
}

FunctionHandle f_from_signed(const SignedAtomicMeasure& nu) {
  FunctionHandle f;
  f.arity = nu.d;
  f.smoothness = Smoothness::none;
  f.eval = [nu](std::span<const double> t) {
    double acc = 0.0;
    const std::size_t K = nu.atoms();
    for (std::size_t a = 0; a < K; ++a) {
      const std::span<const double> loc = nu.location(a);
      bool le = true;
      for (int j = 0; j < nu.d; ++j)
        if (!(t[static_cast<std::size_t>(j)] <= loc[static_cast<std::size_t>(j)])) {
          le = false;
          break;
        }
      if (le) acc += nu.weights[a];
    }
    return acc + nu.offset;
  };
  return f;
}

}  // namespace koksma
