#include "koksma/variation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace koksma {

FunctionHandle restrict_to(const FunctionHandle& f, const std::vector<int>& subset) {
  if (subset.empty()) throw EmptySubset("coordinate subset is empty");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 1 || subset[i] > f.arity)
      throw ValidationError("subset index " + std::to_string(subset[i]) +
                            " is outside 1.." + std::to_string(f.arity));
    if (i > 0 && subset[i] <= subset[i - 1])
      throw ValidationError("subset indices must be strictly increasing");
  }
  FunctionHandle g;
  g.arity = static_cast<int>(subset.size());
  g.smoothness = f.smoothness;
  g.eval = [f, subset](std::span<const double> t) {
    std::vector<double> full(static_cast<std::size_t>(f.arity), 1.0);
    for (std::size_t i = 0; i < subset.size(); ++i)
      full[static_cast<std::size_t>(subset[i] - 1)] = t[i];
    return f.eval(full);
  };
  return g;
}

namespace {

struct CellDeltaStats {
  double abs_sum = 0.0;
  double abs_max = 0.0;
};

// Walks the corner grid of the uniform partition with n cells per axis,
// slice by slice along the first coordinate. Each slice difference plane is
// reduced to per-cell alternating corner sums by successive differencing
// along the remaining axes; |delta| values are then summed with a fixed
// pairwise tree, so the result does not depend on the worker count (only the
// plane fill runs in parallel).
CellDeltaStats sweep_cell_deltas(const FunctionHandle& f, int n) {
  if (f.arity < 1) throw ValidationError("function arity must be at least 1");
  if (n < 1) throw ValidationError("partition needs at least one cell per axis");
  const int k = f.arity;

  unsigned __int128 cells = 1;
  for (int j = 0; j < k; ++j) {
    cells *= static_cast<unsigned>(n);
    if (cells > kMaxPartitionCells)
      throw BudgetExceeded(cells > std::numeric_limits<std::uint64_t>::max()
                               ? std::numeric_limits<std::uint64_t>::max()
                               : static_cast<std::uint64_t>(cells),
                           kMaxPartitionCells);
  }
  unsigned __int128 plane = 1;
  for (int j = 0; j < k - 1; ++j) {
    plane *= static_cast<unsigned>(n + 1);
    if (plane > kMaxPartitionCells)
      throw BudgetExceeded(plane > std::numeric_limits<std::uint64_t>::max()
                               ? std::numeric_limits<std::uint64_t>::max()
                               : static_cast<std::uint64_t>(plane),
                           kMaxPartitionCells);
  }
  const std::size_t P = static_cast<std::size_t>(plane);
  const double dn = static_cast<double>(n);

  // Plane axis a holds original coordinate a+1; the last plane axis is
  // contiguous.
  std::vector<std::size_t> stride(static_cast<std::size_t>(k > 1 ? k - 1 : 0));
  if (k > 1) {
    stride[static_cast<std::size_t>(k - 2)] = 1;
    for (int a = k - 3; a >= 0; --a)
      stride[static_cast<std::size_t>(a)] =
          stride[static_cast<std::size_t>(a + 1)] * static_cast<std::size_t>(n + 1);
  }

  std::vector<double> prev(P), cur(P), diff(P);
  std::size_t cellsPerSlice = 1;
  for (int j = 0; j < k - 1; ++j) cellsPerSlice *= static_cast<std::size_t>(n);
  std::vector<double> cellAbs(cellsPerSlice);
  std::vector<double> sliceSums(static_cast<std::size_t>(n));
  double absMax = 0.0;

  for (int s = 0; s <= n; ++s) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long idx = 0; idx < static_cast<long long>(P); ++idx) {
      double t[32];
      t[0] = static_cast<double>(s) / dn;
      std::size_t rem = static_cast<std::size_t>(idx);
      for (int a = 0; a < k - 1; ++a) {
        const std::size_t c = rem / stride[static_cast<std::size_t>(a)];
        rem %= stride[static_cast<std::size_t>(a)];
        t[a + 1] = static_cast<double>(c) / dn;
      }
      cur[static_cast<std::size_t>(idx)] = f.eval(std::span<const double>(t, static_cast<std::size_t>(k)));
    }

    if (s >= 1) {
      for (std::size_t i = 0; i < P; ++i) diff[i] = cur[i] - prev[i];
      for (int a = 0; a < k - 1; ++a) {
        const std::size_t st = stride[static_cast<std::size_t>(a)];
        for (std::size_t i = 0; i < P; ++i)
          if ((i / st) % static_cast<std::size_t>(n + 1) < static_cast<std::size_t>(n))
            diff[i] = diff[i + st] - diff[i];
      }
      // Collect per-cell |delta| in row-major cell order.
      std::vector<std::size_t> c(static_cast<std::size_t>(k > 1 ? k - 1 : 0), 0);
      std::size_t out = 0;
      bool more = true;
      while (more) {
        std::size_t idx = 0;
        for (std::size_t a = 0; a < c.size(); ++a) idx += c[a] * stride[a];
        const double v = std::fabs(diff[idx]);
        cellAbs[out++] = v;
        if (v > absMax) absMax = v;
        more = false;
        for (std::size_t a = c.size(); a-- > 0;) {
          if (++c[a] < static_cast<std::size_t>(n)) {
            more = true;
            break;
          }
          c[a] = 0;
        }
      }
      sliceSums[static_cast<std::size_t>(s - 1)] = pairwise_sum(cellAbs);
    }
    std::swap(prev, cur);
  }

  CellDeltaStats stats;
  stats.abs_sum = pairwise_sum(sliceSums);
  stats.abs_max = absMax;
  return stats;
}

int checked_dyadic_cells(int level) {
  if (level < 0) throw ValidationError("refinement level must be nonnegative");
  if (level > 26)
    throw BudgetExceeded(std::numeric_limits<std::uint64_t>::max(), kMaxPartitionCells);
  return 1 << level;
}

}  // namespace

double vitali_variation(const FunctionHandle& f, int level) {
  return sweep_cell_deltas(f, checked_dyadic_cells(level)).abs_sum;
}

double vitali_variation_serial(const FunctionHandle& f, int level) {
  const int n = checked_dyadic_cells(level);
  if (f.arity < 1) throw ValidationError("function arity must be at least 1");
  const int k = f.arity;
  if (k > 26)
    throw BudgetExceeded(std::numeric_limits<std::uint64_t>::max(), kMaxPartitionCells);
  unsigned __int128 cellsWide = 1;
  for (int j = 0; j < k; ++j) {
    cellsWide *= static_cast<unsigned>(n);
    if (cellsWide > kMaxPartitionCells)
      throw BudgetExceeded(cellsWide > std::numeric_limits<std::uint64_t>::max()
                               ? std::numeric_limits<std::uint64_t>::max()
                               : static_cast<std::uint64_t>(cellsWide),
                           kMaxPartitionCells);
  }
  const double dn = static_cast<double>(n);

  std::vector<int> cell(static_cast<std::size_t>(k), 0);
  std::vector<double> t(static_cast<std::size_t>(k));
  double total = 0.0;
  bool more = true;
  while (more) {
    double delta = 0.0;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      for (int j = 0; j < k; ++j)
        t[static_cast<std::size_t>(j)] =
            static_cast<double>(cell[static_cast<std::size_t>(j)] + ((mask >> j) & 1u)) / dn;
      const int missing = k - __builtin_popcount(mask);
      const double v = f.eval(t);
      delta += (missing % 2 == 0) ? v : -v;
    }
    total += std::fabs(delta);
    more = false;
    for (std::size_t j = static_cast<std::size_t>(k); j-- > 0;) {
      if (++cell[j] < n) {
        more = true;
        break;
      }
      cell[j] = 0;
    }
  }
  return total;
}

VariationReport hardy_krause_variation(const FunctionHandle& f, int level) {
  if (f.arity < 1) throw ValidationError("function arity must be at least 1");
  if (f.arity > 8)
    throw BudgetExceeded((std::uint64_t{1} << f.arity) - 1, (std::uint64_t{1} << 8) - 1);
  const int d = f.arity;

  std::vector<std::vector<int>> subsets;
  for (int size = 1; size <= d; ++size) {
    std::vector<int> J(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) J[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
      subsets.push_back(J);
      int i = size - 1;
      while (i >= 0 && J[static_cast<std::size_t>(i)] == d - (size - 1 - i)) --i;
      if (i < 0) break;
      ++J[static_cast<std::size_t>(i)];
      for (int l = i + 1; l < size; ++l)
        J[static_cast<std::size_t>(l)] = J[static_cast<std::size_t>(l - 1)] + 1;
    }
  }

  VariationReport report;
  report.level = level;
  double coarse = 0.0;
  for (const auto& J : subsets) {
    const FunctionHandle g = restrict_to(f, J);
    SubsetVariation entry;
    entry.subset = J;
    entry.value = vitali_variation(g, level);
    report.total += entry.value;
    if (level > 0) coarse += vitali_variation(g, level - 1);
    report.per_subset.push_back(std::move(entry));
  }
  if (level > 0)
    report.converged =
        std::fabs(report.total - coarse) < 1e-3 * std::max(std::fabs(report.total), 1e-12);
  return report;
}

DerivativeBound derivative_variation_bound(const FunctionHandle& f, int grid_n) {
  if (f.smoothness == Smoothness::none)
    throw ValidationError("derivative bound needs a smoothness hint of continuous or better");
  if (grid_n < 4) throw ValidationError("grid must have at least 4 cells per axis");
  const CellDeltaStats stats = sweep_cell_deltas(f, grid_n);
  double scale = 1.0;
  for (int j = 0; j < f.arity; ++j) scale *= static_cast<double>(grid_n);
  DerivativeBound out;
  out.sup_bound = stats.abs_max * scale;
  // Midpoint quadrature of |estimate|: the cell volumes cancel the 1/h^k in
  // the difference quotient, leaving the plain sum of |delta|.
  out.integral_estimate = stats.abs_sum;
  return out;
}

double thm2_variation_bound(const Eigen::MatrixXd& W_hat, const Eigen::MatrixXd& W_star) {
  if (W_hat.rows() != W_star.rows() || W_hat.cols() != W_star.cols())
    throw ShapeMismatch("weight matrices must have identical shapes");
  const Eigen::MatrixXd D = W_hat - W_star;
  const Eigen::MatrixXd G = D.transpose() * D;  // column Gram, d_phi x d_phi
  double full = 0.0, upper = 0.0;
  for (Eigen::Index l = 0; l < G.rows(); ++l)
    for (Eigen::Index lp = 0; lp < G.cols(); ++lp) {
      full += std::fabs(G(l, lp));
      if (lp > l) upper += std::fabs(G(l, lp));
    }
  return full + upper;
}

double thm3_variation_bound(const Eigen::MatrixXd& W_hat, double M, int d_y) {
  if (d_y != W_hat.rows())
    throw ShapeMismatch("label dimension disagrees with the weight matrix");
  if (!(M >= 0.0)) throw ValidationError("M must be nonnegative");
  double colSums = 0.0;
  for (Eigen::Index l = 0; l < W_hat.cols(); ++l) colSums += W_hat.col(l).cwiseAbs().sum();
  double cross = 0.0;
  for (Eigen::Index l = 0; l < W_hat.cols(); ++l)
    for (Eigen::Index lp = l + 1; lp < W_hat.cols(); ++lp)
      cross += std::fabs(W_hat.col(l).dot(W_hat.col(lp)));
  return (M + 1.0) * colSums + cross + static_cast<double>(d_y) * M;
}

FunctionHandle builtin_constant(int d, double value) {
  if (d < 1) throw ValidationError("arity must be at least 1");
  FunctionHandle f;
  f.arity = d;
  f.smoothness = Smoothness::mixed_partials_continuous;
  f.eval = [value](std::span<const double>) { return value; };
  return f;
}

FunctionHandle builtin_linear(std::vector<double> coeffs) {
  if (coeffs.empty()) throw ValidationError("need at least one coefficient");
  FunctionHandle f;
  f.arity = static_cast<int>(coeffs.size());
  f.smoothness = Smoothness::mixed_partials_continuous;
  f.eval = [coeffs](std::span<const double> t) {
    double acc = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) acc += coeffs[j] * t[j];
    return acc;
  };
  return f;
}

FunctionHandle builtin_product(int d) {
  if (d < 1) throw ValidationError("arity must be at least 1");
  FunctionHandle f;
  f.arity = d;
  f.smoothness = Smoothness::mixed_partials_continuous;
  f.eval = [](std::span<const double> t) {
    double acc = 1.0;
    for (double v : t) acc *= v;
    return acc;
  };
  return f;
}

FunctionHandle quadratic_loss(const Eigen::MatrixXd& W_hat, const Eigen::MatrixXd& W_star) {
  if (W_hat.rows() != W_star.rows() || W_hat.cols() != W_star.cols())
    throw ShapeMismatch("weight matrices must have identical shapes");
  const Eigen::MatrixXd D = W_hat - W_star;
  FunctionHandle f;
  f.arity = static_cast<int>(D.cols());
  f.smoothness = Smoothness::mixed_partials_continuous;
  f.eval = [D](std::span<const double> t) {
    const Eigen::Map<const Eigen::VectorXd> v(t.data(), static_cast<Eigen::Index>(t.size()));
    return 0.5 * (D * v).squaredNorm();
  };
  return f;
}

FunctionHandle quadratic_loss_labels(const Eigen::MatrixXd& W_hat) {
  const Eigen::Index dPhi = W_hat.cols();
  const Eigen::Index dY = W_hat.rows();
  FunctionHandle f;
  f.arity = static_cast<int>(dPhi + dY);
  f.smoothness = Smoothness::mixed_partials_continuous;
  f.eval = [W_hat, dPhi, dY](std::span<const double> t) {
    const Eigen::Map<const Eigen::VectorXd> v(t.data(), dPhi);
    const Eigen::Map<const Eigen::VectorXd> y(t.data() + dPhi, dY);
    return 0.5 * (W_hat * v - y).squaredNorm();
  };
  return f;
}

}  // namespace koksma
