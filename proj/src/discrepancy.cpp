#include "koksma/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace koksma {

namespace {

void check_inputs(const PointSet& ps, const BoxMeasure& nu) {
  if (ps.d != nu.dim())
    throw DimensionMismatch("point set dimension disagrees with the measure");
  if (ps.size() == 0) throw ValidationError("point set is empty");
}

// Per-axis enumeration grid: data coordinates, atom coordinates (atomic
// measures and degenerate box edges both place mass on a single coordinate),
// and 1. Sorted and deduplicated.
std::vector<std::vector<double>> build_axes(const PointSet& ps, const BoxMeasure& nu) {
  const int d = ps.d;
  const std::size_t m = ps.size();
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    auto& g = axes[static_cast<std::size_t>(j)];
    g.reserve(m + 1);
    for (std::size_t i = 0; i < m; ++i) g.push_back(ps.at(i, j));
    if (const auto* at = nu.as_atomic()) {
      for (std::size_t a = 0; a < at->weights.size(); ++a)
        g.push_back(at->support.at(a, j));
    }
    if (const auto* bm = nu.as_box_mixture()) {
      for (const auto& box : bm->boxes) {
        const double lo = box.lo[static_cast<std::size_t>(j)];
        if (lo == box.hi[static_cast<std::size_t>(j)]) g.push_back(lo);
      }
    }
    g.push_back(1.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  return axes;
}

std::uint64_t checked_cell_count(const std::vector<std::vector<double>>& axes,
                                 std::uint64_t cell_budget) {
  unsigned __int128 cells = 1;
  for (const auto& g : axes) {
    cells *= g.size();
    if (cells > cell_budget) {
      const std::uint64_t reported =
          cells > std::numeric_limits<std::uint64_t>::max()
              ? std::numeric_limits<std::uint64_t>::max()
              : static_cast<std::uint64_t>(cells);
      throw BudgetExceeded(reported, cell_budget);
    }
  }
  return static_cast<std::uint64_t>(cells);
}

// Best candidate within one slab of the grid. `lin` is the row-major linear
// index of the grid point, which makes the global tie-break (smallest linear
// index, `over` before `under` at the same point) a pair comparison.
struct Candidate {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t lin = 0;
  int side = 0;  // 0 over, 1 under
};

inline void offer(Candidate& best, double over, double under, std::uint64_t lin) {
  double v;
  int side;
  if (over >= under) {
    v = over;
    side = 0;
  } else {
    v = under;
    side = 1;
  }
  if (v > best.value) {
    best.value = v;
    best.lin = lin;
    best.side = side;
  }
}

DiscrepancyResult finish(const std::vector<std::vector<double>>& axes, const Candidate& best,
                         std::uint64_t cells) {
  const std::size_t d = axes.size();
  DiscrepancyResult out;
  out.value = best.value;
  out.side = best.side == 0 ? DiscrepancyResult::Side::over : DiscrepancyResult::Side::under;
  out.exact = true;
  out.cells_evaluated = cells;
  out.witness.resize(d);
  std::uint64_t rem = best.lin;
  for (std::size_t j = d; j-- > 0;) {
    const std::size_t K = axes[j].size();
    out.witness[j] = axes[j][static_cast<std::size_t>(rem % K)];
    rem /= K;
  }
  return out;
}

}  // namespace

double local_discrepancy(const PointSet& ps, const BoxMeasure& nu, std::span<const double> t) {
  check_inputs(ps, nu);
  if (t.size() != static_cast<std::size_t>(ps.d))
    throw DimensionMismatch("box corner dimension disagrees with the point set");
  const std::size_t m = ps.size();
  std::uint64_t cnt = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::span<const double> x = ps.point(i);
    bool inside = true;
    for (int j = 0; j < ps.d; ++j)
      if (!(x[static_cast<std::size_t>(j)] <= t[static_cast<std::size_t>(j)])) {
        inside = false;
        break;
      }
    if (inside) ++cnt;
  }
  return static_cast<double>(cnt) / static_cast<double>(m) - nu.closed_mass(t);
}

double local_discrepancy_open(const PointSet& ps, const BoxMeasure& nu, std::span<const double> t) {
  check_inputs(ps, nu);
  if (t.size() != static_cast<std::size_t>(ps.d))
    throw DimensionMismatch("box corner dimension disagrees with the point set");
  const std::size_t m = ps.size();
  std::uint64_t cnt = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::span<const double> x = ps.point(i);
    bool inside = true;
    for (int j = 0; j < ps.d; ++j)
      if (!(x[static_cast<std::size_t>(j)] < t[static_cast<std::size_t>(j)])) {
        inside = false;
        break;
      }
    if (inside) ++cnt;
  }
  return static_cast<double>(cnt) / static_cast<double>(m) - nu.open_mass(t);
}

DiscrepancyResult star_discrepancy_exact(const PointSet& ps, const BoxMeasure& nu,
                                         std::uint64_t cell_budget) {
  check_inputs(ps, nu);
  const int d = ps.d;
  const std::size_t m = ps.size();
  const double dm = static_cast<double>(m);
  const auto axes = build_axes(ps, nu);
  const std::uint64_t cells = checked_cell_count(axes, cell_budget);

  std::vector<std::size_t> K(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) K[static_cast<std::size_t>(j)] = axes[static_cast<std::size_t>(j)].size();

  // Grid ranks per point and axis: closed membership at grid index k means
  // k >= cIdx, strict membership means k >= sIdx (sIdx may be K, i.e. never).
  std::vector<std::uint32_t> cIdx(m * static_cast<std::size_t>(d));
  std::vector<std::uint32_t> sIdx(m * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) {
      const auto& g = axes[static_cast<std::size_t>(j)];
      const double x = ps.at(i, j);
      cIdx[i * d + j] = static_cast<std::uint32_t>(std::lower_bound(g.begin(), g.end(), x) - g.begin());
      sIdx[i * d + j] = static_cast<std::uint32_t>(std::upper_bound(g.begin(), g.end(), x) - g.begin());
    }
  }

  // Mass tables. The sweep multiplies per-axis factors with the same
  // association as the mass oracles, so values agree bit for bit (atomic
  // masses are bucketed by last-axis rank instead, which can reorder the
  // weight additions and differ in the last few ulps).
  const auto* prod = nu.as_product();
  const auto* mix = nu.as_box_mixture();
  const auto* atom = nu.as_atomic();

  std::vector<std::vector<double>> cdfTab;
  if (prod) {
    cdfTab.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const auto& g = axes[static_cast<std::size_t>(j)];
      auto& tab = cdfTab[static_cast<std::size_t>(j)];
      tab.resize(g.size());
      for (std::size_t k = 0; k < g.size(); ++k)
        tab[k] = axis_cdf_value(prod->axes[static_cast<std::size_t>(j)], g[k]);
    }
  }

  std::size_t B = 0;
  std::vector<std::vector<double>> fc, fs;  // [b*d + j][k]
  if (mix) {
    B = mix->boxes.size();
    fc.resize(B * static_cast<std::size_t>(d));
    fs.resize(B * static_cast<std::size_t>(d));
    for (std::size_t b = 0; b < B; ++b) {
      const auto& box = mix->boxes[b];
      for (int j = 0; j < d; ++j) {
        const auto& g = axes[static_cast<std::size_t>(j)];
        auto& tc = fc[b * d + j];
        auto& ts = fs[b * d + j];
        tc.resize(g.size());
        ts.resize(g.size());
        const double lo = box.lo[static_cast<std::size_t>(j)];
        const double hi = box.hi[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < g.size(); ++k) {
          tc[k] = box_edge_fraction_closed(lo, hi, g[k]);
          ts[k] = box_edge_fraction_strict(lo, hi, g[k]);
        }
      }
    }
  }

  std::size_t A = 0;
  std::vector<std::uint32_t> aC, aS;  // atom ranks, like cIdx/sIdx
  if (atom) {
    A = atom->weights.size();
    aC.resize(A * static_cast<std::size_t>(d));
    aS.resize(A * static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < A; ++a) {
      for (int j = 0; j < d; ++j) {
        const auto& g = axes[static_cast<std::size_t>(j)];
        const double x = atom->support.at(a, j);
        aC[a * d + j] = static_cast<std::uint32_t>(std::lower_bound(g.begin(), g.end(), x) - g.begin());
        aS[a * d + j] = static_cast<std::uint32_t>(std::upper_bound(g.begin(), g.end(), x) - g.begin());
      }
    }
  }

  const int L = d - 1;  // sweep axis
  const std::size_t KL = K[static_cast<std::size_t>(L)];

  if (d == 1) {
    // Single sweep, no prefix and nothing to parallelize.
    std::vector<std::uint32_t> bucketC(KL, 0), bucketS(KL, 0);
    std::vector<double> massC(KL, 0.0), massS(KL, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      bucketC[cIdx[i]]++;
      if (sIdx[i] < KL) bucketS[sIdx[i]]++;
    }
    for (std::size_t a = 0; a < A; ++a) {
      massC[aC[a]] += atom->weights[a];
      if (aS[a] < KL) massS[aS[a]] += atom->weights[a];
    }
    Candidate best;
    std::uint64_t cntC = 0, cntS = 0;
    double mAC = 0.0, mAS = 0.0;
    for (std::size_t k = 0; k < KL; ++k) {
      cntC += bucketC[k];
      cntS += bucketS[k];
      double massClosed, massOpen;
      if (prod) {
        massClosed = 1.0 * cdfTab[0][k];
        massOpen = massClosed;
      } else if (mix) {
        massClosed = 0.0;
        massOpen = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
          double accC = mix->boxes[b].weight;
          accC *= fc[b][k];
          massClosed += accC;
          double accS = mix->boxes[b].weight;
          accS *= fs[b][k];
          massOpen += accS;
        }
      } else {
        mAC += massC[k];
        mAS += massS[k];
        massClosed = mAC;
        massOpen = mAS;
      }
      const double over = static_cast<double>(cntC) / dm - massClosed;
      const double under = massOpen - static_cast<double>(cntS) / dm;
      offer(best, over, under, static_cast<std::uint64_t>(k));
    }
    return finish(axes, best, cells);
  }

  // Axis 0 indexes the parallel slabs; axes 1..d-2 run through an odometer
  // inside each slab; axis d-1 is swept incrementally with rank buckets.
  const std::size_t K0 = K[0];
  std::uint64_t slabCells = 1;
  for (int j = 1; j < d; ++j) slabCells *= K[static_cast<std::size_t>(j)];

  std::vector<Candidate> slabBest(K0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long k0s = 0; k0s < static_cast<long long>(K0); ++k0s) {
    const std::size_t k0 = static_cast<std::size_t>(k0s);
    Candidate best;
    std::vector<std::size_t> kmid(static_cast<std::size_t>(d - 2), 0);
    std::vector<std::uint32_t> bucketC(KL), bucketS(KL);
    std::vector<double> massBC, massBS;
    if (atom) {
      massBC.resize(KL);
      massBS.resize(KL);
    }
    std::vector<double> prefAccC, prefAccS;
    if (mix) {
      prefAccC.resize(B);
      prefAccS.resize(B);
    }

    std::uint64_t linBase = static_cast<std::uint64_t>(k0) * slabCells;
    bool more = true;
    while (more) {
      // Count points passing the prefix conditions, bucketed by last-axis rank.
      std::fill(bucketC.begin(), bucketC.end(), 0u);
      std::fill(bucketS.begin(), bucketS.end(), 0u);
      for (std::size_t i = 0; i < m; ++i) {
        const std::uint32_t* ci = cIdx.data() + i * d;
        const std::uint32_t* si = sIdx.data() + i * d;
        bool okC = ci[0] <= k0;
        for (int j = 1; okC && j < L; ++j) okC = ci[j] <= kmid[static_cast<std::size_t>(j - 1)];
        if (okC) bucketC[ci[L]]++;
        bool okS = si[0] <= k0;
        for (int j = 1; okS && j < L; ++j) okS = si[j] <= kmid[static_cast<std::size_t>(j - 1)];
        if (okS && si[L] < KL) bucketS[si[L]]++;
      }

      // Prefix mass factors for the current slab row.
      double prefProd = 1.0;
      if (prod) {
        prefProd *= cdfTab[0][k0];
        for (int j = 1; j < L; ++j) prefProd *= cdfTab[static_cast<std::size_t>(j)][kmid[static_cast<std::size_t>(j - 1)]];
      } else if (mix) {
        for (std::size_t b = 0; b < B; ++b) {
          double accC = mix->boxes[b].weight;
          accC *= fc[b * d][k0];
          double accS = mix->boxes[b].weight;
          accS *= fs[b * d][k0];
          for (int j = 1; j < L; ++j) {
            accC *= fc[b * d + j][kmid[static_cast<std::size_t>(j - 1)]];
            accS *= fs[b * d + j][kmid[static_cast<std::size_t>(j - 1)]];
          }
          prefAccC[b] = accC;
          prefAccS[b] = accS;
        }
      } else {
        std::fill(massBC.begin(), massBC.end(), 0.0);
        std::fill(massBS.begin(), massBS.end(), 0.0);
        for (std::size_t a = 0; a < A; ++a) {
          const std::uint32_t* ca = aC.data() + a * d;
          const std::uint32_t* sa = aS.data() + a * d;
          bool okC = ca[0] <= k0;
          for (int j = 1; okC && j < L; ++j) okC = ca[j] <= kmid[static_cast<std::size_t>(j - 1)];
          if (okC) massBC[ca[L]] += atom->weights[a];
          bool okS = sa[0] <= k0;
          for (int j = 1; okS && j < L; ++j) okS = sa[j] <= kmid[static_cast<std::size_t>(j - 1)];
          if (okS && sa[L] < KL) massBS[sa[L]] += atom->weights[a];
        }
      }

      std::uint64_t cntC = 0, cntS = 0;
      double mAC = 0.0, mAS = 0.0;
      for (std::size_t k = 0; k < KL; ++k) {
        cntC += bucketC[k];
        cntS += bucketS[k];
        double massClosed, massOpen;
        if (prod) {
          massClosed = prefProd * cdfTab[static_cast<std::size_t>(L)][k];
          massOpen = massClosed;
        } else if (mix) {
          massClosed = 0.0;
          massOpen = 0.0;
          for (std::size_t b = 0; b < B; ++b) {
            massClosed += prefAccC[b] * fc[b * d + L][k];
            massOpen += prefAccS[b] * fs[b * d + L][k];
          }
        } else {
          mAC += massBC[k];
          mAS += massBS[k];
          massClosed = mAC;
          massOpen = mAS;
        }
        const double over = static_cast<double>(cntC) / dm - massClosed;
        const double under = massOpen - static_cast<double>(cntS) / dm;
        offer(best, over, under, linBase + k);
      }

      linBase += KL;
      more = false;
      for (std::size_t j = kmid.size(); j-- > 0;) {
        if (++kmid[j] < K[j + 1]) {
          more = true;
          break;
        }
        kmid[j] = 0;
      }
    }
    slabBest[k0] = best;
  }

  // Serial reduce in slab order keeps the result independent of scheduling.
  Candidate best;
  for (std::size_t k0 = 0; k0 < K0; ++k0)
    if (slabBest[k0].value > best.value) best = slabBest[k0];
  return finish(axes, best, cells);
}

DiscrepancyResult star_discrepancy_exact_serial(const PointSet& ps, const BoxMeasure& nu,
                                                std::uint64_t cell_budget) {
  check_inputs(ps, nu);
  const int d = ps.d;
  const std::size_t m = ps.size();
  const double dm = static_cast<double>(m);
  const auto axes = build_axes(ps, nu);
  const std::uint64_t cells = checked_cell_count(axes, cell_budget);

  Candidate best;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> t(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) t[static_cast<std::size_t>(j)] = axes[static_cast<std::size_t>(j)][0];
  std::uint64_t lin = 0;
  bool more = true;
  while (more) {
    std::uint64_t cntC = 0, cntS = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::span<const double> x = ps.point(i);
      bool okC = true, okS = true;
      for (int j = 0; j < d; ++j) {
        const double xv = x[static_cast<std::size_t>(j)];
        const double tv = t[static_cast<std::size_t>(j)];
        if (!(xv <= tv)) {
          okC = false;
          okS = false;
          break;
        }
        if (!(xv < tv)) okS = false;
      }
      if (okC) ++cntC;
      if (okS) ++cntS;
    }
    const double over = static_cast<double>(cntC) / dm - nu.closed_mass(t);
    const double under = nu.open_mass(t) - static_cast<double>(cntS) / dm;
    offer(best, over, under, lin);

    ++lin;
    more = false;
    for (std::size_t j = static_cast<std::size_t>(d); j-- > 0;) {
      if (++idx[j] < axes[j].size()) {
        t[j] = axes[j][idx[j]];
        more = true;
        break;
      }
      idx[j] = 0;
      t[j] = axes[j][0];
    }
  }
  return finish(axes, best, cells);
}

DiscrepancyResult star_discrepancy_1d(const PointSet& ps, const BoxMeasure& nu) {
  if (ps.d != 1) throw DimensionMismatch("the sorted formula needs a 1-dimensional point set");
  check_inputs(ps, nu);
  const std::size_t m = ps.size();
  const double dm = static_cast<double>(m);
  std::vector<double> sorted(ps.coords);
  std::sort(sorted.begin(), sorted.end());

  Candidate best;
  std::uint64_t cells = 0;
  double witness = 1.0;
  auto offer_at = [&](double v, std::uint64_t cnt_le, std::uint64_t cnt_lt) {
    const std::span<const double> tv(&v, 1);
    const double over = static_cast<double>(cnt_le) / dm - nu.closed_mass(tv);
    const double under = nu.open_mass(tv) - static_cast<double>(cnt_lt) / dm;
    const double prev = best.value;
    offer(best, over, under, cells);
    if (best.value != prev) witness = v;
    ++cells;
  };

  std::size_t i = 0;
  while (i < m) {
    std::size_t j = i;
    while (j + 1 < m && sorted[j + 1] == sorted[i]) ++j;
    offer_at(sorted[i], j + 1, i);
    i = j + 1;
  }
  if (sorted.back() != 1.0) offer_at(1.0, m, m);

  DiscrepancyResult out;
  out.value = best.value;
  out.witness = {witness};
  out.side = best.side == 0 ? DiscrepancyResult::Side::over : DiscrepancyResult::Side::under;
  out.exact = true;
  out.cells_evaluated = cells;
  return out;
}

DiscrepancyResult star_discrepancy_lower_bound(const PointSet& ps, const BoxMeasure& nu,
                                               std::uint64_t iterations, std::uint64_t seed) {
  check_inputs(ps, nu);
  const int d = ps.d;
  const std::size_t m = ps.size();
  const double dm = static_cast<double>(m);
  const auto axes = build_axes(ps, nu);

  std::uint64_t evals = 0;
  auto eval = [&](const std::vector<double>& t, int& side) {
    ++evals;
    std::uint64_t cntC = 0, cntS = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::span<const double> x = ps.point(i);
      bool okC = true, okS = true;
      for (int j = 0; j < d; ++j) {
        const double xv = x[static_cast<std::size_t>(j)];
        const double tv = t[static_cast<std::size_t>(j)];
        if (!(xv <= tv)) {
          okC = false;
          okS = false;
          break;
        }
        if (!(xv < tv)) okS = false;
      }
      if (okC) ++cntC;
      if (okS) ++cntS;
    }
    const double over = static_cast<double>(cntC) / dm - nu.closed_mass(t);
    const double under = nu.open_mass(t) - static_cast<double>(cntS) / dm;
    if (over >= under) {
      side = 0;
      return over;
    }
    side = 1;
    return under;
  };

  // The all-ones corner is always worth at least 0, so the bound never comes
  // back negative.
  std::vector<double> bestT(static_cast<std::size_t>(d), 1.0);
  int bestSide = 0;
  double bestV = eval(bestT, bestSide);

  Rng rng(seed);
  std::vector<double> t(static_cast<std::size_t>(d));
  for (std::uint64_t it = 0; it < iterations; ++it) {
    for (int j = 0; j < d; ++j) t[static_cast<std::size_t>(j)] = rng.unit();
    int side = 0;
    double v = eval(t, side);
    // Coordinate snaps: the sup lives on grid coordinates, so pull each
    // anchor coordinate to the nearest grid value on either side and keep
    // whatever improves. Three sweeps let moves on one axis unlock others.
    for (int sweep = 0; sweep < 3; ++sweep) {
      for (int j = 0; j < d; ++j) {
        const auto& g = axes[static_cast<std::size_t>(j)];
        const double cur = t[static_cast<std::size_t>(j)];
        const auto up = std::upper_bound(g.begin(), g.end(), cur);
        double cand[2];
        int nc = 0;
        if (up != g.begin()) cand[nc++] = *(up - 1);
        if (up != g.end()) cand[nc++] = *up;
        double keep = cur;
        for (int c = 0; c < nc; ++c) {
          if (cand[c] == cur) continue;
          t[static_cast<std::size_t>(j)] = cand[c];
          int s2 = 0;
          const double v2 = eval(t, s2);
          if (v2 > v) {
            v = v2;
            side = s2;
            keep = cand[c];
          }
        }
        t[static_cast<std::size_t>(j)] = keep;
      }
    }
    if (v > bestV) {
      bestV = v;
      bestT = t;
      bestSide = side;
    }
  }

  DiscrepancyResult out;
  out.value = bestV;
  out.witness = bestT;
  out.side = bestSide == 0 ? DiscrepancyResult::Side::over : DiscrepancyResult::Side::under;
  out.exact = false;
  out.cells_evaluated = evals;
  return out;
}

namespace {

void check_reference_params(const ReferenceBoundParams& p) {
  if (!(p.c1 > 0.0)) throw ValidationError("c1 must be positive");
  if (!(p.c2 >= p.c1)) throw ValidationError("c2 must be at least c1");
  if (p.d < 1) throw ValidationError("dimension must be at least 1");
  if (p.m < 1) throw ValidationError("sample count must be at least 1");
}

}  // namespace

double prop2_bound(const ReferenceBoundParams& params) {
  check_reference_params(params);
  return params.c2 * std::sqrt(static_cast<double>(params.d) / static_cast<double>(params.m));
}

TailProbability prop2_delta(const ReferenceBoundParams& params) {
  check_reference_params(params);
  const double base = params.c1 * params.c2 * params.c2 * std::exp(-2.0 * params.c2 * params.c2);
  TailProbability out;
  out.vacuous = base >= 1.0;
  out.delta = (1.0 / (params.c2 * std::sqrt(static_cast<double>(params.d)))) *
              std::pow(base, static_cast<double>(params.d));
  return out;
}

double prop3_bound(int d, std::uint64_t m) {
  if (d < 1) throw ValidationError("dimension must be at least 1");
  if (m < 1) throw ValidationError("sample count must be at least 1");
  const double lg = std::log2(static_cast<double>(m));
  return 63.0 * std::sqrt(static_cast<double>(d)) *
         std::pow(2.0 + lg, (3.0 * static_cast<double>(d) + 1.0) / 2.0) / static_cast<double>(m);
}

double uniform_iid_bound(int d, std::uint64_t m) {
  if (d < 1) throw ValidationError("dimension must be at least 1");
  if (m < 1) throw ValidationError("sample count must be at least 1");
  return 10.0 * std::sqrt(static_cast<double>(d) / static_cast<double>(m));
}

ScalingStudy scaling_study(const BoxMeasure& nu, const std::vector<std::uint64_t>& m_list,
                           int trials, std::uint64_t seed, std::uint64_t cell_budget) {
  if (m_list.empty()) throw ValidationError("need at least one sample size");
  for (std::uint64_t m : m_list)
    if (m < 1) throw ValidationError("sample sizes must be at least 1");
  if (trials < 1) throw ValidationError("need at least one trial");

  const int d = nu.dim();
  ScalingStudy study;
  study.d = d;

  auto nearest_rank = [](const std::vector<double>& sorted, double q) {
    const double n = static_cast<double>(sorted.size());
    std::size_t r = static_cast<std::size_t>(std::ceil(q * n));
    if (r < 1) r = 1;
    if (r > sorted.size()) r = sorted.size();
    return sorted[r - 1];
  };

  for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
    const std::uint64_t m = m_list[mi];
    std::vector<double> values(static_cast<std::size_t>(trials));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t s =
          derive_seed(seed, {static_cast<std::uint64_t>(mi), static_cast<std::uint64_t>(trial)});
      const PointSet ps = nu.sample(m, s);
      values[static_cast<std::size_t>(trial)] = star_discrepancy_exact(ps, nu, cell_budget).value;
    }
    std::sort(values.begin(), values.end());
    ScalingRow row;
    row.m = m;
    row.median = nearest_rank(values, 0.5);
    row.p90 = nearest_rank(values, 0.9);
    const double scale = std::sqrt(static_cast<double>(m) / static_cast<double>(d));
    row.scaled_median = row.median * scale;
    row.scaled_p90 = row.p90 * scale;
    study.rows.push_back(row);
    study.smallest_consistent_c2 = std::max(study.smallest_consistent_c2, row.scaled_p90);
  }
  return study;
}

}  // namespace koksma
