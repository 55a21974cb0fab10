#include "koksma/bounds.hpp"

#include <cmath>

namespace koksma {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double expectation_atomic(const FunctionHandle& f, const AtomicMeasure& at) {
  double e = 0.0;
  for (std::size_t a = 0; a < at.weights.size(); ++a)
    e += at.weights[a] * f.eval(at.support.point(a));
  return e;
}

}  // namespace

double gap_exact(const FunctionHandle& f, const MapSpec& map, const BoxMeasure& mu,
                 const PointSet& dataset) {
  const auto* at = mu.as_atomic();
  if (!at) throw ValidationError("exact gap needs an atomic measure");
  if (map.d_in != mu.dim())
    throw DimensionMismatch("map input dimension disagrees with the measure");
  if (dataset.d != map.d_in)
    throw DimensionMismatch("dataset dimension disagrees with the map input");
  if (f.arity != map.d_out)
    throw DimensionMismatch("function arity disagrees with the map output");

  double expected = 0.0;
  for (std::size_t a = 0; a < at->weights.size(); ++a) {
    const std::vector<double> img = apply_map_point(map, at->support.point(a));
    expected += at->weights[a] * f.eval(img);
  }
  std::vector<double> vals(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i)
    vals[i] = f.eval(apply_map_point(map, dataset.point(i)));
  return expected - mean_of(vals);
}

GapBoundReport koksma_hlawka_bound(const FunctionHandle& f, const PointSet& mapped_points,
                                   const BoxMeasure& measure_T, const VariationMode& mode,
                                   std::uint64_t cell_budget) {
  if (f.arity != mapped_points.d)
    throw DimensionMismatch("function arity disagrees with the point set");
  GapBoundReport report;
  if (mode.kind == VariationMode::Kind::closed_form) {
    if (!(mode.value >= 0.0)) throw ValidationError("variation value must be nonnegative");
    report.variation = mode.value;
  } else {
    report.variation = hardy_krause_variation(f, mode.level).total;
    report.auxiliary["variation_level"] = static_cast<double>(mode.level);
  }
  const DiscrepancyResult dres = star_discrepancy_exact(mapped_points, measure_T, cell_budget);
  report.discrepancy = dres.value;
  report.discrepancy_detail = dres;
  report.bound = report.variation * report.discrepancy;
  if (const auto* at = measure_T.as_atomic()) {
    std::vector<double> vals(mapped_points.size());
    for (std::size_t i = 0; i < mapped_points.size(); ++i)
      vals[i] = f.eval(mapped_points.point(i));
    report.gap = expectation_atomic(f, *at) - mean_of(vals);
    report.satisfied = std::fabs(*report.gap) <= report.bound + kGapTolerance;
  }
  return report;
}

GapBoundReport koksma_hlawka_bound(const SignedAtomicMeasure& nu_f, const PointSet& mapped_points,
                                   const BoxMeasure& measure_T, std::uint64_t cell_budget) {
  if (nu_f.d != mapped_points.d)
    throw DimensionMismatch("signed measure dimension disagrees with the point set");
  if (nu_f.d != measure_T.dim())
    throw DimensionMismatch("signed measure dimension disagrees with the measure");
  GapBoundReport report;
  report.variation = total_variation(nu_f);
  const DiscrepancyResult dres = star_discrepancy_exact(mapped_points, measure_T, cell_budget);
  report.discrepancy = dres.value;
  report.discrepancy_detail = dres;
  report.bound = report.variation * report.discrepancy;

  double expected = nu_f.offset;
  for (std::size_t a = 0; a < nu_f.atoms(); ++a)
    expected += nu_f.weights[a] * measure_T.closed_mass(nu_f.location(a));
  const FunctionHandle f = f_from_signed(nu_f);
  std::vector<double> vals(mapped_points.size());
  for (std::size_t i = 0; i < mapped_points.size(); ++i)
    vals[i] = f.eval(mapped_points.point(i));
  report.gap = expected - mean_of(vals);
  report.satisfied = std::fabs(*report.gap) <= report.bound + kGapTolerance;
  return report;
}

IdentityCheck verify_thm1_identity(const SignedAtomicMeasure& nu_f, const BoxMeasure& measure_T,
                                   const PointSet& dataset_T) {
  if (nu_f.d != measure_T.dim())
    throw DimensionMismatch("signed measure dimension disagrees with the measure");
  if (nu_f.d != dataset_T.d)
    throw DimensionMismatch("signed measure dimension disagrees with the dataset");
  const std::size_t m = dataset_T.size();
  if (m == 0) throw ValidationError("dataset is empty");
  const double dm = static_cast<double>(m);

  double expected = nu_f.offset;
  for (std::size_t a = 0; a < nu_f.atoms(); ++a)
    expected += nu_f.weights[a] * measure_T.closed_mass(nu_f.location(a));
  const FunctionHandle f = f_from_signed(nu_f);
  std::vector<double> vals(m);
  for (std::size_t i = 0; i < m; ++i) vals[i] = f.eval(dataset_T.point(i));

  IdentityCheck out;
  out.lhs = expected - mean_of(vals);

  double rhs = 0.0;
  for (std::size_t a = 0; a < nu_f.atoms(); ++a) {
    const std::span<const double> loc = nu_f.location(a);
    std::uint64_t cnt = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::span<const double> t = dataset_T.point(i);
      bool le = true;
      for (int j = 0; j < nu_f.d; ++j)
        if (!(t[static_cast<std::size_t>(j)] <= loc[static_cast<std::size_t>(j)])) {
          le = false;
          break;
        }
      if (le) ++cnt;
    }
    rhs += nu_f.weights[a] *
           (measure_T.closed_mass(loc) - static_cast<double>(cnt) / dm);
  }
  out.rhs = rhs;
  out.residual = std::fabs(out.lhs - out.rhs);
  return out;
}

GapBoundReport zero_one_tightness(const std::vector<int>& losses, double true_mass_one) {
  if (losses.empty()) throw ValidationError("need at least one loss value");
  std::uint64_t ones = 0;
  for (int l : losses) {
    if (l != 0 && l != 1) throw ValidationError("losses must be 0 or 1");
    ones += static_cast<std::uint64_t>(l);
  }
  if (!(true_mass_one >= 0.0 && true_mass_one <= 1.0))
    throw ValidationError("true error rate must lie in [0,1]");

  const double mean = static_cast<double>(ones) / static_cast<double>(losses.size());
  GapBoundReport report;
  report.gap = true_mass_one - mean;
  report.variation = 1.0;
  report.discrepancy = std::fabs(*report.gap);
  report.bound = report.variation * report.discrepancy;
  report.satisfied = true;
  report.equality = true;
  return report;
}

double hoeffding_term(double M, std::uint64_t m, double delta) {
  if (!(M >= 0.0)) throw ValidationError("M must be nonnegative");
  if (m < 1) throw ValidationError("sample count must be at least 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidDelta("delta must lie strictly between 0 and 1");
  return M * std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(m)));
}

double classwise_bound(const std::vector<ClassTerm>& classes, int d_z, double c2, double delta) {
  if (classes.empty()) throw ValidationError("need at least one class");
  if (d_z < 1) throw ValidationError("representation dimension must be at least 1");
  if (!(c2 > 0.0)) throw ValidationError("c2 must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidDelta("delta must lie strictly between 0 and 1");
  double priorSum = 0.0;
  for (const auto& c : classes) {
    if (!(c.p_y >= 0.0)) throw InvalidClassPriors("class priors must be nonnegative");
    if (c.n_y < 1) throw ValidationError("every class needs at least one sample");
    if (!(c.empirical_loss >= 0.0)) throw ValidationError("empirical losses must be nonnegative");
    if (!(c.variation >= 0.0)) throw ValidationError("variations must be nonnegative");
    priorSum += c.p_y;
  }
  if (std::fabs(priorSum - 1.0) > 1e-9)
    throw InvalidClassPriors("class priors sum to " + std::to_string(priorSum) + ", expected 1");

  double total = 0.0;
  for (const auto& c : classes) {
    const double ny = static_cast<double>(c.n_y);
    total += c2 * c.p_y * c.variation * std::sqrt(static_cast<double>(d_z) / ny) +
             c.empirical_loss * std::sqrt(std::log(2.0 / delta) / (2.0 * ny));
  }
  return total;
}

}  // namespace koksma
