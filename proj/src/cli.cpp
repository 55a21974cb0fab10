#include "koksma/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"

#include "koksma/bounds.hpp"
#include "koksma/discrepancy.hpp"
#include "koksma/linreg.hpp"
#include "koksma/measure.hpp"
#include "koksma/point_set.hpp"
#include "koksma/suite.hpp"
#include "koksma/variation.hpp"

namespace koksma {

namespace {

using nlohmann::ordered_json;

std::uint64_t env_cell_budget() {
  const char* s = std::getenv("KOKSMA_CELL_BUDGET");
  if (!s || !*s) return kDefaultCellBudget;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (!end || *end != '\0' || v == 0)
    throw ValidationError("KOKSMA_CELL_BUDGET must be a positive integer");
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string digest(const std::string& bytes) {
  return "0x" + hex_u64(fnv1a64(
                    {reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()}));
}

PointSet load_points(const std::string& path, ordered_json& inputs) {
  const std::string bytes = slurp(path);
  inputs[path] = digest(bytes);
  std::istringstream is(bytes);
  return read_points_csv(is);
}

ordered_json load_json(const std::string& path, ordered_json& inputs) {
  const std::string bytes = slurp(path);
  inputs[path] = digest(bytes);
  try {
    return ordered_json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Config entries that hold either an inline object or a path to a JSON file.
ordered_json resolve_inline_or_path(const ordered_json& v, ordered_json& inputs) {
  if (v.is_string()) return load_json(v.get<std::string>(), inputs);
  return v;
}

BoxMeasure measure_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ParseError("measure spec must be a JSON object");
  const std::string variant = j.at("variant").get<std::string>();
  const int d = j.at("d").get<int>();
  if (variant == "uniform") return BoxMeasure::uniform(d);
  if (variant == "product") {
    std::vector<AxisCdf> axes;
    for (const auto& ja : j.at("axes")) {
      AxisCdf axis;
      axis.x = ja.at("x").get<std::vector<double>>();
      axis.F = ja.at("F").get<std::vector<double>>();
      axes.push_back(std::move(axis));
    }
    if (static_cast<int>(axes.size()) != d)
      throw ValidationError("product measure needs exactly d axes");
    return BoxMeasure::product(std::move(axes));
  }
  if (variant == "boxmix") {
    std::vector<WeightedBox> boxes;
    for (const auto& jb : j.at("boxes")) {
      WeightedBox box;
      box.lo = jb.at("lo").get<std::vector<double>>();
      box.hi = jb.at("hi").get<std::vector<double>>();
      box.weight = jb.at("weight").get<double>();
      boxes.push_back(std::move(box));
    }
    return BoxMeasure::box_mixture(d, std::move(boxes));
  }
  if (variant == "atomic") {
    PointSet support = validate(j.at("atoms").get<std::vector<std::vector<double>>>(), d);
    return BoxMeasure::atomic(std::move(support), j.at("weights").get<std::vector<double>>());
  }
  throw ValidationError("unknown measure variant '" + variant + "'");
}

SignedAtomicMeasure signed_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ParseError("signed measure spec must be a JSON object");
  return make_signed_atomic(j.at("d").get<int>(),
                            j.at("locations").get<std::vector<std::vector<double>>>(),
                            j.at("weights").get<std::vector<double>>(), j.value("offset", 0.0));
}

Eigen::MatrixXd mat_from_json(const ordered_json& j, const char* name) {
  if (!j.is_array() || j.empty())
    throw ValidationError(std::string(name) + " must be a non-empty array of rows");
  const auto first = j.front().get<std::vector<double>>();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(first.size()));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = j[r].get<std::vector<double>>();
    if (row.size() != first.size())
      throw ValidationError(std::string(name) + " must be rectangular");
    for (std::size_t c = 0; c < row.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

FunctionHandle builtin_from_json(const ordered_json& j) {
  const std::string name = j.at("name").get<std::string>();
  if (name == "constant") return builtin_constant(j.at("d").get<int>(), j.value("value", 1.0));
  if (name == "linear") return builtin_linear(j.at("coeffs").get<std::vector<double>>());
  if (name == "product") return builtin_product(j.at("d").get<int>());
  if (name == "quadratic-loss")
    return quadratic_loss(mat_from_json(j.at("W_hat"), "W_hat"),
                          mat_from_json(j.at("W_star"), "W_star"));
  if (name == "quadratic-labels")
    return quadratic_loss_labels(mat_from_json(j.at("W_hat"), "W_hat"));
  throw ValidationError("unknown builtin function '" + name + "'");
}

ordered_json discrepancy_json(const DiscrepancyResult& r) {
  ordered_json j;
  j["value"] = r.value;
  j["witness"] = r.witness;
  j["side"] = r.side == DiscrepancyResult::Side::over ? "over" : "under";
  j["exact"] = r.exact;
  j["cells_evaluated"] = r.cells_evaluated;
  return j;
}

ordered_json gap_json(const GapBoundReport& r) {
  ordered_json j;
  if (r.gap) j["gap"] = *r.gap;
  else j["gap"] = nullptr;
  j["variation"] = r.variation;
  j["discrepancy"] = r.discrepancy;
  j["bound"] = r.bound;
  j["satisfied"] = r.satisfied;
  j["equality"] = r.equality;
  if (!r.auxiliary.empty()) j["auxiliary"] = r.auxiliary;
  if (r.discrepancy_detail) j["discrepancy_detail"] = discrepancy_json(*r.discrepancy_detail);
  return j;
}

ordered_json linreg_json(const LinRegReport& r) {
  ordered_json j;
  j["lhs_gap"] = r.lhs_gap;
  j["discrepancy"] = r.discrepancy;
  j["variation_bound"] = r.variation_bound;
  j["A1"] = r.A1;
  j["A2"] = r.A2;
  if (r.M) j["M"] = *r.M;
  j["rhs_bound"] = r.rhs_bound;
  j["satisfied"] = r.satisfied;
  if (r.discrepancy_detail) j["discrepancy_detail"] = discrepancy_json(*r.discrepancy_detail);
  return j;
}

class Reporter {
 public:
  explicit Reporter(std::string command) : command_(std::move(command)) {}

  ordered_json config = ordered_json::object();
  ordered_json inputs = ordered_json::object();

  int emit(ordered_json result, const std::string& out_path) const {
    ordered_json rep;
    rep["schema"] = "koksma/1";
    rep["command"] = command_;
    rep["config"] = config;
    rep["inputs"] = inputs;
    rep["result"] = std::move(result);
    rep["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
            .count();
    const std::string text = rep.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(out_path, std::ios::binary);
      if (!os) throw ValidationError("cannot write " + out_path);
      os << text;
    }
    return 0;
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Star-discrepancy generalization-bound toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker pool size (default: all available cores)");

  std::vector<std::pair<CLI::App*, std::function<int()>>> actions;

  // ---- points ------------------------------------------------------------
  struct {
    std::string kind, csv, out;
    std::size_t m = 0;
    int d = 1, base = 2;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
  } pts;
  {
    CLI::App* c = app.add_subcommand("points", "Generate a point set and write it as CSV");
    c->add_option("--kind", pts.kind, "halton | vdc | equispaced | random")
        ->required()
        ->check(CLI::IsMember({"halton", "vdc", "equispaced", "random"}));
    c->add_option("--m", pts.m, "Number of points")->required();
    c->add_option("--d", pts.d, "Dimension (halton/random)");
    c->add_option("--base", pts.base, "Radical-inverse base (vdc)");
    pts.seed_opt = c->add_option("--seed", pts.seed, "RNG seed (required for random)");
    c->add_option("--csv", pts.csv, "Output CSV path")->required();
    c->add_option("--out", pts.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("points");
      PointSet ps;
      if (pts.kind == "halton") {
        ps = halton(pts.m, pts.d);
      } else if (pts.kind == "vdc") {
        if (pts.d != 1) throw ValidationError("vdc generates d=1 point sets");
        ps = van_der_corput(pts.m, pts.base);
      } else if (pts.kind == "equispaced") {
        if (pts.d != 1) throw ValidationError("equispaced generates d=1 point sets");
        ps = equispaced_centers(pts.m);
      } else {
        if (pts.seed_opt->count() == 0)
          throw ValidationError("random points require an explicit --seed");
        Rng rng(pts.seed);
        ps.d = pts.d;
        ps.coords.resize(pts.m * static_cast<std::size_t>(pts.d));
        for (double& v : ps.coords) v = rng.unit();
      }
      std::ostringstream ss;
      write_points_csv(ss, ps);
      const std::string bytes = ss.str();
      std::ofstream os(pts.csv, std::ios::binary);
      if (!os) throw ValidationError("cannot write " + pts.csv);
      os << bytes;
      rep.config = {{"kind", pts.kind}, {"m", pts.m},       {"d", ps.d},
                    {"base", pts.base}, {"seed", pts.seed}, {"csv", pts.csv}};
      return rep.emit({{"m", ps.size()}, {"d", ps.d}, {"digest", digest(bytes)}}, pts.out);
    });
  }

  // ---- discrepancy ---------------------------------------------------------
  struct {
    std::string points, measure, out;
    std::uint64_t lower_iters = 0, budget = 0, seed = 0;
    bool exact = false, serial = false;
    CLI::Option* lower_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
  } dis;
  {
    CLI::App* c = app.add_subcommand(
        "discrepancy", "Star discrepancy of a point set against a measure");
    c->add_option("--points", dis.points, "Point set CSV")->required();
    c->add_option("--measure", dis.measure, "Measure spec JSON")->required();
    CLI::Option* exact_opt = c->add_flag("--exact", dis.exact, "Exact grid sweep (default)");
    dis.lower_opt =
        c->add_option("--lower-bound", dis.lower_iters, "Certified lower bound, N restarts");
    exact_opt->excludes(dis.lower_opt);
    dis.lower_opt->excludes(exact_opt);
    c->add_flag("--serial", dis.serial, "Use the serial reference kernel");
    c->add_option("--budget", dis.budget, "Cell budget (default: KOKSMA_CELL_BUDGET or 5e7)");
    dis.seed_opt = c->add_option("--seed", dis.seed, "RNG seed (required for --lower-bound)");
    c->add_option("--out", dis.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("discrepancy");
      const PointSet ps = load_points(dis.points, rep.inputs);
      const BoxMeasure nu = measure_from_json(load_json(dis.measure, rep.inputs));
      const std::uint64_t budget = dis.budget > 0 ? dis.budget : env_cell_budget();
      const bool lower = dis.lower_opt->count() > 0;
      rep.config = {{"points", dis.points},
                    {"measure", dis.measure},
                    {"mode", lower ? "lower-bound" : "exact"},
                    {"serial", dis.serial},
                    {"budget", budget},
                    {"seed", dis.seed},
                    {"iterations", dis.lower_iters}};
      DiscrepancyResult res;
      if (lower) {
        if (dis.seed_opt->count() == 0)
          throw ValidationError("--lower-bound requires an explicit --seed");
        res = star_discrepancy_lower_bound(ps, nu, dis.lower_iters, dis.seed);
      } else {
        try {
          res = dis.serial ? star_discrepancy_exact_serial(ps, nu, budget)
                           : star_discrepancy_exact(ps, nu, budget);
        } catch (const BudgetExceeded&) {
          std::cerr << "hint: rerun with --lower-bound <restarts> for a certified "
                       "lower bound within budget\n";
          throw;
        }
      }
      return rep.emit(discrepancy_json(res), dis.out);
    });
  }

  // ---- variation -----------------------------------------------------------
  struct {
    std::string f, config, out;
    int d = 0, level = 6;
    double value = 1.0;
    std::vector<double> coeffs;
    bool serial = false;
  } var;
  {
    CLI::App* c = app.add_subcommand("variation", "Dyadic variation estimates of a function");
    c->add_option("--f", var.f, "builtin:<name> (constant|linear|product|quadratic-loss|"
                                "quadratic-labels) or signed:<spec.json>")
        ->required();
    c->add_option("--d", var.d, "Arity (builtins without an implied arity)");
    c->add_option("--level", var.level, "Dyadic level, 2^level cells per axis");
    c->add_option("--value", var.value, "Constant value (builtin:constant)");
    c->add_option("--coeffs", var.coeffs, "Coefficients (builtin:linear)")->delimiter(',');
    c->add_option("--config", var.config, "Matrix payload JSON (builtin:quadratic-*)");
    c->add_flag("--serial", var.serial, "Also run the serial reference kernel");
    c->add_option("--out", var.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("variation");
      FunctionHandle f = [&] {
        if (var.f.rfind("builtin:", 0) == 0) {
          ordered_json spec;
          spec["name"] = var.f.substr(8);
          if (var.d > 0) spec["d"] = var.d;
          spec["value"] = var.value;
          if (!var.coeffs.empty()) spec["coeffs"] = var.coeffs;
          if (!var.config.empty()) {
            const ordered_json payload = load_json(var.config, rep.inputs);
            for (const auto& [key, val] : payload.items()) spec[key] = val;
          }
          return builtin_from_json(spec);
        }
        if (var.f.rfind("signed:", 0) == 0)
          return f_from_signed(signed_from_json(load_json(var.f.substr(7), rep.inputs)));
        throw ValidationError("--f must start with builtin: or signed:");
      }();
      rep.config = {{"f", var.f}, {"level", var.level}, {"arity", f.arity}};
      ordered_json result;
      result["arity"] = f.arity;
      result["vitali"] = vitali_variation(f, var.level);
      if (var.serial) result["vitali_serial"] = vitali_variation_serial(f, var.level);
      if (f.arity <= 8) {
        const VariationReport hk = hardy_krause_variation(f, var.level);
        ordered_json jh;
        jh["total"] = hk.total;
        jh["level"] = hk.level;
        jh["converged"] = hk.converged;
        ordered_json per = ordered_json::array();
        for (const SubsetVariation& sv : hk.per_subset)
          per.push_back({{"subset", sv.subset}, {"value", sv.value}});
        jh["per_subset"] = std::move(per);
        result["hardy_krause"] = std::move(jh);
      }
      return rep.emit(std::move(result), var.out);
    });
  }

  // ---- bound ---------------------------------------------------------------
  struct {
    std::string config, out;
    std::uint64_t budget = 0;
  } bnd;
  CLI::App* bound = app.add_subcommand("bound", "Gap bounds and the exact identity");
  bound->require_subcommand(1);
  {
    CLI::App* c = bound->add_subcommand(
        "compose", "Variation times discrepancy bound for f against a dataset");
    c->add_option("--config", bnd.config, "Config JSON")->required();
    c->add_option("--budget", bnd.budget, "Cell budget override");
    c->add_option("--out", bnd.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("bound compose");
      const ordered_json cfg = load_json(bnd.config, rep.inputs);
      const PointSet ps = load_points(cfg.at("points").get<std::string>(), rep.inputs);
      const BoxMeasure nu =
          measure_from_json(resolve_inline_or_path(cfg.at("measure"), rep.inputs));
      const std::uint64_t budget = bnd.budget > 0       ? bnd.budget
                                   : cfg.contains("budget") ? cfg.at("budget").get<std::uint64_t>()
                                                            : env_cell_budget();
      rep.config = {{"config", bnd.config}, {"budget", budget}};
      GapBoundReport out;
      if (cfg.contains("signed")) {
        out = koksma_hlawka_bound(
            signed_from_json(resolve_inline_or_path(cfg.at("signed"), rep.inputs)), ps, nu,
            budget);
      } else {
        const FunctionHandle f =
            builtin_from_json(resolve_inline_or_path(cfg.at("builtin"), rep.inputs));
        VariationMode mode = VariationMode::numeric(6);
        if (cfg.contains("variation")) {
          const ordered_json& jv = cfg.at("variation");
          const std::string kind = jv.at("mode").get<std::string>();
          if (kind == "numeric") mode = VariationMode::numeric(jv.value("level", 6));
          else if (kind == "closed_form")
            mode = VariationMode::closed_form(jv.at("value").get<double>());
          else throw ValidationError("variation mode must be numeric or closed_form");
        }
        out = koksma_hlawka_bound(f, ps, nu, mode, budget);
      }
      return rep.emit(gap_json(out), bnd.out);
    });
  }
  {
    CLI::App* c = bound->add_subcommand(
        "identity", "Exact gap identity for a signed-measure function");
    c->add_option("--config", bnd.config, "Config JSON")->required();
    c->add_option("--out", bnd.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("bound identity");
      const ordered_json cfg = load_json(bnd.config, rep.inputs);
      const SignedAtomicMeasure nf =
          signed_from_json(resolve_inline_or_path(cfg.at("signed"), rep.inputs));
      const BoxMeasure nu =
          measure_from_json(resolve_inline_or_path(cfg.at("measure"), rep.inputs));
      const PointSet ps = load_points(cfg.at("points").get<std::string>(), rep.inputs);
      rep.config = {{"config", bnd.config}};
      const IdentityCheck check = verify_thm1_identity(nf, nu, ps);
      return rep.emit({{"lhs", check.lhs}, {"rhs", check.rhs}, {"residual", check.residual}},
                      bnd.out);
    });
  }
  {
    CLI::App* c = bound->add_subcommand("zero-one", "0-1 loss equality case");
    c->add_option("--config", bnd.config, "Config JSON")->required();
    c->add_option("--out", bnd.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("bound zero-one");
      const ordered_json cfg = load_json(bnd.config, rep.inputs);
      rep.config = {{"config", bnd.config}};
      const GapBoundReport out = zero_one_tightness(
          cfg.at("losses").get<std::vector<int>>(), cfg.at("true_mass_one").get<double>());
      return rep.emit(gap_json(out), bnd.out);
    });
  }
  {
    CLI::App* c = bound->add_subcommand("classwise", "Class-conditional composite bound");
    c->add_option("--config", bnd.config, "Config JSON")->required();
    c->add_option("--out", bnd.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("bound classwise");
      const ordered_json cfg = load_json(bnd.config, rep.inputs);
      std::vector<ClassTerm> classes;
      for (const auto& jc : cfg.at("classes")) {
        ClassTerm term;
        term.p_y = jc.at("p_y").get<double>();
        term.n_y = jc.at("n_y").get<std::uint64_t>();
        term.empirical_loss = jc.at("empirical_loss").get<double>();
        term.variation = jc.at("variation").get<double>();
        classes.push_back(term);
      }
      rep.config = {{"config", bnd.config}};
      const double value = classwise_bound(classes, cfg.at("d_z").get<int>(),
                                           cfg.at("c2").get<double>(),
                                           cfg.at("delta").get<double>());
      return rep.emit({{"bound", value}}, bnd.out);
    });
  }

  // ---- linreg ----------------------------------------------------------------
  struct {
    std::string mode = "thm2", model = "fit", out;
    std::uint64_t seed = 0, m = 0, mc = 0, budget = 0;
    std::vector<int> dims;
    int support = 0;
    double noise = 0.0, ridge = kDefaultRidge;
  } lrv;
  struct {
    std::string out, report;
    std::uint64_t seed = 0, budget = 0;
    std::vector<int> dims;
    std::vector<std::uint64_t> m_list;
    int support = 0, trials = 0;
    double noise = 0.25;
    bool remark5 = false;
  } lrs;
  CLI::App* linreg = app.add_subcommand("linreg", "Synthetic regression bound checks");
  linreg->require_subcommand(1);
  {
    CLI::App* c = linreg->add_subcommand("verify", "Check one regression gap bound");
    c->add_option("--mode", lrv.mode, "thm2 (structured) | thm3 (unstructured)")
        ->check(CLI::IsMember({"thm2", "thm3"}));
    c->add_option("--seed", lrv.seed, "RNG seed")->required();
    c->add_option("--dims", lrv.dims, "d_phi,d_y")->delimiter(',')->required();
    c->add_option("--support", lrv.support, "Atoms in the input measure")->required();
    c->add_option("--m", lrv.m, "Training sample size")->required();
    c->add_option("--noise", lrv.noise, "Noise scale (structured labels)");
    c->add_option("--ridge", lrv.ridge, "Ridge for the least-squares fit");
    c->add_option("--model", lrv.model, "fit | star | zero")
        ->check(CLI::IsMember({"fit", "star", "zero"}));
    c->add_option("--mc", lrv.mc, "Monte Carlo draws for the thm3 expectation (0 = exact)");
    c->add_option("--budget", lrv.budget, "Cell budget override");
    c->add_option("--out", lrv.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("linreg verify");
      if (lrv.dims.size() != 2) throw ValidationError("--dims needs exactly d_phi,d_y");
      const std::uint64_t budget = lrv.budget > 0 ? lrv.budget : env_cell_budget();
      rep.config = {{"mode", lrv.mode},       {"seed", lrv.seed},   {"dims", lrv.dims},
                    {"support", lrv.support}, {"m", lrv.m},         {"noise", lrv.noise},
                    {"ridge", lrv.ridge},     {"model", lrv.model}, {"mc", lrv.mc},
                    {"budget", budget}};
      const LinRegInstance inst = make_instance(derive_seed(lrv.seed, {0}), lrv.dims[0],
                                                lrv.dims[1], lrv.support, lrv.noise);
      const bool structured = lrv.mode == "thm2";
      const TrainingSample sample =
          sample_training(inst, lrv.m, derive_seed(lrv.seed, {1}),
                          structured ? LabelMode::structured : LabelMode::unstructured);
      const Eigen::MatrixXd W = [&]() -> Eigen::MatrixXd {
        if (lrv.model == "fit") return fit_least_squares(sample, lrv.ridge);
        if (lrv.model == "star") return inst.W_star;
        return Eigen::MatrixXd::Zero(lrv.dims[1], lrv.dims[0]);
      }();
      const LinRegReport out =
          structured
              ? verify_thm2(inst, sample, W, budget)
              : verify_thm3(inst, sample, W,
                            lrv.mc > 0 ? ExpectationEstimator::monte_carlo(
                                             lrv.mc, derive_seed(lrv.seed, {2}))
                                       : ExpectationEstimator::exact_product(),
                            budget);
      const int code = rep.emit(linreg_json(out), lrv.out);
      return out.satisfied ? code : 4;
    });
  }
  {
    CLI::App* c = linreg->add_subcommand("study", "Empirical rate table (CSV)");
    c->add_flag("--remark5", lrs.remark5, "Discrepancy and noise-term rates vs references");
    c->add_option("--seed", lrs.seed, "RNG seed")->required();
    c->add_option("--dims", lrs.dims, "d_phi,d_y")->delimiter(',')->required();
    c->add_option("--support", lrs.support, "Atoms in the input measure")->required();
    c->add_option("--noise", lrs.noise, "Noise scale");
    c->add_option("--m-list", lrs.m_list, "Sample sizes, comma-separated")
        ->delimiter(',')
        ->required();
    c->add_option("--trials", lrs.trials, "Trials per sample size")->required();
    c->add_option("--budget", lrs.budget, "Cell budget override");
    c->add_option("--out", lrs.out, "Output CSV path")->required();
    c->add_option("--report", lrs.report, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("linreg study");
      if (!lrs.remark5) throw ValidationError("--remark5 is the only implemented study");
      if (lrs.dims.size() != 2) throw ValidationError("--dims needs exactly d_phi,d_y");
      const std::uint64_t budget = lrs.budget > 0 ? lrs.budget : env_cell_budget();
      rep.config = {{"seed", lrs.seed},   {"dims", lrs.dims},     {"support", lrs.support},
                    {"noise", lrs.noise}, {"m_list", lrs.m_list}, {"trials", lrs.trials},
                    {"budget", budget},   {"csv", lrs.out}};
      const LinRegInstance inst = make_instance(derive_seed(lrs.seed, {0}), lrs.dims[0],
                                                lrs.dims[1], lrs.support, lrs.noise);
      const std::vector<Remark5Row> rows =
          remark5_rates(inst, lrs.m_list, lrs.trials, derive_seed(lrs.seed, {1}), budget);
      std::ostringstream csv;
      csv << "m,median_dstar,median_abs_a2,dstar_reference,a2_reference\n";
      ordered_json jrows = ordered_json::array();
      for (const Remark5Row& row : rows) {
        char line[256];
        std::snprintf(line, sizeof line, "%llu,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<unsigned long long>(row.m), row.median_dstar,
                      row.median_abs_a2, row.dstar_reference, row.a2_reference);
        csv << line;
        jrows.push_back({{"m", row.m},
                         {"median_dstar", row.median_dstar},
                         {"median_abs_a2", row.median_abs_a2},
                         {"dstar_reference", row.dstar_reference},
                         {"a2_reference", row.a2_reference}});
      }
      std::ofstream os(lrs.out, std::ios::binary);
      if (!os) throw ValidationError("cannot write " + lrs.out);
      os << csv.str();
      return rep.emit({{"rows", std::move(jrows)}, {"csv_digest", digest(csv.str())}},
                      lrs.report);
    });
  }

  // ---- suite -----------------------------------------------------------------
  struct {
    std::string out;
    std::uint64_t seed = 0;
    int criterion = 0;
    bool all = false;
  } sui;
  {
    CLI::App* c = app.add_subcommand("suite", "Acceptance property suite");
    CLI::Option* all_opt = c->add_flag("--all", sui.all, "Run all ten criteria");
    CLI::Option* one_opt =
        c->add_option("--criterion", sui.criterion, "Run a single criterion (1..10)");
    all_opt->excludes(one_opt);
    one_opt->excludes(all_opt);
    c->add_option("--seed", sui.seed, "RNG seed")->required();
    c->add_option("--out", sui.out, "Report path (default: stdout)");
    actions.emplace_back(c, [&]() -> int {
      Reporter rep("suite");
      if (!sui.all && sui.criterion == 0)
        throw ValidationError("pass --all or --criterion <1..10>");
      rep.config = {{"seed", sui.seed},
                    {"criteria", sui.all ? "all" : std::to_string(sui.criterion)}};
      std::vector<CriterionResult> results;
      if (sui.all) {
        for (int id = 1; id <= 10; ++id) {
          results.push_back(run_criterion(id, sui.seed));
          const CriterionResult& r = results.back();
          std::cerr << (r.passed ? "PASS" : "FAIL") << "  " << r.id << " " << r.name << " ("
                    << r.seconds << "s): " << r.detail << "\n";
        }
      } else {
        results.push_back(run_criterion(sui.criterion, sui.seed));
        const CriterionResult& r = results.back();
        std::cerr << (r.passed ? "PASS" : "FAIL") << "  " << r.id << " " << r.name << " ("
                  << r.seconds << "s): " << r.detail << "\n";
      }
      bool ok = true;
      ordered_json rows = ordered_json::array();
      for (const CriterionResult& r : results) {
        ok = ok && r.passed;
        rows.push_back({{"id", r.id},
                        {"name", r.name},
                        {"passed", r.passed},
                        {"seconds", r.seconds},
                        {"detail", r.detail}});
      }
      const int code = rep.emit({{"criteria", std::move(rows)}, {"passed", ok}}, sui.out);
      return ok ? code : 4;
    });
  }

  std::vector<const char*> argv;
  argv.push_back("koksma");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (threads > 0) set_worker_count(threads);
    for (auto& [sub, fn] : actions)
      if (sub->parsed()) return fn();
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace koksma
