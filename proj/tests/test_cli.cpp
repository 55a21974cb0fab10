#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "koksma/bounds.hpp"
#include "koksma/cli.hpp"
#include "koksma/common.hpp"
#include "koksma/discrepancy.hpp"
#include "koksma/point_set.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const fs::path& fixture_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "koksma_cli_tests";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string path_of(const std::string& name) { return (fixture_dir() / name).string(); }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  REQUIRE(os.good());
  os << text;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ordered_json read_report(const std::string& path) {
  return ordered_json::parse(read_file(path));
}

int run(const std::vector<std::string>& args) { return koksma::run_cli(args); }

}  // namespace

TEST_CASE("cli: point generation writes parseable csv and a report") {
  const std::string csv = path_of("halton.csv");
  const std::string rep = path_of("halton_report.json");
  REQUIRE(run({"points", "--kind", "halton", "--m", "32", "--d", "2", "--csv", csv,
               "--out", rep}) == 0);

  std::ifstream is(csv);
  const koksma::PointSet ps = koksma::read_points_csv(is);
  CHECK(ps.d == 2);
  CHECK(ps.size() == 32);
  const koksma::PointSet direct = koksma::halton(32, 2);
  for (std::size_t k = 0; k < ps.coords.size(); ++k)
    CHECK(ps.coords[k] == direct.coords[k]);

  const ordered_json j = read_report(rep);
  CHECK(j.at("schema") == "koksma/1");
  CHECK(j.at("command") == "points");
  CHECK(j.at("result").at("m") == 32);
  CHECK(j.at("result").at("digest").get<std::string>().rfind("0x", 0) == 0);
  CHECK(j.contains("wall_time_ms"));
}

TEST_CASE("cli: point generation argument validation") {
  const std::string csv = path_of("bad.csv");
  CHECK(run({"points", "--kind", "vdc", "--m", "8", "--d", "2", "--csv", csv}) == 2);
  CHECK(run({"points", "--kind", "random", "--m", "8", "--csv", csv}) == 2);
  CHECK(run({"points", "--kind", "sobol", "--m", "8", "--csv", csv}) == 2);
  CHECK(run({"points", "--kind", "halton", "--csv", csv}) == 2);
}

TEST_CASE("cli: exact discrepancy matches the library and echoes config") {
  const std::string csv = path_of("disc_points.csv");
  const std::string mea = path_of("uniform2.json");
  const std::string rep = path_of("disc_report.json");
  REQUIRE(run({"points", "--kind", "halton", "--m", "32", "--d", "2", "--csv", csv}) == 0);
  write_file(mea, R"({"variant":"uniform","d":2})");
  REQUIRE(run({"discrepancy", "--points", csv, "--measure", mea, "--exact", "--out", rep}) ==
          0);

  const koksma::DiscrepancyResult direct =
      koksma::star_discrepancy_exact(koksma::halton(32, 2), koksma::BoxMeasure::uniform(2));
  const ordered_json j = read_report(rep);
  CHECK(j.at("result").at("value").get<double>() == direct.value);
  CHECK(j.at("result").at("exact") == true);
  CHECK(j.at("result").at("cells_evaluated").get<std::uint64_t>() == direct.cells_evaluated);
  const auto witness = j.at("result").at("witness").get<std::vector<double>>();
  REQUIRE(witness.size() == direct.witness.size());
  for (std::size_t k = 0; k < witness.size(); ++k) CHECK(witness[k] == direct.witness[k]);
  CHECK(j.at("config").at("mode") == "exact");
  CHECK(j.at("inputs").size() == 2);
}

TEST_CASE("cli: reports are byte-identical across worker counts") {
  const int saved = koksma::worker_count();
  const std::string csv = path_of("det_points.csv");
  const std::string mea = path_of("det_atomic.json");
  const std::string rep1 = path_of("det_report_t1.json");
  const std::string rep4 = path_of("det_report_t4.json");
  REQUIRE(run({"points", "--kind", "random", "--m", "40", "--d", "2", "--seed", "9",
               "--csv", csv}) == 0);
  write_file(mea,
             R"({"variant":"atomic","d":2,"atoms":[[0.2,0.3],[0.7,0.1],[0.5,0.9]],)"
             R"("weights":[0.5,0.25,0.25]})");
  REQUIRE(run({"--threads", "1", "discrepancy", "--points", csv, "--measure", mea, "--out",
               rep1}) == 0);
  REQUIRE(run({"--threads", "4", "discrepancy", "--points", csv, "--measure", mea, "--out",
               rep4}) == 0);
  ordered_json a = read_report(rep1);
  ordered_json b = read_report(rep4);
  a.erase("wall_time_ms");
  b.erase("wall_time_ms");
  CHECK(a.dump() == b.dump());
  koksma::set_worker_count(saved);
}

TEST_CASE("cli: discrepancy failure modes map to exit codes") {
  const std::string csv = path_of("fail_points.csv");
  const std::string mea = path_of("fail_measure.json");
  REQUIRE(run({"points", "--kind", "random", "--m", "30", "--d", "2", "--seed", "3",
               "--csv", csv}) == 0);
  write_file(mea, R"({"variant":"uniform","d":2})");

  CHECK(run({"discrepancy", "--points", csv, "--measure", mea, "--budget", "10"}) == 3);
  CHECK(run({"discrepancy", "--points", path_of("missing.csv"), "--measure", mea}) == 2);

  const std::string badcsv = path_of("headerless.csv");
  write_file(badcsv, "0.5,0.5\n");
  CHECK(run({"discrepancy", "--points", badcsv, "--measure", mea}) == 2);

  const std::string badjson = path_of("broken.json");
  write_file(badjson, "{\"variant\":");
  CHECK(run({"discrepancy", "--points", csv, "--measure", badjson}) == 2);

  const std::string badvariant = path_of("badvariant.json");
  write_file(badvariant, R"({"variant":"gaussian","d":2})");
  CHECK(run({"discrepancy", "--points", csv, "--measure", badvariant}) == 2);

  CHECK(run({"discrepancy", "--points", csv, "--measure", mea, "--exact", "--lower-bound",
             "5"}) == 2);
  CHECK(run({"discrepancy", "--points", csv, "--measure", mea, "--lower-bound", "5"}) == 2);
}

TEST_CASE("cli: cell budget can come from the environment") {
  const std::string csv = path_of("env_points.csv");
  const std::string mea = path_of("env_measure.json");
  REQUIRE(run({"points", "--kind", "random", "--m", "30", "--d", "2", "--seed", "4",
               "--csv", csv}) == 0);
  write_file(mea, R"({"variant":"uniform","d":2})");
  setenv("KOKSMA_CELL_BUDGET", "10", 1);
  CHECK(run({"discrepancy", "--points", csv, "--measure", mea}) == 3);
  setenv("KOKSMA_CELL_BUDGET", "junk", 1);
  CHECK(run({"discrepancy", "--points", csv, "--measure", mea}) == 2);
  unsetenv("KOKSMA_CELL_BUDGET");
  CHECK(run({"discrepancy", "--points", csv, "--measure", mea}) == 0);
}

TEST_CASE("cli: certified lower bound never exceeds the exact value") {
  const std::string csv = path_of("lb_points.csv");
  const std::string mea = path_of("lb_measure.json");
  const std::string repx = path_of("lb_exact.json");
  const std::string repl = path_of("lb_lower.json");
  REQUIRE(run({"points", "--kind", "random", "--m", "24", "--d", "2", "--seed", "5",
               "--csv", csv}) == 0);
  write_file(mea, R"({"variant":"uniform","d":2})");
  REQUIRE(run({"discrepancy", "--points", csv, "--measure", mea, "--out", repx}) == 0);
  REQUIRE(run({"discrepancy", "--points", csv, "--measure", mea, "--lower-bound", "20",
               "--seed", "17", "--out", repl}) == 0);
  const ordered_json jx = read_report(repx);
  const ordered_json jl = read_report(repl);
  CHECK(jl.at("result").at("exact") == false);
  CHECK(jl.at("result").at("value").get<double>() <=
        jx.at("result").at("value").get<double>() + 1e-12);
  CHECK(jl.at("config").at("mode") == "lower-bound");
}

TEST_CASE("cli: variation subcommand covers builtins and signed specs") {
  const std::string rep = path_of("var_report.json");
  REQUIRE(run({"variation", "--f", "builtin:product", "--d", "2", "--level", "3",
               "--serial", "--out", rep}) == 0);
  const ordered_json j = read_report(rep);
  CHECK(j.at("result").at("arity") == 2);
  CHECK(j.at("result").at("vitali").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j.at("result").at("vitali_serial").get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j.at("result").at("hardy_krause").at("total").get<double>() ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(j.at("result").at("hardy_krause").at("per_subset").size() == 3);

  const std::string sgn = path_of("signed.json");
  write_file(sgn, R"({"d":2,"locations":[[0.5,0.5],[0.8,0.2]],"weights":[1.5,-0.5],)"
                  R"("offset":0.25})");
  const std::string rep2 = path_of("var_signed.json");
  REQUIRE(run({"variation", "--f", "signed:" + sgn, "--level", "4", "--out", rep2}) == 0);
  const ordered_json j2 = read_report(rep2);
  CHECK(j2.at("result").at("arity") == 2);
  CHECK(j2.at("result").at("vitali").get<double>() >= 0.0);

  const std::string rep3 = path_of("var_quad.json");
  const std::string mats = path_of("mats.json");
  write_file(mats, R"({"W_hat":[[0.8]],"W_star":[[0.3]]})");
  REQUIRE(run({"variation", "--f", "builtin:quadratic-loss", "--config", mats, "--level",
               "6", "--out", rep3}) == 0);
  CHECK(read_report(rep3).at("result").at("vitali").get<double>() ==
        doctest::Approx(0.125).epsilon(1e-6));

  CHECK(run({"variation", "--f", "builtin:spline", "--d", "2"}) == 2);
  CHECK(run({"variation", "--f", "product"}) == 2);
  CHECK(run({"variation", "--f", "builtin:product", "--d", "3", "--level", "9"}) == 3);
}

TEST_CASE("cli: bound subcommands") {
  const std::string csv = path_of("bound_points.csv");
  REQUIRE(run({"points", "--kind", "random", "--m", "20", "--d", "2", "--seed", "8",
               "--csv", csv}) == 0);

  const std::string compose = path_of("compose.json");
  write_file(compose, std::string(R"({"points":")") + csv + R"(",)" +
                          R"("measure":{"variant":"uniform","d":2},)" +
                          R"("signed":{"d":2,"locations":[[0.5,0.5]],"weights":[2.0],)" +
                          R"("offset":-1.0}})");
  const std::string repc = path_of("compose_report.json");
  REQUIRE(run({"bound", "compose", "--config", compose, "--out", repc}) == 0);
  const ordered_json jc = read_report(repc);
  CHECK(jc.at("result").at("satisfied") == true);
  CHECK(jc.at("result").at("variation").get<double>() == 2.0);
  CHECK_FALSE(jc.at("result").at("gap").is_null());

  const std::string identity = path_of("identity.json");
  write_file(identity, std::string(R"({"points":")") + csv + R"(",)" +
                           R"("measure":{"variant":"uniform","d":2},)" +
                           R"("signed":{"d":2,"locations":[[0.5,0.5]],"weights":[2.0],)" +
                           R"("offset":-1.0}})");
  const std::string repi = path_of("identity_report.json");
  REQUIRE(run({"bound", "identity", "--config", identity, "--out", repi}) == 0);
  CHECK(read_report(repi).at("result").at("residual").get<double>() <= 1e-12);

  const std::string zeroone = path_of("zeroone.json");
  write_file(zeroone, R"({"losses":[0,1,1,0],"true_mass_one":0.3})");
  const std::string repz = path_of("zeroone_report.json");
  REQUIRE(run({"bound", "zero-one", "--config", zeroone, "--out", repz}) == 0);
  const ordered_json jz = read_report(repz);
  CHECK(jz.at("result").at("gap").get<double>() == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(jz.at("result").at("equality") == true);

  const std::string classwise = path_of("classwise.json");
  write_file(classwise,
             R"({"classes":[{"p_y":1.0,"n_y":100,"empirical_loss":0.1,"variation":2.0}],)"
             R"("d_z":4,"c2":1.0,"delta":0.05})");
  const std::string repw = path_of("classwise_report.json");
  REQUIRE(run({"bound", "classwise", "--config", classwise, "--out", repw}) == 0);
  const double expect =
      koksma::classwise_bound({koksma::ClassTerm{1.0, 100, 0.1, 2.0}}, 4, 1.0, 0.05);
  CHECK(read_report(repw).at("result").at("bound").get<double>() == expect);

  CHECK(run({"bound", "compose", "--config", path_of("nonexistent.json")}) == 2);
  CHECK(run({"bound"}) == 2);
}

TEST_CASE("cli: linreg verify in both modes") {
  const std::string rep2 = path_of("linreg_thm2.json");
  REQUIRE(run({"linreg", "verify", "--mode", "thm2", "--seed", "11", "--dims", "2,1",
               "--support", "5", "--m", "24", "--noise", "0.2", "--out", rep2}) == 0);
  const ordered_json j2 = read_report(rep2);
  CHECK(j2.at("result").at("satisfied") == true);
  CHECK(j2.at("config").at("mode") == "thm2");
  CHECK_FALSE(j2.at("result").contains("M"));

  const std::string repstar = path_of("linreg_star.json");
  REQUIRE(run({"linreg", "verify", "--mode", "thm2", "--seed", "11", "--dims", "2,1",
               "--support", "5", "--m", "24", "--noise", "0.2", "--model", "star",
               "--out", repstar}) == 0);
  CHECK(read_report(repstar).at("result").at("variation_bound").get<double>() == 0.0);

  const std::string rep3 = path_of("linreg_thm3.json");
  REQUIRE(run({"linreg", "verify", "--mode", "thm3", "--seed", "12", "--dims", "1,1",
               "--support", "4", "--m", "16", "--out", rep3}) == 0);
  const ordered_json j3 = read_report(rep3);
  CHECK(j3.at("result").at("satisfied") == true);
  CHECK(j3.at("result").contains("M"));

  CHECK(run({"linreg", "verify", "--mode", "thm2", "--seed", "1", "--dims", "2",
             "--support", "4", "--m", "8"}) == 2);
}

TEST_CASE("cli: linreg study writes the rate table") {
  const std::string csv = path_of("rates.csv");
  const std::string rep = path_of("rates_report.json");
  REQUIRE(run({"linreg", "study", "--remark5", "--seed", "21", "--dims", "2,1",
               "--support", "5", "--noise", "0.25", "--m-list", "8,16", "--trials", "5",
               "--out", csv, "--report", rep}) == 0);
  const std::string text = read_file(csv);
  CHECK(text.rfind("m,median_dstar,median_abs_a2,dstar_reference,a2_reference\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);  // header plus one row per sample size

  const ordered_json j = read_report(rep);
  CHECK(j.at("result").at("rows").size() == 2);
  const std::string want =
      "0x" + koksma::hex_u64(koksma::fnv1a64(
                 {reinterpret_cast<const unsigned char*>(text.data()), text.size()}));
  CHECK(j.at("result").at("csv_digest") == want);

  CHECK(run({"linreg", "study", "--seed", "21", "--dims", "2,1", "--support", "5",
             "--m-list", "8", "--trials", "2", "--out", csv}) == 2);
}

TEST_CASE("cli: suite runs a single fast criterion") {
  const std::string rep = path_of("suite_report.json");
  REQUIRE(run({"suite", "--criterion", "4", "--seed", "7", "--out", rep}) == 0);
  const ordered_json j = read_report(rep);
  CHECK(j.at("result").at("passed") == true);
  REQUIRE(j.at("result").at("criteria").size() == 1);
  CHECK(j.at("result").at("criteria")[0].at("id") == 4);
  CHECK(j.at("result").at("criteria")[0].at("passed") == true);

  CHECK(run({"suite", "--seed", "7"}) == 2);
  CHECK(run({"suite", "--criterion", "42", "--seed", "7"}) == 2);
  CHECK(run({"suite", "--all", "--criterion", "3", "--seed", "7"}) == 2);
}

TEST_CASE("cli: top-level parse behavior") {
  CHECK(run({}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"--help"}) == 0);
  CHECK(run({"points", "--help"}) == 0);
}
