#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "extreg/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

CliResult run_cli(const std::string& args, const fs::path& work) {
  const fs::path out_file = work / "stdout.txt";
  const fs::path err_file = work / "stderr.txt";
  const std::string command = std::string(EXTREG_CLI_PATH) + " " + args + " > " +
                              out_file.string() + " 2> " + err_file.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

struct Fixture {
  fs::path dir;

  Fixture() {
    dir = fs::temp_directory_path() / "extreg_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    extreg::write_dataset_csv((dir / "prob.csv").string(),
                              oracles::random_dataset(3001, 30, 2));
    extreg::write_dataset_csv((dir / "nonprob.csv").string(),
                              oracles::random_dataset(3002, 40, 2, 2.0));
    std::ofstream empty(dir / "empty.csv");
    empty << "y,x1,x2\n";
  }
  ~Fixture() { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("extend workflow") {
  Fixture fx;

  SUBCASE("writes schema-stable artifacts") {
    const auto result = run_cli("extend --prob " + fx.path("prob.csv") + " --nonprob " +
                                    fx.path("nonprob.csv") +
                                    " --response y --seed 7 --out " + fx.path("run1"),
                                fx.dir);
    CHECK(result.exit_code == 0);
    CHECK(first_line(slurp(fx.dir / "run1" / "decisions.csv")) ==
          "id,studentized,rel_change,pass_residual,pass_change,degenerate,included");
    CHECK(first_line(slurp(fx.dir / "run1" / "coefficients.csv")) ==
          "term,base,extended,se_naive");
    CHECK(first_line(slurp(fx.dir / "run1" / "summary.csv")) == "key,value");
  }

  SUBCASE("empty non-probability file reproduces the base fit") {
    const auto result = run_cli("extend --prob " + fx.path("prob.csv") + " --nonprob " +
                                    fx.path("empty.csv") +
                                    " --response y --seed 7 --out " + fx.path("run2"),
                                fx.dir);
    REQUIRE(result.exit_code == 0);
    std::ifstream coef(fx.dir / "run2" / "coefficients.csv");
    std::string line;
    std::getline(coef, line);  // header
    while (std::getline(coef, line)) {
      std::istringstream row(line);
      std::string term, base, extended;
      std::getline(row, term, ',');
      std::getline(row, base, ',');
      std::getline(row, extended, ',');
      CHECK(base == extended);
    }
  }

  SUBCASE("reruns with one seed are byte-identical") {
    const std::string args = "extend --prob " + fx.path("prob.csv") + " --nonprob " +
                             fx.path("nonprob.csv") + " --response y --seed 11 --out ";
    run_cli(args + fx.path("a"), fx.dir);
    run_cli(args + fx.path("b"), fx.dir);
    for (const char* name : {"decisions.csv", "coefficients.csv", "summary.csv"})
      CHECK(slurp(fx.dir / "a" / name) == slurp(fx.dir / "b" / name));
  }
}

TEST_CASE("bootstrap workflow adds the bootstrap column") {
  Fixture fx;
  const auto result = run_cli(
      "bootstrap --prob " + fx.path("prob.csv") + " --nonprob " +
          fx.path("nonprob.csv") +
          " --response y --n-boot 25 --seed 3 --out " + fx.path("boot"),
      fx.dir);
  REQUIRE(result.exit_code == 0);
  CHECK(first_line(slurp(fx.dir / "boot" / "coefficients.csv")) ==
        "term,base,extended,se_naive,se_bootstrap");
}

TEST_CASE("cv workflow reports the score grid") {
  Fixture fx;
  const auto result =
      run_cli("cv --prob " + fx.path("prob.csv") + " --nonprob " +
                  fx.path("nonprob.csv") + " --response y --k 4 --seed 5 --out " +
                  fx.path("cv"),
              fx.dir);
  REQUIRE(result.exit_code == 0);
  const std::string scores = slurp(fx.dir / "cv" / "cv_scores.csv");
  CHECK(first_line(scores) == "alpha_st,alpha_ch,score,valid,selected");
  CHECK(std::count(scores.begin(), scores.end(), '\n') == 5);  // header + grid
}

TEST_CASE("robustify workflow writes the reduced sample") {
  Fixture fx;
  const auto result =
      run_cli("robustify --prob " + fx.path("prob.csv") +
                  " --response y --seed 5 --out " + fx.path("rob"),
              fx.dir);
  REQUIRE(result.exit_code == 0);
  const extreg::Dataset original =
      extreg::load_csv(fx.path("prob.csv"), "y");
  const extreg::Dataset reduced =
      extreg::load_csv((fx.dir / "rob" / "reduced.csv").string(), "y");
  CHECK(reduced.n() <= original.n());
  CHECK(reduced.n() >= original.n() / 2);
  // every reduced row appears verbatim in the original
  for (Eigen::Index i = 0; i < reduced.n(); ++i) {
    bool found = false;
    for (Eigen::Index j = 0; j < original.n() && !found; ++j)
      found = reduced.responses(i) == original.responses(j) &&
              reduced.predictors.row(i) == original.predictors.row(j);
    CHECK(found);
  }
}

TEST_CASE("simulate workflow") {
  Fixture fx;
  const std::string scenario = std::string(EXTREG_SCENARIO_DIR) + "/uni_sign_flip.cfg";
  const auto result = run_cli("simulate --scenario " + scenario +
                                  " --n-datasets 5 --seed 9 --out " + fx.path("sim"),
                              fx.dir);
  REQUIRE(result.exit_code == 0);
  CHECK(first_line(slurp(fx.dir / "sim" / "replications.csv")) ==
        "replication,metric,value");
  CHECK(first_line(slurp(fx.dir / "sim" / "aggregates.csv")) == "metric,mean,sd,count");
  CHECK(first_line(slurp(fx.dir / "sim" / "se_table.csv")) == "method,term,value");
}

TEST_CASE("json output parses") {
  Fixture fx;
  const auto result = run_cli("extend --prob " + fx.path("prob.csv") + " --nonprob " +
                                  fx.path("nonprob.csv") +
                                  " --response y --seed 7 --format json --out " +
                                  fx.path("json"),
                              fx.dir);
  REQUIRE(result.exit_code == 0);
  for (const char* name : {"decisions.json", "coefficients.json", "summary.json"}) {
    const auto parsed = nlohmann::json::parse(slurp(fx.dir / "json" / name));
    CHECK(!parsed.empty());
  }
}

TEST_CASE("failures produce a machine-readable error line") {
  Fixture fx;

  SUBCASE("missing input file") {
    const auto result =
        run_cli("extend --prob " + fx.path("missing.csv") + " --nonprob " +
                    fx.path("nonprob.csv") + " --response y --out " + fx.path("x"),
                fx.dir);
    CHECK(result.exit_code == 1);
    CHECK(first_line(result.err).rfind("error code=io_error message=", 0) == 0);
  }

  SUBCASE("bad alpha") {
    const auto result = run_cli(
        "extend --prob " + fx.path("prob.csv") + " --nonprob " +
            fx.path("nonprob.csv") +
            " --response y --alpha-st 1.5 --alpha-ch 0.05 --out " + fx.path("x"),
        fx.dir);
    CHECK(result.exit_code == 1);
    CHECK(first_line(result.err).rfind("error code=domain_error", 0) == 0);
  }

  SUBCASE("unknown flag is a usage error") {
    const auto result = run_cli("extend --nope", fx.dir);
    CHECK(result.exit_code != 0);
  }
}
