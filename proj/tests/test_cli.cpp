// End-to-end tests of the command-line binary. The binary path comes from the
// MNCLUST_BIN environment variable set by CTest.

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mnclust/io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace mnclust;
using testsupport::random_dataset;

namespace {

std::string binary() {
  const char* env = std::getenv("MNCLUST_BIN");
  REQUIRE_MESSAGE(env != nullptr, "MNCLUST_BIN must point at the CLI binary");
  return env;
}

int run(const std::string& args) {
  std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
};

void write_toy_dataset(const std::string& path) {
  // Two well-separated 1-D pairs; variances small enough that merging the
  // near-duplicates beats singletons under the flat prior.
  std::ofstream(path) << R"({
    "dimension": 1,
    "items": [
      {"id": "a", "mean": [-10.0], "covariance": [[0.01]]},
      {"id": "b", "mean": [-10.05], "covariance": [[0.01]]},
      {"id": "c", "mean": [10.0], "covariance": [[0.01]]},
      {"id": "d", "mean": [10.05], "covariance": [[0.01]]}
    ]
  })";
}

}  // namespace

TEST_CASE("simulate writes a dataset and is seed-deterministic") {
  TempDir dir("mnclust_cli_sim");
  std::string config = dir / "config.json";
  std::ofstream(config) << R"({"dim": 3, "cluster_sizes": [3, 2],
                              "n_candidates": 2000, "seed": 7})";
  REQUIRE(run("simulate --config " + config + " --out " + (dir / "run1")) == 0);
  CHECK(fs::exists(dir / "run1/dataset.json"));
  CHECK(fs::exists(dir / "run1/truth.csv"));
  CHECK(fs::exists(dir / "run1/manifest.json"));

  REQUIRE(run("simulate --config " + config + " --out " + (dir / "run2")) == 0);
  CHECK(slurp(dir / "run1/dataset.json") == slurp(dir / "run2/dataset.json"));

  // A different seed changes the payload.
  REQUIRE(run("simulate --config " + config + " --seed 8 --out " +
              (dir / "run3")) == 0);
  CHECK(slurp(dir / "run1/dataset.json") != slurp(dir / "run3/dataset.json"));

  Dataset data = load_dataset(dir / "run1/dataset.json");
  CHECK(data.size() == 5);
  CHECK(data.dim() == 3);
}

TEST_CASE("select writes curve, summary, and per-k assignments") {
  TempDir dir("mnclust_cli_select");
  std::string dataset = dir / "toy.json";
  write_toy_dataset(dataset);
  REQUIRE(run("select --input " + dataset + " --k-min 1 --k-max 4 " +
              "--prior normal --prior-sigma2 1.0 --out " + (dir / "sel")) == 0);
  std::string curve = slurp(dir / "sel/curve.csv");
  CHECK(curve.rfind("k,neg_loglik_flat,neg_loglik_normal,chisq,dof,p_value\n",
                    0) == 0);
  for (int k = 1; k <= 4; ++k) {
    CHECK(fs::exists(dir / ("sel/assignment_k" + std::to_string(k) + ".csv")));
  }
  std::string summary = slurp(dir / "sel/summary.json");
  CHECK(summary.find("\"best_k_flat\": 2") != std::string::npos);
  CHECK(summary.find("\"best_k_normal\": 2") != std::string::npos);
  CHECK(summary.find("\"fewest_k_equal_means\": 2") != std::string::npos);
}

TEST_CASE("cluster at k = n yields singletons with total zero") {
  TempDir dir("mnclust_cli_cluster");
  std::string dataset = dir / "toy.json";
  write_toy_dataset(dataset);
  REQUIRE(run("cluster --input " + dataset + " --k 4 --out " +
              (dir / "out")) == 0);
  Dataset data = load_dataset(dataset);
  Partition p = load_assignment(dir / "out/assignment.csv", data);
  CHECK(p == Partition::all_singletons(4));
  auto breakdown = nlohmann::json::parse(slurp(dir / "out/breakdown.json"));
  CHECK(std::abs(breakdown.at("total").get<double>()) < 1e-6);
}

TEST_CASE("greedy cluster run recovers the separated toy and reruns identically") {
  TempDir dir("mnclust_cli_greedy");
  std::string dataset = dir / "toy.json";
  write_toy_dataset(dataset);
  std::string flags = "cluster --input " + dataset +
                      " --search greedy --restarts 5 --seed 3 --out ";
  REQUIRE(run(flags + (dir / "a")) == 0);
  REQUIRE(run(flags + (dir / "b")) == 0);
  CHECK(slurp(dir / "a/assignment.csv") == slurp(dir / "b/assignment.csv"));
  Dataset data = load_dataset(dataset);
  Partition p = load_assignment(dir / "a/assignment.csv", data);
  CHECK(p == Partition::from_labels({0, 0, 1, 1}));
}

TEST_CASE("evaluate scores an assignment and fails cleanly on bad input") {
  TempDir dir("mnclust_cli_eval");
  std::string dataset = dir / "toy.json";
  write_toy_dataset(dataset);
  std::string assignment = dir / "assign.csv";
  std::ofstream(assignment) << "id,cluster\na,1\nb,2\nc,3\nd,4\n";
  REQUIRE(run("evaluate --input " + dataset + " --assignment " + assignment +
              " --out " + (dir / "rep")) == 0);
  auto report = nlohmann::json::parse(slurp(dir / "rep/report.json"));
  CHECK(std::abs(report.at("breakdown").at("total").get<double>()) < 1e-6);

  // Missing id -> validation failure, exit 2.
  std::ofstream(assignment) << "id,cluster\na,1\nb,2\nc,3\n";
  CHECK(run("evaluate --input " + dataset + " --assignment " + assignment) == 2);
}

TEST_CASE("exit codes distinguish validation from numeric failures") {
  TempDir dir("mnclust_cli_exit");
  CHECK(run("select --input " + (dir / "missing.json") + " --out " +
            (dir / "x")) == 2);
  CHECK(run("bogus-subcommand") == 2);

  std::string bad = dir / "bad.json";
  std::ofstream(bad) << R"({
    "dimension": 1,
    "items": [{"id": "a", "mean": [0.0], "covariance": [[-1.0]]}]
  })";
  CHECK(run("select --input " + bad + " --out " + (dir / "y")) == 3);
}
