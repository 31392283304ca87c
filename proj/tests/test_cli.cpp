#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "qsvm/data.hpp"
#include "qsvm/matrix_io.hpp"
#include "qsvm/report.hpp"
#include "qsvm/svm.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using testutil::run_command;

namespace {

const std::string kCli = QSVM_CLI;
const std::string kTiny = std::string(QSVM_FIXTURE_DIR) + "/tiny.csv";
const std::string kSmall = " --data " + kTiny + " --train 100 --test 50";

std::string cli(const std::string& args) { return kCli + " " + args + " 2>/dev/null"; }

fs::path temp_dir() {
  const fs::path p = fs::path(testing::TempDir()) / ("qsvm_cli_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run_command(cli("--help")).status, 0); }

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_command(cli("")).status, 2);
  EXPECT_EQ(run_command(cli("frobnicate")).status, 2);
  EXPECT_EQ(run_command(cli("bench --splits 2")).status, 2);  // --seed is mandatory
  EXPECT_EQ(run_command(cli("bench --seed 1 --no-such-flag")).status, 2);
  EXPECT_EQ(run_command(cli("bench --seed 1 --format yaml")).status, 2);
  EXPECT_EQ(run_command(cli("bench --seed 1 --splits 0" + kSmall)).status, 2);
  EXPECT_EQ(run_command(cli("align --pca 9" + kSmall)).status, 2);
}

TEST(Cli, InvalidConfigFileIsUsageError) {
  const auto dir = temp_dir();
  write_file(dir / "bad.json", R"({"splits": 2, "unknown_key": true})");
  EXPECT_EQ(run_command(cli("bench --seed 1 --config " + (dir / "bad.json").string() + kSmall)).status, 2);
  EXPECT_EQ(run_command(cli("bench --seed 1 --config " + (dir / "missing.json").string() + kSmall)).status, 2);
}

TEST(Cli, DataErrors) {
  const auto dir = temp_dir();
  EXPECT_EQ(run_command(cli("prep --data " + (dir / "none.csv").string())).status, 3);
  write_file(dir / "bad.csv", std::string(qsvm::kPixelHeader) + "\na,1,2,3,4,2,0\n");
  EXPECT_EQ(run_command(cli("prep --data " + (dir / "bad.csv").string())).status, 3);
  // tiny fixture cannot supply 800 training pixels
  EXPECT_EQ(run_command(cli("bench --seed 1 --splits 1 --data " + kTiny + " --out " + (dir / "r.txt").string())).status, 3);
}

TEST(Cli, ConfigFileOverridesFlags) {
  const auto dir = temp_dir();
  write_file(dir / "cfg.json", R"({"splits": 1, "spsa_iters": 0})");
  const auto r = run_command(cli("bench --seed 3 --splits 5 --spsa-iters 9 --format json --config " +
                                 (dir / "cfg.json").string() + kSmall));
  ASSERT_EQ(r.status, 0);
  const auto report = qsvm::report_from_json(r.out);
  EXPECT_EQ(report.config.n_splits, 1);
  EXPECT_EQ(report.splits.size(), 1u);
  EXPECT_EQ(report.config.spsa.iterations, 0);
}

TEST(Cli, BenchTinyReproducible) {
  const auto dir = temp_dir();
  const std::string args = "bench --seed 7 --splits 2 --spsa-iters 5" + kSmall + " --out ";
  ASSERT_EQ(run_command(cli(args + (dir / "a.txt").string())).status, 0);
  ASSERT_EQ(run_command(cli(args + (dir / "b.txt").string())).status, 0);
  const std::string a = slurp(dir / "a.txt");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b.txt"));
  EXPECT_NE(a.find("Average"), std::string::npos);
}

TEST(Cli, BenchJsonParses) {
  const auto r = run_command(cli("bench --seed 7 --splits 2 --spsa-iters 2 --format json" + kSmall));
  ASSERT_EQ(r.status, 0);
  const auto report = qsvm::report_from_json(r.out);
  EXPECT_EQ(report.splits.size(), 2u);
  EXPECT_EQ(report.config.seed, 7u);
}

TEST(Cli, BenchFailureWritesPartial) {
  const auto dir = temp_dir();
  const auto out = dir / "fail.txt";
  EXPECT_EQ(run_command(cli("bench --seed 1 --splits 2 --data " + kTiny + " --out " + out.string())).status, 3);
  EXPECT_TRUE(fs::exists(out.string() + ".partial"));
}

TEST(Cli, KernelExactSymmetricUnitDiagonal) {
  const auto r = run_command(cli("kernel --mode exact --n 4" + kSmall));
  ASSERT_EQ(r.status, 0);
  std::istringstream in(r.out);
  const auto K = qsvm::read_matrix(in);
  ASSERT_EQ(K.rows(), 4);
  ASSERT_EQ(K.cols(), 4);
  EXPECT_EQ(K, K.transpose());
  for (int i = 0; i < 4; ++i) EXPECT_EQ(K(i, i), 1.0);
}

TEST(Cli, KernelRbfAndThetaJson) {
  auto r = run_command(cli("kernel --kind rbf --n 3 --format json" + kSmall));
  ASSERT_EQ(r.status, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n"], 3);
  r = run_command(cli("kernel --n 3 --theta 0.1,0.2,0.3,0.4" + kSmall));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(run_command(cli("kernel --n 3 --theta 0.1,0.2" + kSmall)).status, 0);
}

TEST(Cli, AlignZeroIterations) {
  const auto r = run_command(cli("align --iters 0 --format json" + kSmall));
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["T_f"], j["T_i"]);
  EXPECT_EQ(j["trace"].size(), 1u);
}

TEST(Cli, AlignTextTrace) {
  const auto r = run_command(cli("align --iters 4" + kSmall));
  ASSERT_EQ(r.status, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iter,alignment");
  int rows = 0;
  while (std::getline(in, line) && line.front() != '{') ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_NO_THROW(nlohmann::json::parse(line));
}

TEST(Cli, TrainWritesArtifacts) {
  const auto dir = temp_dir();
  const auto r = run_command(cli("train --spsa-iters 3 --format json" + kSmall + " --model-out " +
                                 (dir / "h.model").string() + " --rbf-model-out " + (dir / "r.model").string() +
                                 " --sidecar-out " + (dir / "p.txt").string()));
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GE(j["hSVM"].get<double>(), 0.0);
  EXPECT_LE(j["SVM"].get<double>(), 1.0);
  std::ifstream h(dir / "h.model"), rb(dir / "r.model"), p(dir / "p.txt");
  const auto hm = qsvm::read_model(h);
  EXPECT_EQ(hm.support.size(), j["hSVM_support"].get<std::size_t>());
  EXPECT_TRUE(std::holds_alternative<qsvm::RbfKernel>(qsvm::read_model(rb).kernel));
  EXPECT_NO_THROW(qsvm::read_pipeline(p));
}

TEST(Cli, PrepStatsAndExport) {
  const auto dir = temp_dir();
  const auto r = run_command(cli("prep --format json --data " + kTiny + " --export " + (dir / "sel.csv").string()));
  ASSERT_EQ(r.status, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["candidate_pixels"], 200);
  EXPECT_EQ(j["candidate_cloud"], 100);
  EXPECT_EQ(qsvm::load_pixels(dir / "sel.csv").size(), 200u);
}
