#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "blockfw/cli.hpp"
#include "test_util.hpp"

namespace blockfw {
namespace {

using testing::data_path;

struct CliRun {
  int code = -1;
  std::string out, err;

  std::map<std::string, std::string> kv() const {
    std::map<std::string, std::string> m;
    std::istringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return m;
  }
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("blockfw_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(Cli, CheckExampleMatrixIsMember) {
  const CliRun r = run({"--format", "kv", "check", data_path("ex2.mat"), "--cone", "fw",
                     "--partition", "1 1 1 1"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto kv = r.kv();
  EXPECT_EQ(kv.at("status"), "member");
  EXPECT_EQ(kv.at("pair_blocks"), "6");
  EXPECT_LE(std::stod(kv.at("recompose_residual")), 1e-7);
}

TEST(Cli, CheckCounterexample) {
  const std::string m = data_path("counter6.mat");
  EXPECT_EQ(run({"check", m, "--cone", "fw", "--partition", "1 1 1 1 1 1"}).code, 1);
  EXPECT_EQ(run({"check", m, "--cone", "fw", "--partition", data_path("p222.part")}).code, 0);
  EXPECT_EQ(run({"check", m, "--cone", "psd"}).code, 0);
  EXPECT_EQ(run({"check", m, "--cone", "dd"}).code, 1);
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("blockfw_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

TEST(Cli, CheckDualAndSdd) {
  EXPECT_EQ(run({"check", data_path("ex2.mat"), "--cone", "dual", "--partition", "2 2"}).code, 0);
  // PSD pair blocks but an indefinite whole matrix
  const std::string m = write_temp("dual.mat", "3\n1 1 -1\n1 1 1\n-1 1 1\n");
  const CliRun dual = run({"--format", "kv", "check", m, "--cone", "dual", "--partition", "1 1 1"});
  EXPECT_EQ(dual.code, 0);
  EXPECT_EQ(run({"check", m, "--cone", "psd"}).code, 1);
  const std::string bad = write_temp("dual_bad.mat", "2\n1 2\n2 1\n");
  const CliRun nd = run({"--format", "kv", "check", bad, "--cone", "dual", "--partition", "1 1"});
  EXPECT_EQ(nd.code, 1);
  EXPECT_EQ(nd.kv().at("status"), "non_member");
  EXPECT_EQ(nd.kv().at("worst_pair"), "1,2");
  EXPECT_EQ(run({"check", data_path("ex2.mat"), "--cone", "sdd"}).code, 0);
}

TEST(Cli, DecomposeWritesBlocks) {
  const auto dir = fresh_dir("decompose");
  const CliRun r = run({"decompose", data_path("ex2.mat"), "--partition", "1 1 2", "--out-dir",
                     dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"X_1_2.mat", "X_1_3.mat", "X_2_3.mat"}));
  FwDecomposition dec;
  dec.alpha = make_partition({1, 1, 2});
  dec.blocks.emplace(BlockPair{0, 1}, read_matrix((dir / "X_1_2.mat").string()));
  dec.blocks.emplace(BlockPair{0, 2}, read_matrix((dir / "X_1_3.mat").string()));
  dec.blocks.emplace(BlockPair{1, 2}, read_matrix((dir / "X_2_3.mat").string()));
  const SymMatrix a = read_matrix(data_path("ex2.mat"));
  EXPECT_LE((recompose(dec) - a).frobenius_norm(), 1e-7 * a.frobenius_norm());
  std::filesystem::remove_all(dir);
}

TEST(Cli, CoarsenChecksRefinement) {
  const CliRun ok = run({"--format", "kv", "coarsen", data_path("ex2.mat"), "--partition",
                      "1 1 1 1", "--to", "2 2"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(ok.kv().at("partition"), "2 2");
  EXPECT_EQ(run({"coarsen", data_path("ex2.mat"), "--partition", "1 2 1", "--to", "2 2"}).code,
            65);
}

TEST(Cli, ReformulateThenSolve) {
  const auto dir = fresh_dir("reformulate");
  std::filesystem::create_directories(dir);
  const std::string out = (dir / "fw.dat-s").string();
  const CliRun r = run({"--format", "kv", "reformulate", data_path("broyden3_sos.dat-s"), out,
                     "--partition", "3 3 4", "--keep-zero-pairs"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.kv().at("blocks"), "3");
  const CliRun s = run({"--format", "kv", "solve", out, "--eps", "1e-8", "--max-iters", "100000"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NEAR(std::stod(s.kv().at("objective")), 12.8056, 1e-3);
  std::filesystem::remove_all(dir);
}

TEST(Cli, SolveFixture) {
  const CliRun s = run({"--format", "kv", "--precision", "12", "solve", data_path("diag_blocks.dat-s"),
                     "--eps", "1e-9", "--max-iters", "200000"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NEAR(std::stod(s.kv().at("objective")), 1.2236121813, 1e-6);
}

TEST(Cli, BoundsOutput) {
  const CliRun r = run({"--format", "kv", "bounds", "--n", "6", "--p", "3"});
  ASSERT_EQ(r.code, 0);
  const auto kv = r.kv();
  EXPECT_EQ(kv.at("upper_exact"), "1/3");
  EXPECT_EQ(kv.at("upper"), "0.333333");
  EXPECT_EQ(kv.at("lower"), "0.218218");
  EXPECT_EQ(kv.at("witness_distance"), "0.218218");
  EXPECT_EQ(run({"--format", "kv", "bounds", "--n", "7", "--p", "3"}).kv().count("witness_distance"),
            0u);
}

TEST(Cli, SosCommands) {
  const CliRun q = run({"--format", "kv", "sos", "min", data_path("quartic.poly"), "--eps", "1e-9"});
  ASSERT_EQ(q.code, 0) << q.err;
  EXPECT_NEAR(std::stod(q.kv().at("gamma")), 0.25, 1e-5);
  const CliRun b = run({"--format", "kv", "sos", "min", data_path("broyden3.poly"),
                     "--partition-blocks", "2", "--eps", "1e-8", "--max-iters", "100000"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(b.kv().at("partition"), "5 5");
  const std::string pm = data_path("pmatrix.txt");
  EXPECT_EQ(run({"sos", "matrix", pm, "--shift", "0.315", "--cone", "natural"}).code, 0);
  EXPECT_EQ(run({"sos", "matrix", pm, "--shift", "0.315", "--cone", "trivial"}).code, 1);
}

TEST(Cli, TextFormatAlignsKeys) {
  const CliRun r = run({"bounds", "--n", "6", "--p", "3"});
  ASSERT_EQ(r.code, 0);
  // values start two columns after the longest key
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.find_first_not_of(' ', line.find(' ')), std::string("witness_distance").size() + 2)
        << line;
  }
  EXPECT_NE(r.out.find("upper_exact       1/3\n"), std::string::npos) << r.out;
}

TEST(Cli, UsageAndDataErrors) {
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({"check", data_path("ex2.mat"), "--cone", "cube"}).code, 64);
  EXPECT_EQ(run({"check", data_path("ex2.mat"), "--cone", "fw"}).code, 64);
  EXPECT_EQ(run({"--help"}).code, 0);
  const CliRun missing = run({"check", data_path("missing.mat"), "--cone", "psd"});
  EXPECT_EQ(missing.code, 65);
  EXPECT_FALSE(missing.err.empty());
  EXPECT_EQ(run({"check", data_path("ex2.mat"), "--cone", "fw", "--partition", "3 3"}).code, 65);
  EXPECT_EQ(run({"solve", write_temp("short.dat-s", "1\n1\n2\n1.0\n1 1 1 1\n")}).code, 65);
}

}  // namespace
}  // namespace blockfw
