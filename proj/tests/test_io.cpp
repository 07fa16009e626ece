#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "blockfw/io.hpp"
#include "test_util.hpp"

namespace blockfw {
namespace {

using testing::data_path;

ConicProgram parse_sdpa(const std::string& text) {
  std::istringstream in(text);
  return read_sdpa(in, "t");
}

ErrorKind sdpa_error_kind(const std::string& text) {
  try {
    parse_sdpa(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorKind::numeric;
}

TEST(ReadSdpa, MinimalProgram) {
  const ConicProgram p = read_sdpa(data_path("minimal.dat-s"));
  EXPECT_EQ(p.block_sizes, std::vector<int>{2});
  EXPECT_EQ(p.rhs, std::vector<double>{1.0});
  EXPECT_EQ(p.objective.entries, (std::vector<SymEntry>{{0, 0, 0, 1.0}}));
  ASSERT_EQ(p.num_constraints(), 1);
  EXPECT_EQ(p.constraints[0].entries, (std::vector<SymEntry>{{0, 0, 0, 1.0}}));
}

TEST(ReadSdpa, PunctuationAndLowerTriangle) {
  const ConicProgram p = parse_sdpa("* comment\n1 =mdim\n1\n{2}\n{3.5}\n0 1 2 1 -1\n1 1 1 1 1\n");
  EXPECT_EQ(p.objective.entries, (std::vector<SymEntry>{{0, 0, 1, -1.0}}));
  EXPECT_EQ(p.rhs, std::vector<double>{3.5});
}

TEST(ReadSdpa, DiagonalBlocksExpand) {
  const ConicProgram p = parse_sdpa("1\n2\n2 -3\n1\n0 2 3 3 5\n1 1 1 2 1\n1 2 1 1 4\n");
  EXPECT_EQ(p.block_sizes, (std::vector<int>{2, 1, 1, 1}));
  EXPECT_EQ(p.objective.entries, (std::vector<SymEntry>{{3, 0, 0, 5.0}}));
  EXPECT_EQ(p.constraints[0].entries, (std::vector<SymEntry>{{0, 0, 1, 1.0}, {1, 0, 0, 4.0}}));
}

TEST(ReadSdpa, RejectsBadInput) {
  EXPECT_EQ(sdpa_error_kind("1\n1\n2\n1.0\n1 2 1 1 1.0\n"), ErrorKind::validation);
  EXPECT_EQ(sdpa_error_kind("1\n1\n2\n1.0\n2 1 1 1 1.0\n"), ErrorKind::validation);
  EXPECT_EQ(sdpa_error_kind("1\n1\n2\n1.0\n1 1 1 3 1.0\n"), ErrorKind::validation);
  EXPECT_EQ(sdpa_error_kind("1\n1\n-2\n1.0\n1 1 1 2 1.0\n"), ErrorKind::validation);
  EXPECT_EQ(sdpa_error_kind("1\n1\n2\n1.0\n1 1 1 1\n"), ErrorKind::parse);
  EXPECT_EQ(sdpa_error_kind("1\n1\n2\n1.0\n1 1 1 1 nan\n"), ErrorKind::parse);
  EXPECT_EQ(sdpa_error_kind("1\n1\n"), ErrorKind::parse);
  EXPECT_EQ(sdpa_error_kind("1\n0\n"), ErrorKind::parse);
}

TEST(ReadSdpa, ErrorsCarryLineNumbers) {
  try {
    parse_sdpa("1\n1\n2\n1.0\n0 1 1 1 1\n1 1 x 1 1.0\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("t:6:"), std::string::npos) << e.what();
  }
}

TEST(WriteSdpa, FixturesRoundTripExactly) {
  for (const char* name : {"minimal.dat-s", "diag_blocks.dat-s", "broyden3_sos.dat-s",
                           "broyden3_fw2.dat-s", "broyden3_fw3.dat-s"}) {
    const ConicProgram p = read_sdpa(data_path(name));
    std::ostringstream out;
    write_sdpa(p, out);
    EXPECT_EQ(parse_sdpa(out.str()), p) << name;
  }
}

TEST(WriteSdpa, NonRepresentableValuesSurvive) {
  ConicProgram p;
  p.block_sizes = {3};
  p.objective.entries = {{0, 0, 2, 0.1}, {0, 1, 1, 1.0 / 3.0}};
  p.constraints = {LinearForm{{{0, 2, 2, -2.0 / 7.0}}}};
  p.rhs = {1e-300};
  std::ostringstream out;
  write_sdpa(p, out);
  EXPECT_EQ(parse_sdpa(out.str()), p);
}

TEST(ReadMatrix, ExampleFixture) {
  const SymMatrix a = read_matrix(data_path("ex2.mat"));
  EXPECT_EQ(a, (SymMatrix{{6, 8, -2, -2}, {8, 16, 1, 1}, {-2, 1, 10, -1}, {-2, 1, -1, 24}}));
  std::ostringstream out;
  write_matrix(a.dense(), out);
  std::istringstream in(out.str());
  EXPECT_EQ(read_matrix(in), a);
}

TEST(ReadMatrix, RejectsBadInput) {
  auto kind = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_matrix(in);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::numeric;
  };
  EXPECT_EQ(kind("2\n1 2\n3 1\n"), ErrorKind::validation);
  EXPECT_EQ(kind("2\n1 2\n2\n"), ErrorKind::parse);
  EXPECT_EQ(kind("2\n1 0\n0 1\n5\n"), ErrorKind::parse);
  EXPECT_EQ(kind(""), ErrorKind::parse);
}

TEST(ReadPoly, QuarticFixture) {
  const PolynomialForm p = read_poly(data_path("quartic.poly"));
  EXPECT_EQ(p.n_vars(), 1);
  EXPECT_EQ(p.coefficient({4}), 1.0);
  EXPECT_EQ(p.coefficient({2}), -1.0);
  EXPECT_EQ(p.terms().size(), 2u);
  std::istringstream bad("nvars 1\n1 -2\n");
  EXPECT_THROW(read_poly(bad), Error);
  std::istringstream short_term("nvars 2\n1 2\n");
  EXPECT_THROW(read_poly(short_term), Error);
}

TEST(ReadPolymatrix, FixtureIsSymmetric) {
  const PolyMatrix p = read_polymatrix(data_path("pmatrix.txt"));
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p[0][0].coefficient({2, 0}), 4.0);
  EXPECT_EQ(p[2][2].coefficient({0, 2}), 25.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(p[i][j].terms(), p[j][i].terms());
  }
  std::istringstream lower("nvars 1\nsize 2\n2 1 1 0\n");
  EXPECT_THROW(read_polymatrix(lower), Error);
}

TEST(ParsePartition, TextAndFile) {
  EXPECT_EQ(parse_partition("2 2 2"), make_partition({2, 2, 2}));
  EXPECT_EQ(parse_partition("1\n3 # tail\n"), make_partition({1, 3}));
  EXPECT_EQ(read_partition(data_path("p222.part")), make_partition({2, 2, 2}));
  EXPECT_THROW(parse_partition(""), Error);
  EXPECT_THROW(parse_partition("2 0"), Error);
  EXPECT_THROW(parse_partition("2 x"), Error);
  EXPECT_THROW(read_partition(data_path("missing.part")), Error);
}

}  // namespace
}  // namespace blockfw
