#include "etlra/instances.hpp"
#include "etlra/io.hpp"
#include "etlra/random.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <limits>
#include <sstream>

using namespace etlra;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "etlra_test_io";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(MatrixContainer, RoundTrip) {
  Matrix m = rng::uniform_matrix(5, 3, 1);
  m(0, 0) = -0.0;
  m(1, 1) = std::numeric_limits<double>::denorm_min();
  std::stringstream buf;
  io::write_matrix(buf, m);
  EXPECT_EQ(buf.str().size(), 4u + 1u + 16u + 15u * 8u);
  const Matrix back = io::read_matrix(buf);
  ASSERT_EQ(back.rows(), 5);
  ASSERT_EQ(back.cols(), 3);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 3; ++j)
      EXPECT_EQ(std::bit_cast<std::uint64_t>(back(i, j)), std::bit_cast<std::uint64_t>(m(i, j)));
}

TEST(MatrixContainer, Layout) {
  Matrix m(1, 2);
  m << 1.0, 2.0;
  std::stringstream buf;
  io::write_matrix(buf, m);
  const std::string s = buf.str();
  EXPECT_EQ(s.substr(0, 4), "ETLM");
  EXPECT_EQ(s[4], 1);
  EXPECT_EQ(s[5], 1);
  EXPECT_EQ(s[13], 2);
  // 1.0 = 0x3ff0000000000000, little-endian.
  EXPECT_EQ(static_cast<unsigned char>(s[21 + 7]), 0x3f);
  EXPECT_EQ(static_cast<unsigned char>(s[21 + 6]), 0xf0);
}

TEST(MatrixContainer, Malformed) {
  std::stringstream bad_magic("XXXX");
  EXPECT_THROW(io::read_matrix(bad_magic), io::FormatError);

  std::stringstream buf;
  io::write_matrix(buf, Matrix::Ones(2, 2));
  std::string s = buf.str();
  std::string wrong_version = s;
  wrong_version[4] = 9;
  std::stringstream v(wrong_version);
  EXPECT_THROW(io::read_matrix(v), io::FormatError);
  std::stringstream truncated(s.substr(0, s.size() - 3));
  EXPECT_THROW(io::read_matrix(truncated), io::FormatError);
  std::stringstream header(s.substr(0, 9));
  EXPECT_THROW(io::read_matrix(header), io::FormatError);
  EXPECT_THROW(io::load_matrix("/nonexistent/etlra.bin"), io::FormatError);
}

TEST(Csv, Parse) {
  std::stringstream in("# comment\n1, 2,3\n\n4,5,6.5\n");
  const Matrix m = io::read_csv(in);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 3);
  EXPECT_EQ(m(1, 2), 6.5);
  std::stringstream ragged("1,2\n3\n");
  EXPECT_THROW(io::read_csv(ragged), io::FormatError);
  std::stringstream junk("1,abc\n");
  EXPECT_THROW(io::read_csv(junk), io::FormatError);
}

TEST(Files, LoadAny) {
  const auto dir = temp_dir();
  const Matrix m = rng::uniform_matrix(3, 4, 2);
  io::save_matrix((dir / "m.bin").string(), m);
  EXPECT_EQ(io::load_matrix_any((dir / "m.bin").string()), m);
  {
    std::ofstream out(dir / "m.csv");
    out << "1,2\n3,4\n";
  }
  const Matrix c = io::load_matrix_any((dir / "m.csv").string());
  EXPECT_EQ(c(1, 0), 3.0);
}

TEST(Instance, JsonRoundTrip) {
  instances::PlantedOvpParams params;
  params.n = 10;
  params.d = 12;
  params.s = 8;
  const OvpInstance inst = instances::planted_ovp(params, 3);
  const auto path = (temp_dir() / "inst.json").string();
  io::save_instance(path, inst);
  const OvpInstance back = io::load_instance(path);
  EXPECT_EQ(back.a, inst.a);
  EXPECT_EQ(back.b, inst.b);
  EXPECT_EQ(back.planted, inst.planted);
}

TEST(Instance, JsonErrors) {
  using nlohmann::json;
  EXPECT_THROW(io::instance_from_json(json{{"s", 2}, {"A", {"01"}}, {"B", {"012"}}}), io::FormatError);
  EXPECT_THROW(io::instance_from_json(json{{"s", 2}, {"A", {"0x"}}, {"B", {"01"}}}), io::FormatError);
  EXPECT_THROW(io::instance_from_json(json{{"s", 2}, {"A", json::array()}, {"B", {"01"}}}), io::FormatError);
  EXPECT_THROW(io::instance_from_json(json{{"A", {"01"}}}), io::FormatError);
  EXPECT_THROW(io::instance_from_json(json{{"s", 2}, {"A", {"01"}}, {"B", {"01"}}, {"planted", {{0, 0}}}}),
               io::FormatError);
  const OvpInstance ok =
      io::instance_from_json(json{{"s", 2}, {"A", {"01"}}, {"B", {"10"}}, {"planted", {{0, 0}}}});
  EXPECT_EQ(ok.planted.size(), 1u);
}

TEST(Factors, SaveWritesThreeFiles) {
  RankKFactors rk;
  rk.k = 2;
  rk.left = rng::uniform_matrix(4, 2, 1);
  rk.right = rng::uniform_matrix(2, 5, 2);
  rk.achieved_error = 0.5;
  const auto prefix = (temp_dir() / "fac").string();
  io::save_factors(prefix, rk, 0.5, 7);
  EXPECT_EQ(io::load_matrix(prefix + ".left.bin"), rk.left);
  EXPECT_EQ(io::load_matrix(prefix + ".right.bin"), rk.right);
  std::ifstream meta_in(prefix + ".json");
  const auto meta = nlohmann::json::parse(meta_in);
  EXPECT_EQ(meta.at("k"), 2);
  EXPECT_EQ(meta.at("seed"), 7);
  EXPECT_EQ(meta.at("achievedError"), 0.5);
}

TEST(Trace, Json) {
  ReductionTrace t;
  t.decision = Decision::Yes;
  t.path = DecisionPath::PairFound;
  t.found_pair = std::make_pair<Index, Index>(1, 2);
  t.residuals = Vector::Zero(2);
  t.sign_column = Vector::Ones(2);
  const auto j = io::to_json(t);
  EXPECT_EQ(j.at("decision"), "YES");
  EXPECT_EQ(j.at("decision_path"), "pair-found");
  EXPECT_EQ(j.at("found_pair")[1], 2);
}
