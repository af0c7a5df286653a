#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
  auto dir = fs::temp_directory_path() / "etlra_test_cli";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + ETLRA_CLI_PATH + " " + args + " > " +
                          (work_dir() / "stdout.txt").string() + " 2> " + (work_dir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<json> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

json strip_times(json rec) {
  rec.erase("times");
  return rec;
}

}  // namespace

TEST(Cli, RelativeWithOracle) {
  const auto out = work_dir() / "rel.jsonl";
  fs::remove(out);
  ASSERT_EQ(run("lra --task relative --n 64 --d 64 --r 3 --p 2 --k 4 --eps 0.5 --num-seeds 20 -o " + out.string()), 0);
  const auto recs = read_lines(out);
  ASSERT_EQ(recs.size(), 20u);
  int satisfied = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].at("seed"), i);
    EXPECT_TRUE(recs[i].at("achieved_error").is_number());
    EXPECT_TRUE(recs[i].at("oracle_opt").is_number());
    for (const char* stage : {"expand", "sketch", "solve", "verify"}) EXPECT_TRUE(recs[i].at("times").contains(stage));
    if (recs[i].at("bound_satisfied").get<bool>()) ++satisfied;
  }
  EXPECT_GE(satisfied, 16);
  EXPECT_TRUE(fs::exists(work_dir() / "rel.csv"));
}

TEST(Cli, ConfigFileAndDeterminism) {
  const auto cfg = work_dir() / "cfg.json";
  write_file(cfg, R"({"task": "additive", "n": 40, "d": 30, "r": 3, "p": 2, "k": 3, "eps": 0.5,
                     "seeds": [5, 3, 9], "mT": 32, "oracle": true})");
  const auto a = work_dir() / "a.jsonl";
  const auto b = work_dir() / "b.jsonl";
  ASSERT_EQ(run("lra --config " + cfg.string() + " --threads 3 -o " + a.string()), 0);
  ASSERT_EQ(run("lra --config " + cfg.string() + " --threads 1 -o " + b.string()), 0);
  const auto ra = read_lines(a);
  const auto rb = read_lines(b);
  ASSERT_EQ(ra.size(), 3u);
  EXPECT_EQ(ra[0].at("seed"), 5);
  EXPECT_EQ(ra[1].at("seed"), 3);
  EXPECT_EQ(ra[2].at("seed"), 9);
  EXPECT_TRUE(ra[0].contains("l2"));
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(strip_times(ra[i]), strip_times(rb[i]));
}

TEST(Cli, FlagsOverrideConfig) {
  const auto cfg = work_dir() / "cfg2.json";
  write_file(cfg, R"({"task": "relative", "n": 20, "d": 20, "r": 2, "p": 2, "k": 2, "seeds": [1]})");
  const auto out = work_dir() / "ov.jsonl";
  ASSERT_EQ(run("lra --config " + cfg.string() + " --n 25 --oracle false -o " + out.string()), 0);
  const auto recs = read_lines(out);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].at("n"), 25);
  EXPECT_TRUE(recs[0].at("achieved_error").is_null());
}

TEST(Cli, MalformedConfigExitsTwoWithoutOutput) {
  const auto cfg = work_dir() / "bad.json";
  write_file(cfg, "{\"task\": \"relative\", \"n\": ");
  const auto out = work_dir() / "never.jsonl";
  fs::remove(out);
  EXPECT_EQ(run("lra --config " + cfg.string() + " -o " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, InvalidConfigsExitTwo) {
  const auto out = work_dir() / "never2.jsonl";
  fs::remove(out);
  EXPECT_EQ(run("lra --eps 0 -o " + out.string()), 2);
  EXPECT_EQ(run("lra --p 3 -o " + out.string()), 2);
  EXPECT_EQ(run("lra --n 0 -o " + out.string()), 2);
  EXPECT_EQ(run("lra --bogus"), 2);
  const auto cfg = work_dir() / "unknown.json";
  write_file(cfg, R"({"nn": 3})");
  EXPECT_EQ(run("lra --config " + cfg.string() + " -o " + out.string()), 2);
  write_file(cfg, R"({"seeds": []})");
  EXPECT_EQ(run("lra --config " + cfg.string() + " -o " + out.string()), 2);
  write_file(cfg, R"({"task": "reduction"})");
  EXPECT_EQ(run("lra --config " + cfg.string() + " -o " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, ResourceCeilingExitsThree) {
  EXPECT_EQ(run("lra --n 8 --d 8 --r 4 --p 10 --k 2 --oracle false", "ETLRA_MEMORY_CEILING=4096"), 3);
}

TEST(Cli, GenPlantedAndReduce) {
  const auto inst = work_dir() / "nopair.json";
  ASSERT_EQ(run("gen --kind planted-ovp --n 32 --d 32 --s 12 --pairs 0 --seeds 4 -o " + inst.string()), 0);
  std::ifstream gen_out(work_dir() / "stdout.txt");
  EXPECT_EQ(json::parse(gen_out).at("orthogonal_pairs"), 0);

  const auto out = work_dir() / "reduce.jsonl";
  ASSERT_EQ(run("reduce --instance " + inst.string() + " --p 1 --num-seeds 5 -o " + out.string()), 0);
  const auto recs = read_lines(out);
  ASSERT_EQ(recs.size(), 5u);
  for (const auto& rec : recs) EXPECT_EQ(rec.at("decision"), "NO");

  const auto one = work_dir() / "onepair.json";
  ASSERT_EQ(run("gen --kind planted-ovp --n 32 --d 32 --s 12 --pairs 1 --seeds 2 -o " + one.string()), 0);
  std::ifstream one_out(work_dir() / "stdout.txt");
  EXPECT_EQ(json::parse(one_out).at("orthogonal_pairs"), 1);
}

TEST(Cli, GenInfeasibleExitsTwo) {
  EXPECT_EQ(run("gen --kind planted-ovp --n 64 --d 64 --s 2 --pairs 3 -o " + (work_dir() / "x.json").string()), 2);
  EXPECT_EQ(run("gen --kind nonsense -o " + (work_dir() / "x").string()), 2);
}

TEST(Cli, GenUnitNormL2) {
  const auto prefix = work_dir() / "unit";
  ASSERT_EQ(run("gen --kind unit-norm --n 16 --d 12 --r 3 --p 2 -o " + prefix.string()), 0);
  std::ifstream in(work_dir() / "stdout.txt");
  EXPECT_NEAR(json::parse(in).at("l2").get<double>(), 16.0 * 12.0, 1e-9);
  EXPECT_TRUE(fs::exists(prefix.string() + ".U.bin"));

  const auto out = work_dir() / "fromfile.jsonl";
  ASSERT_EQ(run("lra --U " + prefix.string() + ".U.bin --V " + prefix.string() + ".V.bin --p 2 --k 2 -o " +
                out.string()),
            0);
  EXPECT_EQ(read_lines(out).front().at("d"), 12);
}

TEST(Cli, Bench) {
  const auto mv = work_dir() / "mv.jsonl";
  ASSERT_EQ(run("bench --task matvec-bench --n 50 --d 40 --r 3 --p 3 --num-seeds 3 -o " + mv.string()), 0);
  for (const auto& rec : read_lines(mv)) EXPECT_LT(rec.at("relative_difference").get<double>(), 1e-8);

  const auto lv = work_dir() / "lv.jsonl";
  ASSERT_EQ(run("bench --task leverage-check --n 128 --t 8 --num-seeds 2 -o " + lv.string()), 0);
  for (const auto& rec : read_lines(lv)) EXPECT_NEAR(rec.at("exact_sum").get<double>(), 8.0, 1e-6);
}

TEST(Cli, StdoutWhenNoOutput) {
  ASSERT_EQ(run("lra --n 16 --d 16 --r 2 --p 2 --k 2 --seeds 1,2"), 0);
  EXPECT_EQ(read_lines(work_dir() / "stdout.txt").size(), 2u);
}
