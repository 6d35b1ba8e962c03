#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "katz/katz.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + KATZ_CLI_PATH + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("katz_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name)) << content;
    return path(name);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

// ==== katz-expand ====

TEST_F(CliTest, ExpandConstant) {
  const auto in = write("one.txt", "1\n");
  const auto r = run("katz-expand --p 5 --n 3 --prec 2 --input " + in);
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["N"], 2);
  ASSERT_EQ(j["components"].size(), 4U);
  EXPECT_EQ(j["components"][0]["coords"], nlohmann::json::parse(R"([{"j":0,"value":1}])"));
  EXPECT_EQ(j["components"][3]["coords"], nlohmann::json::parse(R"([{"j":1,"value":0}])"));
}

TEST_F(CliTest, ExpandMatchesLibrary) {
  const unsigned long p = 7;
  const long n = 9;
  const int c = 6;
  const auto m = katz::build_matrix(p, n, katz::RingSpec(p, c));
  const auto ratio = katz::eis_ratio_by_s(p, 2, c, m.size());
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& x : ratio.coeffs()) arr.push_back(katz::integer_json(x));
  const auto in = write("ratio.json", arr.dump());
  const auto out = path("out.json");
  const auto r = run("katz-expand --p 7 --n 9 --prec 6 --input " + in + " --out " + out);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(out)), katz::katz_tuple_json(katz::psi(m, ratio), m.size()));
}

TEST_F(CliTest, ExpandErrors) {
  const auto bad = write("bad.txt", "1\nfoo\n");
  EXPECT_EQ(run("katz-expand --p 5 --n 3 --prec 2 --input " + bad).code, 2);
  const auto long_input = write("long.txt", "1\n2\n3\n");
  EXPECT_EQ(run("katz-expand --p 5 --n 3 --prec 2 --input " + long_input).code, 3);
  const auto ok = write("ok.txt", "1\n");
  EXPECT_EQ(run("katz-expand --n 3 --prec 2 --input " + ok).code, 2);
  EXPECT_EQ(run("katz-expand --p 4 --n 3 --prec 2 --input " + ok).code, 2);
  EXPECT_EQ(run("katz-expand --p 5 --n 3 --prec 2 --input " + path("missing.txt")).code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

// ==== valuations ====

TEST_F(CliTest, ValuationsRowZero) {
  const auto r = run("valuations --p 5 --r 0 --lambda 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "i,j,status,value,gamma\n0,0,exact,0,1\n");
}

TEST_F(CliTest, ValuationsJZeroInconclusive) {
  const auto r = run("valuations --p 5 --r 3 --lambda 8");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "i,j,status,value,gamma");
  EXPECT_EQ(first.rfind("3,0,inconclusive,,", 0), 0U) << first;
}

TEST_F(CliTest, ValuationsMatchLibrary) {
  const auto r = run("valuations --p 7 --r 12 --weights 1,2,3,4,5,6,8,9,10,11 --jmax 9");
  ASSERT_EQ(r.code, 0);
  std::ostringstream expected;
  katz::write_row_csv(expected, katz::solve_row(7, 12, 10, 9));
  EXPECT_EQ(r.out, expected.str());
}

TEST_F(CliTest, ValuationsErrors) {
  EXPECT_EQ(run("valuations --p 5 --r 3 --weights 1,5").code, 2);
  EXPECT_EQ(run("valuations --p 5 --r 3 --weights 1,1").code, 2);
  EXPECT_EQ(run("valuations --p 5 --r 3").code, 2);
  EXPECT_EQ(run("valuations --p 5 --r 3 --lambda 4 --weights 1,2").code, 2);
  EXPECT_EQ(run("valuations --p 5 --r 3 --lambda 4 --jmax 4").code, 2);
}

// ==== sweep ====

TEST_F(CliTest, SweepPFive) {
  const auto csv = path("p5.csv");
  const auto r = run("sweep --p 5 --imax 36 --checkpoint " + path("ck.json") + " --out " + csv);
  ASSERT_EQ(r.code, 0);
  const auto summary = nlohmann::json::parse(r.out);
  EXPECT_EQ(summary["d_prime"], "2/15");
  EXPECT_NE(std::find(summary["attained"].begin(), summary["attained"].end(), 30), summary["attained"].end());
  EXPECT_EQ(summary["c_p"], "11/144");
  EXPECT_EQ(summary["d_p_conj"], "2/15");
  EXPECT_TRUE(summary["audits"]["c_p_violations"].empty());
  EXPECT_EQ(slurp(csv).rfind("i,j,status,value,gamma\n1,0,", 0), 0U);
  EXPECT_EQ(katz::load_checkpoint(path("ck.json")).completed_rows.size(), 36U);
}

TEST_F(CliTest, SweepResumeIsIdentical) {
  const auto full_csv = path("full.csv");
  ASSERT_EQ(run("sweep --p 7 --imax 40 --out " + full_csv).code, 0);

  katz::SweepOptions interrupted;
  interrupted.checkpoint = path("ck.json");
  interrupted.max_new_rows = 17;
  katz::run_sweep(7, 40, std::nullopt, interrupted);
  const auto resumed_csv = path("resumed.csv");
  ASSERT_EQ(run("sweep --p 7 --imax 40 --resume --checkpoint " + path("ck.json") + " --out " + resumed_csv).code, 0);
  EXPECT_EQ(slurp(resumed_csv), slurp(full_csv));
}

TEST_F(CliTest, SweepDeterministicAcrossThreadCounts) {
  const auto a = run("sweep --p 7 --imax 30 --out " + path("a.csv"), "KATZ_THREADS=1");
  const auto b = run("sweep --p 7 --imax 30 --out " + path("b.csv"), "KATZ_THREADS=4");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
}

TEST_F(CliTest, SweepErrors) {
  EXPECT_EQ(run("sweep --p 4 --imax 10").code, 2);
  EXPECT_EQ(run("sweep --p 5").code, 2);
  EXPECT_EQ(run("sweep --p 5 --imax 3 --resume").code, 2);
  const auto corrupt = write("corrupt.json", R"({"version": 1, "p": 5})");
  EXPECT_EQ(run("sweep --p 5 --imax 3 --resume --checkpoint " + corrupt).code, 5);
  const auto garbage = write("garbage.json", "not json");
  EXPECT_EQ(run("sweep --p 5 --imax 3 --resume --checkpoint " + garbage).code, 5);
}
