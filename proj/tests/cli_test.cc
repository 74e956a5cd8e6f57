#include "cli.h"

#include <unistd.h>

#include <filesystem>
#include <sstream>

#include "alo/bench.h"
#include "alo/instance.h"
#include "alo/solution.h"
#include "alo/system_io.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace alo {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
  nlohmann::json Summary() const { return nlohmann::json::parse(out); }
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("alo_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  Result Run(std::vector<std::string> args) const {
    args.insert(args.begin(), "alo");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Result r;
    r.code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  std::string Reference() const {
    std::string path = Path("ref.json");
    if (!fs::exists(path)) Run({"generate", "--reference", "-o", path});
    return path;
  }

  fs::path dir_;
};

TEST_F(CliTest, GenerateReference) {
  Result r = Run({"generate", "--reference", "-o", Path("ref.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(LoadInstance(ReadFile(Path("ref.json"))), AirbusReferenceInstance());
  nlohmann::json s = r.Summary();
  EXPECT_EQ(s["n"], 30);
  EXPECT_EQ(s["N"], 20);
  EXPECT_EQ(s["total_mass"], 57897);
  EXPECT_EQ(s["w_max"], 40000);
  EXPECT_EQ(r.out.find('\n'), r.out.size() - 1);
}

TEST_F(CliTest, GenerateIsDeterministicAndSplitsSizes) {
  Result a = Run({"generate", "-n", "31", "-N", "20", "--seed", "7", "-o", Path("a.json")});
  Result b = Run({"generate", "-n", "31", "-N", "20", "--seed", "7", "-o", Path("b.json")});
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  ASSERT_EQ(b.code, cli::kExitOk) << b.err;
  EXPECT_EQ(ReadFile(Path("a.json")), ReadFile(Path("b.json")));
  EXPECT_EQ(a.Summary()["split"], nlohmann::json::array({16, 10, 5}));
  Result c = Run({"--seed", "8", "generate", "-n", "31", "-o", Path("c.json")});
  ASSERT_EQ(c.code, cli::kExitOk);
  EXPECT_NE(ReadFile(Path("a.json")), ReadFile(Path("c.json")));
}

TEST_F(CliTest, GenerateSeedFromEnvironment) {
  ::setenv("ALO_SEED", "7", 1);
  Result a = Run({"generate", "-n", "12", "-o", Path("a.json")});
  ::unsetenv("ALO_SEED");
  Result b = Run({"generate", "-n", "12", "--seed", "7", "-o", Path("b.json")});
  ASSERT_EQ(a.code, cli::kExitOk);
  ASSERT_EQ(b.code, cli::kExitOk);
  EXPECT_EQ(ReadFile(Path("a.json")), ReadFile(Path("b.json")));
}

TEST_F(CliTest, GenerateUsageErrors) {
  EXPECT_EQ(Run({"generate", "-o", Path("x.json")}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"generate", "-n", "0", "-o", Path("x.json")}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"generate", "--reference", "-n", "4", "-o", Path("x.json")}).code,
            cli::kExitUsage);
  EXPECT_EQ(Run({"generate", "-n", "4", "--n1", "2", "-o", Path("x.json")}).code,
            cli::kExitUsage);
  EXPECT_EQ(Run({"generate", "--n1", "0", "-o", Path("x.json")}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"generate", "-n", "4"}).code, cli::kExitUsage);
  EXPECT_EQ(Run({}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"--help"}).code, cli::kExitOk);
  EXPECT_FALSE(fs::exists(Path("x.json")));
}

TEST_F(CliTest, ExportReference) {
  Result r = Run({"export", Reference(), "--format", "mps", "-o", Path("ref.mps")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  nlohmann::json s = r.Summary();
  EXPECT_EQ(s["rows"], 73);
  EXPECT_EQ(s["vars"], 600);
  EXPECT_EQ(s["n_l"], 6300);
  Instance ref = AirbusReferenceInstance();
  EXPECT_EQ(ReadMps(ReadFile(Path("ref.mps"))), BuildConstraints(ref.spec, ref.payload));

  ASSERT_EQ(Run({"export", Reference(), "--format", "json", "-o", Path("ref.sys")}).code,
            cli::kExitOk);
  EXPECT_EQ(ReadSystemJson(ReadFile(Path("ref.sys"))), BuildConstraints(ref.spec, ref.payload));
}

TEST_F(CliTest, ExportErrors) {
  EXPECT_EQ(Run({"export", Reference(), "--format", "lp", "-o", Path("x")}).code,
            cli::kExitUsage);
  EXPECT_EQ(Run({"export", Path("missing.json"), "-o", Path("x")}).code, cli::kExitIo);
  WriteFile(Path("bad.json"), "{\"schema\": 3");
  EXPECT_EQ(Run({"export", Path("bad.json"), "-o", Path("x")}).code, cli::kExitIo);

  Instance empty;
  empty.spec = DefaultAircraft(4);
  WriteFile(Path("empty.json"), SaveInstance(empty));
  Result r = Run({"export", Path("empty.json"), "-o", Path("x")});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("no containers"), std::string::npos);
  EXPECT_FALSE(fs::exists(Path("x")));
}

TEST_F(CliTest, SolveThenValidate) {
  Result r = Run({"solve", Reference(), "--tau", "0.99", "--clock", "steps", "--budget", "30",
                  "-o", Path("sol.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_GE(r.Summary()["mass"].get<int>(), 39600);
  Result v = Run({"validate", Reference(), Path("sol.json")});
  EXPECT_EQ(v.code, cli::kExitOk) << v.err;
  EXPECT_EQ(v.Summary()["feasible"], true);
}

TEST_F(CliTest, ValidateRejectsTamperedSolution) {
  Instance ref = AirbusReferenceInstance();
  Solution s;
  s.instance = "ref";
  s.placements = {{1, 1}, {2, 1}};  // two size-1 containers in one bin
  s.mass = 2134 + 3455;
  WriteFile(Path("bad.sol"), SaveSolution(s));
  Result r = Run({"validate", Reference(), Path("bad.sol")});
  EXPECT_EQ(r.code, cli::kExitNotReached);
  EXPECT_EQ(r.Summary()["feasible"], false);
  EXPECT_NE(r.err.find("bin"), std::string::npos);

  s.placements = {{1, 1}};
  WriteFile(Path("lie.sol"), SaveSolution(s));
  r = Run({"validate", Reference(), Path("lie.sol")});
  EXPECT_EQ(r.code, cli::kExitNotReached);
  EXPECT_EQ(r.Summary()["mass_matches"], false);
}

TEST_F(CliTest, SolveIsReproducibleWithStepClock) {
  std::vector<std::string> args = {"solve", Reference(), "--tau", "0.99", "--clock", "steps",
                                   "--seed", "4"};
  auto a = args, b = args;
  a.insert(a.end(), {"-o", Path("a.sol")});
  b.insert(b.end(), {"-o", Path("b.sol")});
  ASSERT_EQ(Run(a).code, cli::kExitOk);
  ASSERT_EQ(Run(b).code, cli::kExitOk);
  EXPECT_EQ(ReadFile(Path("a.sol")), ReadFile(Path("b.sol")));
}

TEST_F(CliTest, SolveOutOfBudgetExitsOneWithPartialReport) {
  // A weak fuselage caps the carried mass far below min(W_p, sum m_k).
  GeneratorConfig gen;
  gen.n1 = 150;
  gen.n2 = 100;
  gen.n3 = 50;
  gen.bin_count = 100;
  Instance big = GenerateInstance(gen);
  big.spec.shear_limit.peak = Rational(2000);
  WriteFile(Path("big.json"), SaveInstance(big));
  Result r = Run({"solve", Path("big.json"), "--tau", "0.999", "--budget", "0.01",
                  "--clock", "steps", "-o", Path("big.sol")});
  EXPECT_EQ(r.code, cli::kExitNotReached);
  ASSERT_TRUE(fs::exists(Path("big.sol")));
  Solution s = LoadSolution(ReadFile(Path("big.sol")));
  EXPECT_EQ(s.status, SolveStatus::kBudgetExhausted);
}

TEST_F(CliTest, SolveUsageErrors) {
  EXPECT_EQ(Run({"solve", Reference(), "--tau", "1.5"}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"solve", Reference(), "--mode", "magic"}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"solve", Reference(), "--budget", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"solve", Reference(), "--mode", "exhaustive"}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"--threads", "0", "solve", Reference()}).code, cli::kExitUsage);
}

TEST_F(CliTest, OptimizeCgWritesStageLog) {
  ASSERT_EQ(Run({"generate", "-n", "6", "-N", "4", "--seed", "3", "-o", Path("t.json")}).code,
            cli::kExitOk);
  for (std::string method : {"sequence", "direct"}) {
    Result r = Run({"optimize-cg", Path("t.json"), "--method", method, "--tau", "0.9",
                    "--mode", "branch_and_bound", "-o", Path(method + ".json")});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    auto doc = nlohmann::json::parse(ReadFile(Path(method + ".json")));
    EXPECT_EQ(doc["schema"], "alo-cgopt/1");
    EXPECT_EQ(doc["method"], method);
    EXPECT_FALSE(doc["stages"].empty());
    EXPECT_EQ(doc["stages"].size(), r.Summary()["stages"].get<std::size_t>());
  }
  EXPECT_EQ(Run({"optimize-cg", Path("t.json"), "--epsilon", "abc"}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"optimize-cg", Path("t.json"), "--epsilon", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(Run({"optimize-cg", Path("t.json"), "--method", "both"}).code, cli::kExitUsage);
}

TEST_F(CliTest, BenchWritesOneRowPerInstance) {
  Result r = Run({"bench", "--r", "1", "--N-list", "20", "--count", "2", "--tau", "0.99",
                  "--clock", "steps", "--budget", "10", "-o", Path("bench")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  auto records = ParseBenchCsv(ReadFile(Path("bench/bench.csv")));
  EXPECT_EQ(records.size(), 2u);
  EXPECT_EQ(r.Summary()["records"], 2);
  EXPECT_TRUE(fs::exists(Path("bench/time_vs_nl.svg")));
  EXPECT_EQ(Run({"bench", "--r", "1", "--N-list", "1", "-o", Path("b2")}).code,
            cli::kExitUsage);
  EXPECT_EQ(Run({"bench", "--N-list", "20", "-o", Path("b3")}).code, cli::kExitUsage);
}

TEST_F(CliTest, ReportFitsAndReferenceCurve) {
  std::vector<BenchRecord> recs;
  for (int i = 0; i < 5; ++i) {
    BenchRecord rec;
    rec.r = 1;
    rec.n = 10 * (i + 1);
    rec.bin_count = rec.n;
    rec.n_l = static_cast<std::size_t>(1000) << i;
    rec.status = SolveStatus::kTauReached;
    rec.time_s = ReferenceTime(1, static_cast<double>(rec.n_l));
    rec.mass = rec.w_max = 100;
    recs.push_back(rec);
  }
  WriteFile(Path("in.csv"), WriteBenchCsv(recs));
  Result r = Run({"report", Path("in.csv"), "-o", Path("rep"), "--ref-eq12"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  auto fits = r.Summary()["fits"];
  ASSERT_EQ(fits.size(), 1u);
  EXPECT_NEAR(fits[0]["exponent"].get<double>(), 1.36, 1e-6);
  EXPECT_NE(ReadFile(Path("rep/time_vs_nl.svg")).find("class=\"reference\""), std::string::npos);
  EXPECT_EQ(Run({"report", Path("missing.csv"), "-o", Path("rep")}).code, cli::kExitIo);
}

}  // namespace
}  // namespace alo
