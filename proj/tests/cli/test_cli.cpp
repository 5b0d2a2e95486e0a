#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kCli = TRACELAB_CLI_PATH;
const fs::path kExamples = TRACELAB_EXAMPLES_DIR;

struct Run {
  int status = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "tracelab_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Run run(const std::string& args) {
  const auto err = scratch("stderr.txt");
  const std::string cmd = kCli.string() + " " + args + " 2>" + err.string() + " >/dev/null";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

fs::path write(const std::string& name, const std::string& text) {
  const auto p = scratch(name);
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST(Cli, HardyYoungEqualityCase) {
  const auto out = scratch("hy.json");
  const auto r = run("verify " + (kExamples / "verify_hardy_young_indicator.json").string() +
                     " --out " + out.string());
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rep = load(out);
  EXPECT_TRUE(rep["pass"].get<bool>());
  const auto& rows = rep["members"];
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_NEAR(rows[0]["ratio"].get<double>(), 1.0, 0.01);
}

TEST(Cli, ZeroForcingGivesZeroReport) {
  const auto out = scratch("zero.json");
  const auto r = run("solve " + (kExamples / "solve_zero.json").string() + " --out " + out.string());
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rep = load(out);
  for (const char* k : {"derivative_norm", "operator_norm", "forcing_norm", "maxreg_ratio", "residual"}) {
    EXPECT_EQ(rep[k].get<double>(), 0.0) << k;
  }
  for (const auto& t : rep["trace"]) {
    EXPECT_EQ(t["sup_norm"].get<double>(), 0.0);
    EXPECT_EQ(t["weighted_sup_norm"].get<double>(), 0.0);
  }
}

TEST(Cli, MalformedJsonWritesNothing) {
  const auto cfg = write("bad.json", "{\"schema_version\": 1, \"alpha\": ");
  const auto out = scratch("bad_out.json");
  fs::remove(out);
  const auto r = run("solve " + cfg.string() + " --out " + out.string());
  EXPECT_EQ(r.status, 2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(r.err.find("malformed JSON"), std::string::npos);
}

TEST(Cli, SchemaViolationsNameThePointer) {
  const auto missing = write("nover.json", R"({"alpha": 0.5})");
  auto r = run("solve " + missing.string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("/schema_version"), std::string::npos) << r.err;

  const auto typo = write("typo.json", R"({"schema_version": 1,
    "family": {"kind": "tensor"},
    "check": {"kind": "HardyYoung", "policy": {"max_ration": 2}}})");
  r = run("verify " + typo.string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("/check/policy/max_ration"), std::string::npos) << r.err;

  const auto bad_k = write("badk.json", R"({"schema_version": 1, "alpha": 0.5, "beta": 1,
    "time": {"step": 0.1, "count": 10}, "space": {"modes": 8},
    "forcing": [{"k": [9], "re": 1, "profile": {"shape": "constant"}}]})");
  r = run("solve " + bad_k.string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("/forcing/0/k"), std::string::npos) << r.err;
}

TEST(Cli, HypothesisViolationIsConfigurationError) {
  const auto cfg = write("hyp.json", R"({"schema_version": 1,
    "family": {"kind": "tensor", "size": 1},
    "check": {"kind": "Trace", "space0": {"s": 0.4, "p": 2}, "space1": {"s": 0, "p": 2}}})");
  const auto r = run("verify " + cfg.string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("hypotheses"), std::string::npos) << r.err;
}

TEST(Cli, PolicyFailureExitsOne) {
  const auto cfg = write("fail.json", R"({"schema_version": 1,
    "family": {"kind": "tensor", "size": 1, "profile": "indicator", "width": [1, 1]},
    "check": {"kind": "HardyYoung", "hardy_p": 1, "hardy_beta": 0.5,
              "policy": {"max_ratio": 0.5}}})");
  const auto out = scratch("fail_out.json");
  const auto r = run("verify " + cfg.string() + " --out " + out.string());
  EXPECT_EQ(r.status, 1);
  const auto rep = load(out);
  EXPECT_FALSE(rep["pass"].get<bool>());
  EXPECT_FALSE(rep["failures"].empty());
}

TEST(Cli, UnknownCommandAndMissingFile) {
  EXPECT_EQ(run("integrate x.json").status, 2);
  EXPECT_EQ(run("solve " + scratch("does_not_exist.json").string()).status, 2);
  EXPECT_EQ(run("solve " + (kExamples / "solve_zero.json").string() + " --format csv").status, 2);
}

TEST(Cli, SameConfigAndSeedGiveIdenticalBytes) {
  const auto a = scratch("det_a.json");
  const auto b = scratch("det_b.json");
  const auto c = scratch("det_c.json");
  const auto cfg = (kExamples / "stoch_single_mode.json").string();
  ASSERT_EQ(run("stoch " + cfg + " --seed 5 --out " + a.string()).status, 0);
  ASSERT_EQ(run("stoch " + cfg + " --seed 5 --out " + b.string()).status, 0);
  ASSERT_EQ(run("stoch " + cfg + " --seed 6 --out " + c.string()).status, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a), slurp(c));
}

TEST(Cli, RefineHalvesStepAndDoublesPaths) {
  const auto out = scratch("refined.json");
  ASSERT_EQ(run("stoch " + (kExamples / "stoch_single_mode.json").string() +
                " --refine 1 --out " + out.string())
                .status,
            0);
  const auto rep = load(out);
  EXPECT_EQ(rep["time"]["step"].get<double>(), 0.0125);
  EXPECT_EQ(rep["time"]["count"].get<int>(), 80);
  EXPECT_EQ(rep["paths"].get<int>(), 4000);
}

TEST(Cli, CsvReport) {
  const auto out = scratch("report.csv");
  ASSERT_EQ(run("verify " + (kExamples / "verify_decomposition.json").string() +
                " --format csv --out " + out.string())
                .status,
            0);
  const auto text = slurp(out);
  EXPECT_EQ(text.rfind("member_id,lhs,rhs,ratio,", 0), 0U);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);  // header + 3 sigmas x 2 levels
}
