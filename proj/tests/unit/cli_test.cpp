// Copyright 2026 The bcverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "bcv/artifacts.hpp"
#include "bcv/commands.hpp"
#include "bcv/config.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace bcv::cli
{
namespace
{

using nlohmann::json;
using test::fixture;
using test::read_file;

struct CliResult
{
  int code{0};
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string> & args)
{
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string trajectory(const std::string & name)
{
  return fixture("trajectories/" + name).string();
}

// Hides BCV_SOLVER for the lifetime of the guard.
class SolverEnvGuard
{
public:
  SolverEnvGuard()
  {
    if (const char * v = std::getenv("BCV_SOLVER")) {
      saved_ = v;
    }
    ::unsetenv("BCV_SOLVER");
  }
  ~SolverEnvGuard()
  {
    if (saved_) {
      ::setenv("BCV_SOLVER", saved_->c_str(), 1);
    }
  }
  SolverEnvGuard(const SolverEnvGuard &) = delete;
  SolverEnvGuard & operator=(const SolverEnvGuard &) = delete;

private:
  std::optional<std::string> saved_;
};

std::string fake_solver(const test::TempDir & dir, const std::string & name, const std::string & reply)
{
  const auto path = dir.path() / name;
  std::ofstream(path) << "#!/bin/sh\ncat \"$@\" >/dev/null\nprintf '" << reply << "'\n";
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  return path.string();
}

#define REQUIRE_SOLVER()                                \
  do {                                                  \
    if (test::solver_path().empty()) {                  \
      GTEST_SKIP() << "no SMT solver (set BCV_SOLVER)"; \
    }                                                   \
  } while (false)

TEST(CliVerify, EmitOnlyNeedsNoSolver)
{
  SolverEnvGuard guard;
  test::TempDir dir;
  const auto r = run_cli({"--out", dir.path().string(), "verify", "--mode", "closed", "--n", "5", "--emit-only"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(read_file(dir.path() / "query.smt2"), read_file(fixture("smt/closed_n5.smt2")));
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "verdict.json"));
}

TEST(CliVerify, MissingSolverIsConfigError)
{
  SolverEnvGuard guard;
  test::TempDir dir;
  const auto r = run_cli({"--out", dir.path().string(), "verify", "--mode", "open"});
  EXPECT_EQ(r.code, kExitConfigError);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "query.smt2"));
}

TEST(CliVerify, OpenLoopSat)
{
  REQUIRE_SOLVER();
  test::TempDir dir;
  const auto r = run_cli(
    {"--solver", test::solver_path(), "--out", dir.path().string(), "verify", "--mode", "open", "--n", "2"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto v = json::parse(read_file(dir.path() / "verdict.json"));
  EXPECT_EQ(v["status"], "sat");
  EXPECT_EQ(v["validated"], true);
  EXPECT_EQ(v["oracle_agreement"], true);
  EXPECT_EQ(v["schema_version"], kSchemaVersion);
  EXPECT_EQ(v["model"].size(), 6U);
}

TEST(CliVerify, ClosedLoopUnsat)
{
  REQUIRE_SOLVER();
  test::TempDir dir;
  const auto r = run_cli(
    {"--solver", test::solver_path(), "--out", dir.path().string(), "verify", "--mode", "closed", "--n", "2"});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto v = json::parse(read_file(dir.path() / "verdict.json"));
  EXPECT_EQ(v["status"], "unsat");
  EXPECT_EQ(v["oracle_agreement"], true);
}

TEST(CliVerify, SolverFromEnvironment)
{
  REQUIRE_SOLVER();
  SolverEnvGuard guard;
  ::setenv("BCV_SOLVER", test::solver_path().c_str(), 1);
  test::TempDir dir;
  const auto r = run_cli({"--out", dir.path().string(), "verify", "--mode", "closed"});
  ::unsetenv("BCV_SOLVER");
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST(CliVerify, LaunchFailureIsConfigError)
{
  test::TempDir dir;
  const auto r = run_cli(
    {"--solver", "/nonexistent/solver", "--out", dir.path().string(), "verify", "--mode", "open"});
  EXPECT_EQ(r.code, kExitConfigError);
}

TEST(CliVerify, DisagreementAndInconclusiveExitTwo)
{
  test::TempDir dir;
  const auto out = dir.path().string();
  // Claims the open-loop system is safe; the oracle disagrees.
  auto r = run_cli({"--solver", fake_solver(dir, "liar", "unsat\\n"), "--out", out, "verify", "--mode", "open"});
  EXPECT_EQ(r.code, kExitVerificationFailed);
  EXPECT_EQ(json::parse(read_file(dir.path() / "verdict.json"))["oracle_agreement"], false);

  r = run_cli({"--solver", fake_solver(dir, "unknown", "unknown\\n"), "--out", out, "verify", "--mode", "closed"});
  EXPECT_EQ(r.code, kExitVerificationFailed);

  // A sat answer whose model violates the goal fails validation.
  const std::string bad_model =
    "sat\\n(model (define-fun x_0 () Real 100.0) (define-fun x_1 () Real 55.0)"
    " (define-fun v_0 () Real 20.0) (define-fun v_1 () Real 30.0)"
    " (define-fun a_0 () Real 0.0) (define-fun a_1 () Real (- 6.0)))\\n";
  r = run_cli({"--solver", fake_solver(dir, "bad", bad_model), "--out", out, "verify", "--mode", "open"});
  EXPECT_EQ(r.code, kExitVerificationFailed);
  EXPECT_EQ(json::parse(read_file(dir.path() / "verdict.json"))["validated"], false);

  r = run_cli({"--solver", fake_solver(dir, "garbage", "segfault\\n"), "--out", out, "verify", "--mode", "open"});
  EXPECT_EQ(r.code, kExitVerificationFailed);
}

TEST(CliVerify, InvalidVehicleCount)
{
  test::TempDir dir;
  EXPECT_EQ(
    run_cli({"--out", dir.path().string(), "verify", "--n", "1", "--emit-only"}).code, kExitConfigError);
}

TEST(CliScan, SyntheticFixtureCounts)
{
  test::TempDir dir;
  const auto r = run_cli({"--out", dir.path().string(), "scan", trajectory("closing.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto c = json::parse(read_file(dir.path() / "conflicts.json"));
  ASSERT_EQ(c["events"].size(), 1U);
  EXPECT_EQ(c["events"][0]["first_frame"], 51);
  EXPECT_EQ(c["events"][0]["frame_count"], 49);
  EXPECT_EQ(c["lanes"][0]["conflict_instances"], 49);
  const std::string csv = read_file(dir.path() / "ttc_per_frame.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 102);
  EXPECT_EQ(csv.rfind("# bcv 0.1.0", 0), 0U);
  EXPECT_NE(csv.find("\n2-1,2,1,2,51,29.600000,10.000000,2.960000,finite,conflict\n"), std::string::npos);
}

TEST(CliScan, ZeroConflictFixture)
{
  test::TempDir dir;
  ASSERT_EQ(run_cli({"--out", dir.path().string(), "scan", trajectory("no_conflict.csv")}).code, kExitOk);
  const auto c = json::parse(read_file(dir.path() / "conflicts.json"));
  EXPECT_TRUE(c["events"].empty());
}

TEST(CliScan, DataErrors)
{
  test::TempDir dir;
  auto r = run_cli({"--out", dir.path().string(), "scan", trajectory("two_vehicle_no_lane.csv")});
  EXPECT_EQ(r.code, kExitDataError);
  EXPECT_NE(r.err.find("MissingColumn(\"laneId\")"), std::string::npos);
  r = run_cli({"--out", dir.path().string(), "scan", trajectory("absent.csv")});
  EXPECT_EQ(r.code, kExitDataError);
  r = run_cli({"--out", dir.path().string(), "scan", "--window", "500:600", trajectory("closing.csv")});
  EXPECT_EQ(r.code, kExitDataError);
}

TEST(CliScan, ConfigErrors)
{
  test::TempDir dir;
  const auto cfg = dir.path() / "bad.json";
  std::ofstream(cfg) << R"({"barrier": {"t_safe": 3.0, "tsafe": 2.0}})";
  auto r = run_cli({"--config", cfg.string(), "--out", dir.path().string(), "scan", trajectory("closing.csv")});
  EXPECT_EQ(r.code, kExitConfigError);
  r = run_cli({"--config", (dir.path() / "missing.json").string(), "scan", trajectory("closing.csv")});
  EXPECT_EQ(r.code, kExitConfigError);
  r = run_cli({"--out", dir.path().string(), "scan", "--window", "abc", trajectory("closing.csv")});
  EXPECT_EQ(r.code, kExitConfigError);
  r = run_cli({"--out", dir.path().string(), "frobnicate"});
  EXPECT_EQ(r.code, kExitConfigError);
}

TEST(CliAdjust, StrategiesOnClosingFixture)
{
  test::TempDir dir;
  const auto out = dir.path().string();
  auto r = run_cli({"--config", fixture("config/default.json").string(), "--out", out, "adjust", trajectory("closing.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::string csv = read_file(dir.path() / "report.csv");
  EXPECT_NE(csv.find("\n2,49,0,100.000000\n"), std::string::npos) << csv;
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "hist_before.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "hist_after.csv"));

  r = run_cli({"--out", out, "adjust", "--strategy", "decel_limited", trajectory("closing.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(read_file(dir.path() / "report.json"));
  const double pct = j["total"]["reduction_pct"];
  EXPECT_GT(pct, 0.0);
  EXPECT_LT(pct, 100.0);
  EXPECT_EQ(j["strategy"]["kind"], "decel_limited");
}

TEST(CliAdjust, WindowSizes)
{
  test::TempDir a;
  test::TempDir b;
  ASSERT_EQ(run_cli({"--out", a.path().string(), "adjust", "--window", "300", trajectory("long_periodic.csv")}).code, 0);
  ASSERT_EQ(run_cli({"--out", b.path().string(), "adjust", "--window", "3000", trajectory("long_periodic.csv")}).code, 0);
  const auto ja = json::parse(read_file(a.path() / "report.json"));
  const auto jb = json::parse(read_file(b.path() / "report.json"));
  EXPECT_EQ(ja["window"]["frames"], 300);
  EXPECT_EQ(jb["window"]["frames"], 3000);
  EXPECT_EQ(ja["total"]["before"], 48);
  EXPECT_EQ(jb["total"]["before"], 360);
}

TEST(CliAdjust, Deterministic)
{
  test::TempDir a;
  test::TempDir b;
  for (const auto * dir : {&a, &b}) {
    ASSERT_EQ(
      run_cli({"--out", dir->path().string(), "adjust", "--strategy", "decel_limited", "--adjust-mode", "propagated",
               trajectory("multi_lane.csv")})
        .code,
      kExitOk);
  }
  for (const char * name : {"report.json", "report.csv", "hist_before.csv", "hist_after.csv"}) {
    EXPECT_EQ(read_file(a.path() / name), read_file(b.path() / name)) << name;
  }
}

TEST(CliAdjust, FormatSelection)
{
  test::TempDir dir;
  const auto cfg = dir.path() / "csv_only.json";
  std::ofstream(cfg) << R"({"output": {"formats": ["csv"]}})";
  ASSERT_EQ(
    run_cli({"--config", cfg.string(), "--out", dir.path().string(), "adjust", trajectory("closing.csv")}).code,
    kExitOk);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "report.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "report.json"));
}

TEST(Config, DigestTracksResultAffectingFields)
{
  RunConfig a;
  RunConfig b;
  b.out_dir = "/elsewhere";
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 64U);
  b.barrier.t_safe = 2.5;
  b.barrier.t_target = 2.5;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Config, FixtureConfigLoads)
{
  const RunConfig c = load_config(fixture("config/default.json"));
  EXPECT_EQ(c.schema.length, "width");
  EXPECT_EQ(c.solver.input, SolverInput::TempFile);
  EXPECT_EQ(load_config(fixture("config/decel_limited.json")).strategy, AdjustmentStrategy::Kind::DecelLimited);
}

}  // namespace
}  // namespace bcv::cli
