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


// Acceptance suite: one PASS/FAIL/SKIP line per criterion, non-zero exit on
// any failure.

#include "bcv/commands.hpp"
#include "bcv/conflict_pipeline.hpp"
#include "bcv/rollout.hpp"
#include "bcv/solver_backend.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace
{

using bcv::test::fixture;
using bcv::test::read_file;
using nlohmann::json;

enum class Verdict { Pass, Fail, Skip };

struct Outcome
{
  Verdict verdict{Verdict::Fail};
  std::string detail;
};

Outcome pass(std::string detail) { return {Verdict::Pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Verdict::Fail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Verdict::Skip, std::move(detail)}; }

struct Criterion
{
  const char * name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> check;
};

int run_cli(const std::vector<std::string> & args)
{
  std::ostringstream out;
  std::ostringstream err;
  return bcv::cli::run(args, out, err);
}

bcv::QuerySpec spec_of(int n, bcv::QueryMode mode)
{
  bcv::QuerySpec s;
  s.n = n;
  s.mode = mode;
  return s;
}

std::string trajectory(const std::string & name) { return fixture("trajectories/" + name).string(); }

Outcome closed_loop_verification()
{
  const std::string solver = bcv::test::solver_path();
  if (solver.empty()) {
    return fail("no SMT solver available (set BCV_SOLVER)");
  }
  for (const int n : {2, 5}) {
    bcv::test::TempDir dir;
    const int code = run_cli(
      {"--solver", solver, "--out", dir.path().string(), "verify", "--mode", "closed", "--n", std::to_string(n)});
    const auto v = json::parse(read_file(dir.path() / "verdict.json"));
    if (code != 0 || v["status"] != "unsat" || v["oracle_agreement"] != true) {
      return fail("n=" + std::to_string(n) + " exit " + std::to_string(code) + " status " + v["status"].dump());
    }
  }
  if (bcv::grid_oracle_search(spec_of(2, bcv::QueryMode::ClosedLoop), bcv::GridBounds{})) {
    return fail("grid oracle found a closed-loop counterexample");
  }
  const bcv::BarrierParams p;
  bcv::test::Rng rng(0xACCE);
  for (int i = 0; i < 100000; ++i) {
    const double g = rng.uniform(0.01, 200.0);
    const double d = rng.uniform(0.01, 30.0);
    const double a_l = rng.uniform(-6.0, 3.0);
    const double a_f = a_l - d * d / g - rng.uniform(0.0, 5.0);
    if (bcv::barrier_derivative(bcv::make_relative_pair(g, 10.0, 10.0 + d, a_f, a_l), p) < -1e-9) {
      return fail("implication violated at sample " + std::to_string(i));
    }
  }
  return pass("unsat for n=2 and n=5, oracle empty, 1e5 implication samples hold");
}

Outcome open_loop_counterexample()
{
  const std::string solver = bcv::test::solver_path();
  if (solver.empty()) {
    return fail("no SMT solver available (set BCV_SOLVER)");
  }
  bcv::test::TempDir dir;
  const int code =
    run_cli({"--solver", solver, "--out", dir.path().string(), "verify", "--mode", "open", "--n", "2"});
  const auto v = json::parse(read_file(dir.path() / "verdict.json"));
  if (code != 0 || v["status"] != "sat" || v["validated"] != true || v["oracle_agreement"] != true) {
    return fail("exit " + std::to_string(code) + " verdict " + v.dump());
  }
  // Independent re-check of the model with the pair kinematics.
  const auto & m = v["model"];
  auto value = [&m](const char * name) { return m.at(name).at("value").get<double>(); };
  bcv::VehicleState leader{0, 0, 0.0, value("x_0"), value("v_0"), value("a_0"), 5.0, 0};
  bcv::VehicleState follower{1, 0, 0.0, value("x_1"), value("v_1"), value("a_1"), 5.0, 0};
  const auto pair = bcv::make_pair(follower, leader);
  const bcv::BarrierParams params;
  const auto b = bcv::barrier_value(pair, params);
  if (!b.defined() || b.value < -1e-9) {
    return fail("model does not satisfy B >= 0");
  }
  const double bdot = bcv::barrier_derivative(pair, params);
  if (!(bdot < 1e-9)) {
    return fail("model does not satisfy dB/dt < 0");
  }
  std::ostringstream msg;
  msg << "sat, validated, oracle agrees; B=" << b.value << " dB/dt=" << bdot;
  return pass(msg.str());
}

Outcome bdot_finite_difference()
{
  const bcv::BarrierParams p;
  const auto suite = bcv::test::polynomial_suite(0xFD01, 24);
  double worst = 0.0;
  for (const auto & pair : suite) {
    const double err = bcv::test::max_fd_error(pair, p, 1e-4);
    worst = std::max(worst, err);
    // Halving h must cut a truncation-dominated error by about four.
    if (err > 1e-9 && bcv::test::max_fd_error(pair, p, 2e-4) < 3.0 * err) {
      return fail("error is not second order in h");
    }
  }
  std::ostringstream msg;
  msg << suite.size() << " cubic-velocity trajectories, max error " << worst << " at h=1e-4";
  return worst <= 1e-6 ? pass(msg.str()) : fail(msg.str());
}

Outcome forward_invariance()
{
  const bcv::BarrierParams p;
  const bcv::RolloutConfig cfg;
  bcv::test::Rng rng(0x1000);
  int accepted = 0;
  int rejected = 0;
  double lowest = 1e300;
  while (accepted < 1000) {
    const auto c = bcv::test::sample_rollout_case(rng, cfg);
    const auto trace = bcv::rollout(c.initial, c.leader_accel, c.follower_command, p, cfg);
    bool infeasible = false;
    for (const auto & s : trace) {
      infeasible = infeasible || s.infeasible;
    }
    if (infeasible) {
      ++rejected;
      continue;
    }
    ++accepted;
    lowest = std::min(lowest, bcv::test::min_barrier(trace));
    if (lowest < -1e-6) {
      return fail("rollout " + std::to_string(accepted) + " reached B=" + std::to_string(lowest));
    }
  }
  std::ostringstream msg;
  msg << accepted << " rollouts (" << rejected << " resampled with infeasible bound), min B " << lowest;
  return pass(msg.str());
}

Outcome pipeline_exactness()
{
  const bcv::BarrierParams p;
  auto load = [](const char * name) { return bcv::load_dataset({trajectory(name)}, bcv::IngestSchema{}); };
  auto conflicts = [](const bcv::ScanResult & s) {
    std::size_t n = 0;
    for (const auto & i : s.instances) {
      n += i.cls == bcv::PairClass::Conflict;
    }
    return n;
  };

  const auto closing = load("closing.csv");
  const auto scan = bcv::scan_conflicts(closing, p, bcv::full_window(closing));
  if (conflicts(scan) != 49 || scan.events.size() != 1 || scan.events[0].first_frame != 51) {
    return fail("closing.csv scan does not match the hand-computed 49 frames from frame 51");
  }
  const auto episodes = load("two_episodes.csv");
  const auto scan2 = bcv::scan_conflicts(episodes, p, bcv::full_window(episodes));
  if (conflicts(scan2) != 73 || scan2.events.size() != 2) {
    return fail("two_episodes.csv scan does not match 73 frames in 2 events");
  }

  const auto inst = bcv::apply_adjustment(
    closing, bcv::AdjustmentStrategy::instantaneous(3.0), p, bcv::full_window(closing));
  if (inst.report.total.after != 0 || inst.report.total.reduction_pct != 100.0) {
    return fail("instantaneous adjustment left conflicts");
  }
  const auto decel = bcv::apply_adjustment(
    closing, bcv::AdjustmentStrategy::decel_limited(3.0, -6.0, 1.0 / closing.frame_rate), p,
    bcv::full_window(closing));
  if (!(decel.report.total.after > 0 && decel.report.total.after < decel.report.total.before)) {
    return fail("decel-limited reduction is not strictly partial");
  }

  const auto multi = load("multi_lane.csv");
  for (const auto & strategy :
       {bcv::AdjustmentStrategy::instantaneous(3.0), bcv::AdjustmentStrategy::decel_limited(3.0, -6.0, 0.04)}) {
    for (const auto mode : {bcv::AdjustmentMode::PerFrame, bcv::AdjustmentMode::Propagated}) {
      for (const auto * ds : {&closing, &episodes, &multi}) {
        const auto r = bcv::apply_adjustment(*ds, strategy, p, bcv::full_window(*ds), mode);
        for (const auto & lane : r.report.lanes) {
          if (lane.after > lane.before) {
            return fail("lane " + std::to_string(lane.lane) + " after-count exceeds before-count");
          }
        }
      }
    }
  }
  std::ostringstream msg;
  msg << "49/73 conflict frames exact; instantaneous 100%; decel-limited " << decel.report.total.before
      << "->" << decel.report.total.after;
  return pass(msg.str());
}

Outcome smt_goldens()
{
  const std::pair<bcv::QuerySpec, const char *> goldens[] = {
    {spec_of(2, bcv::QueryMode::OpenLoop), "smt/open_n2.smt2"},
    {spec_of(2, bcv::QueryMode::ClosedLoop), "smt/closed_n2.smt2"},
    {spec_of(5, bcv::QueryMode::ClosedLoop), "smt/closed_n5.smt2"},
  };
  for (const auto & [spec, path] : goldens) {
    if (bcv::emit_smtlib(bcv::build_query(spec)) != read_file(fixture(path))) {
      return fail(std::string(path) + " differs from emitted query");
    }
  }
  const auto sat = bcv::parse_solver_output(read_file(fixture("smt/transcript_open_n2_sat.txt")));
  if (sat.status != bcv::SolverVerdict::Status::Sat || sat.model->values.at("x_1").text != "(/ 1.0 4.0)" ||
      sat.model->at("x_1") != 0.25 ||
      !bcv::validate_counterexample(*sat.model, spec_of(2, bcv::QueryMode::OpenLoop))) {
    return fail("captured sat transcript not parsed or not valid");
  }
  if (bcv::parse_solver_output(read_file(fixture("smt/transcript_closed_n2_unsat.txt"))).status !=
      bcv::SolverVerdict::Status::Unsat) {
    return fail("captured unsat transcript");
  }
  if (bcv::parse_solver_output(read_file(fixture("smt/transcript_unknown.txt"))).status !=
      bcv::SolverVerdict::Status::Unknown) {
    return fail("captured unknown transcript");
  }
  return pass("3 goldens byte-identical; sat/unsat/unknown transcripts parsed");
}

Outcome determinism()
{
  bcv::test::TempDir a;
  bcv::test::TempDir b;
  for (const auto * dir : {&a, &b}) {
    const std::string cmd = std::string("'") + BCV_CLI_PATH + "' --out '" + dir->path().string() +
                            "' adjust --strategy decel_limited --adjust-mode propagated '" +
                            trajectory("multi_lane.csv") + "' > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      return fail("bcv adjust failed");
    }
  }
  for (const char * name : {"report.json", "report.csv"}) {
    if (read_file(a.path() / name) != read_file(b.path() / name)) {
      return fail(std::string(name) + " differs between runs");
    }
  }
  return pass("two bcv adjust runs produced byte-identical report.json and report.csv");
}

Outcome highd_windows()
{
  const char * tracks = std::getenv("BCV_HIGHD_TRACKS");
  if (tracks == nullptr || *tracks == '\0') {
    return skip("BCV_HIGHD_TRACKS not set");
  }
  std::ostringstream msg;
  for (const char * window : {"300", "3000"}) {
    double best_decel = 0.0;
    for (const char * strategy : {"instantaneous", "decel_limited"}) {
      bcv::test::TempDir dir;
      if (run_cli({"--out", dir.path().string(), "adjust", "--window", window, "--strategy", strategy, tracks}) != 0) {
        return fail(std::string("adjust failed for window ") + window);
      }
      const auto r = json::parse(read_file(dir.path() / "report.json"));
      for (const auto & lane : r["lanes"]) {
        const double pct = lane["reduction_pct"];
        if (std::string(strategy) == "instantaneous" && lane["before"].get<int>() > 0 && pct != 100.0) {
          return fail(std::string("instantaneous left conflicts in window ") + window);
        }
        if (std::string(strategy) == "decel_limited") {
          best_decel = std::max(best_decel, pct);
        }
      }
    }
    if (!(best_decel > 0.0)) {
      return fail(std::string("no lane improved under decel_limited in window ") + window);
    }
    msg << "window " << window << ": best decel-limited lane " << best_decel << "%; ";
  }
  return pass(msg.str());
}

}  // namespace

int main()
{
  const std::vector<Criterion> criteria = {
    {"closed_loop_verification", 10.0, closed_loop_verification},
    {"open_loop_counterexample", 10.0, open_loop_counterexample},
    {"bdot_finite_difference", 0.0, bdot_finite_difference},
    {"forward_invariance", 60.0, forward_invariance},
    {"conflict_pipeline_exactness", 0.0, pipeline_exactness},
    {"smtlib_goldens", 0.0, smt_goldens},
    {"adjust_determinism", 0.0, determinism},
    {"highd_windows", 0.0, highd_windows},
  };

  int failures = 0;
  for (const auto & c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception & e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.verdict == Verdict::Pass && c.budget_s > 0.0 && elapsed > c.budget_s) {
      o = fail("took " + std::to_string(elapsed) + " s, budget " + std::to_string(c.budget_s) + " s");
    }
    const char * tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    failures += o.verdict == Verdict::Fail;
    std::printf("[%s] %-28s %7.2fs  %s\n", tag, c.name, elapsed, o.detail.c_str());
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
