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


#include "bcv/conflict_pipeline.hpp"
#include "bcv/rollout.hpp"
#include "bcv/smt_encoding.hpp"
#include "bcv/solver_backend.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

namespace
{

// Platoon of `vehicles` per lane on three lanes, closing and opening on a 10 s cycle.
bcv::TrajectoryDataset synthetic_highway(int vehicles, int frames)
{
  bcv::TrajectoryDataset ds;
  ds.frame_rate = 25.0;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> jitter(-2.0, 2.0);
  std::int64_t id = 1;
  for (int lane = 1; lane <= 3; ++lane) {
    ds.lanes.insert(lane);
    for (int k = 0; k < vehicles; ++k, ++id) {
      auto & track = ds.tracks[id];
      track.id = id;
      double x = 2000.0 - 35.0 * k + jitter(rng);
      const double base = 25.0 + jitter(rng);
      for (int f = 0; f < frames; ++f) {
        bcv::VehicleState s;
        s.id = id;
        s.frame = f;
        s.t = f / ds.frame_rate;
        s.lane = lane;
        s.v = base + (k % 2 == 0 ? 4.0 : -4.0) * std::sin(s.t * 0.628 + k);
        s.x = x;
        x += s.v / ds.frame_rate;
        track.samples.push_back({s, 0});
      }
    }
  }
  return ds;
}

void BM_BarrierDerivative(benchmark::State & state)
{
  const bcv::BarrierParams p;
  const auto pair = bcv::make_relative_pair(30.0, 20.0, 28.0, -1.0, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::barrier_derivative(pair, p));
    benchmark::DoNotOptimize(bcv::classify(pair, p));
  }
}
BENCHMARK(BM_BarrierDerivative);

void BM_GridOracleClosedLoop(benchmark::State & state)
{
  bcv::QuerySpec spec;
  spec.mode = bcv::QueryMode::ClosedLoop;
  bcv::GridBounds bounds;
  bounds.resolution = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::grid_oracle_search(spec, bounds));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0) * state.range(0));
}
BENCHMARK(BM_GridOracleClosedLoop)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_EmitSmtlib(benchmark::State & state)
{
  bcv::QuerySpec spec;
  spec.n = static_cast<int>(state.range(0));
  spec.mode = bcv::QueryMode::ClosedLoop;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::emit_smtlib(bcv::build_query(spec)));
  }
}
BENCHMARK(BM_EmitSmtlib)->Arg(2)->Arg(10)->Arg(50);

void BM_ParseSolverOutput(benchmark::State & state)
{
  std::string text = "sat\n(\n";
  for (int i = 0; i < 50; ++i) {
    for (const char * sym : {"x_", "v_", "a_"}) {
      text += "  (define-fun " + std::string(sym) + std::to_string(i) + " () Real\n    (/ 1.0 4.0))\n";
    }
  }
  text += ")\n";
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::parse_solver_output(text));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseSolverOutput);

void BM_ScanConflicts(benchmark::State & state)
{
  const auto ds = synthetic_highway(20, static_cast<int>(state.range(0)));
  const bcv::BarrierParams p;
  const auto window = bcv::full_window(ds);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::scan_conflicts(ds, p, window));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.sample_count()));
}
BENCHMARK(BM_ScanConflicts)->Arg(300)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_ApplyAdjustment(benchmark::State & state)
{
  const auto ds = synthetic_highway(20, 3000);
  const bcv::BarrierParams p;
  const auto mode = state.range(0) == 0 ? bcv::AdjustmentMode::PerFrame : bcv::AdjustmentMode::Propagated;
  const auto strategy = bcv::AdjustmentStrategy::decel_limited(3.0, -6.0, 0.04);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::apply_adjustment(ds, strategy, p, bcv::full_window(ds), mode));
  }
}
BENCHMARK(BM_ApplyAdjustment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Rollout(benchmark::State & state)
{
  const auto initial = bcv::make_relative_pair(60.0, 20.0, 30.0);
  const std::vector<double> leader{-1.0};
  const std::vector<double> follower{1.0};
  const bcv::BarrierParams p;
  const bcv::RolloutConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bcv::rollout(initial, leader, follower, p, cfg));
  }
}
BENCHMARK(BM_Rollout);

}  // namespace

BENCHMARK_MAIN();
