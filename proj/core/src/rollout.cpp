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

#include "bcv/rollout.hpp"

#include "bcv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcv
{

namespace
{

double profile_at(std::span<const double> profile, std::size_t k)
{
  if (profile.empty()) {
    return 0.0;
  }
  return profile[std::min(k, profile.size() - 1)];
}

PairState euler_step(const PairState & pair, double dt)
{
  auto next = pair;
  next.leader.x = pair.leader.x + pair.leader.v * dt;
  next.leader.v = std::max(0.0, pair.leader.v + pair.leader.a * dt);
  next.follower.x = pair.follower.x + pair.follower.v * dt;
  next.follower.v = std::max(0.0, pair.follower.v + pair.follower.a * dt);
  next.leader.t = next.follower.t = pair.leader.t + dt;
  ++next.leader.frame;
  ++next.follower.frame;
  return next;
}

/// Follower acceleration that lands the next Euler step on TTC == target_ttc.
double landing_bound(const PairState & pair, double target_ttc, double dt)
{
  const double next_gap = pair.gap() - pair.closing_speed() * dt;
  if (!(next_gap > 0.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return pair.leader.a + (next_gap / target_ttc - pair.closing_speed()) / dt;
}

}  // namespace

std::vector<RolloutStep> rollout(
  const PairState & initial, std::span<const double> leader_accel,
  std::span<const double> follower_command, const BarrierParams & params,
  const RolloutConfig & config)
{
  params.validate();
  if (!(config.dt > 0.0) || !(config.horizon > 0.0)) {
    throw InvalidSpec("rollout dt and horizon must be positive");
  }
  for (const double a : leader_accel) {
    if (!(a >= params.a_min && a <= params.a_max)) {
      throw InvalidProfile(
        "leader acceleration " + std::to_string(a) + " outside [" + std::to_string(params.a_min) +
        ", " + std::to_string(params.a_max) + "]");
    }
  }

  const auto steps = static_cast<std::size_t>(std::llround(config.horizon / config.dt));
  std::vector<RolloutStep> trace;
  trace.reserve(steps + 1);

  auto state = initial;
  for (std::size_t k = 0; k <= steps; ++k) {
    RolloutStep rec;
    rec.step = static_cast<int>(k);
    rec.t = static_cast<double>(k) * config.dt;
    state.leader.a = profile_at(leader_accel, k);
    const double command =
      std::clamp(profile_at(follower_command, k), params.a_min, params.a_max);
    rec.commanded = command;
    state.follower.a = command;

    double accel = command;
    if (config.filter_enabled) {
      const auto b = barrier_value(state, params);
      std::optional<double> bound;
      if (b.defined() && b.value <= config.engage_margin && state.closing_speed() > params.eps) {
        bound = safe_accel_bound(state, params.eps);
      } else {
        const auto predicted = barrier_value(euler_step(state, config.dt), params);
        const bool lands_inside =
          predicted.kind == BarrierValue::Kind::Violated ||
          (predicted.defined() && predicted.value <= config.engage_margin);
        if (lands_inside) {
          bound = landing_bound(state, params.t_safe + config.engage_margin, config.dt);
        }
      }
      if (bound) {
        rec.engaged = true;
        if (*bound < params.a_min) {
          rec.infeasible = true;
        }
        accel = std::max(std::min(command, *bound), params.a_min);
      }
    }
    state.follower.a = accel;
    rec.applied = accel;
    rec.pair = state;
    rec.barrier = barrier_value(state, params);
    if (state.gap() > 0.0 && state.closing_speed() > params.eps) {
      rec.barrier_rate = barrier_derivative(state, params);
    }
    trace.push_back(rec);
    state = euler_step(state, config.dt);
  }
  return trace;
}

}  // namespace bcv
