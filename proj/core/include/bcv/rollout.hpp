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

#ifndef BCV__ROLLOUT_HPP_
#define BCV__ROLLOUT_HPP_

#include "bcv/kinematics.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bcv
{

struct RolloutConfig
{
  double dt{0.04};            // [s]
  double horizon{20.0};       // [s]
  double engage_margin{0.5};  // [s] of B below which the filter clamps
  bool filter_enabled{true};
};

struct RolloutStep
{
  int step{0};
  double t{0.0};
  PairState pair;  // state at t, accelerations as applied over [t, t + dt)
  BarrierValue barrier;
  std::optional<double> barrier_rate;  // dB/dt under the applied accelerations
  double commanded{0.0};  // follower command after clamping to the envelope
  double applied{0.0};
  bool engaged{false};
  bool infeasible{false};  // the safe bound fell below a_min; a_min applied instead
};

/// Forward-Euler closed-loop simulation of one follower/leader pair.
///
/// Profiles give one acceleration per step; the last entry is held when a profile
/// is shorter than the horizon. The follower command is clamped to the envelope,
/// then, while B is defined and B <= engage_margin, to safe_accel_bound(). With
/// explicit Euler that bound keeps TTC exactly constant over the step. A state
/// still outside the margin whose next step would land inside it (or overlap) is
/// clamped ahead of time to the acceleration that lands on B = engage_margin.
/// Velocities are floored at zero.
///
/// Throws InvalidProfile when a leader acceleration lies outside [a_min, a_max]
/// and InvalidSpec for a non-positive dt or horizon.
[[nodiscard]] std::vector<RolloutStep> rollout(
  const PairState & initial, std::span<const double> leader_accel,
  std::span<const double> follower_command, const BarrierParams & params,
  const RolloutConfig & config);

}  // namespace bcv

#endif  // BCV__ROLLOUT_HPP_
