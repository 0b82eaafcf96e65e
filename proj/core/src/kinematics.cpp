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

#include "bcv/kinematics.hpp"

#include "bcv/errors.hpp"

#include <string>

namespace bcv
{

PairState make_pair(
  const VehicleState & follower, const VehicleState & leader, GapReference reference,
  double fixed_length)
{
  PairState pair{follower, leader, 0.0};
  switch (reference) {
    case GapReference::LeaderLength:
      pair.reference_length = leader.length;
      break;
    case GapReference::FollowerLength:
      pair.reference_length = follower.length;
      break;
    case GapReference::Fixed:
      pair.reference_length = fixed_length;
      break;
  }
  return pair;
}

PairState make_relative_pair(
  double gap, double leader_v, double follower_v, double follower_a, double leader_a)
{
  VehicleState leader;
  leader.id = 0;
  leader.x = 0.0;
  leader.v = leader_v;
  leader.a = leader_a;
  leader.length = 0.0;
  VehicleState follower;
  follower.id = 1;
  follower.x = -gap;
  follower.v = follower_v;
  follower.a = follower_a;
  follower.length = 0.0;
  return PairState{follower, leader, 0.0};
}

void BarrierParams::validate() const
{
  if (!(t_safe > 0.0)) {
    throw InvalidSpec("t_safe must be positive");
  }
  if (!(a_min < 0.0 && a_max > 0.0)) {
    throw InvalidSpec("acceleration envelope must satisfy a_min < 0 < a_max");
  }
  if (!(eps > 0.0)) {
    throw InvalidSpec("eps must be positive");
  }
  if (!(t_target >= t_safe)) {
    throw InvalidSpec("t_target must not be below t_safe");
  }
}

const char * to_string(PairClass c)
{
  switch (c) {
    case PairClass::Safe:
      return "safe";
    case PairClass::Conflict:
      return "conflict";
    case PairClass::Collision:
      return "collision";
  }
  return "unknown";
}

const char * to_string(TtcValue::Kind k)
{
  switch (k) {
    case TtcValue::Kind::Finite:
      return "finite";
    case TtcValue::Kind::NotClosing:
      return "not_closing";
    case TtcValue::Kind::Overlap:
      return "overlap";
  }
  return "unknown";
}

TtcValue ttc(const PairState & pair)
{
  const double gap = pair.gap();
  if (!(gap > 0.0)) {
    return {TtcValue::Kind::Overlap, 0.0};
  }
  const double dv = pair.closing_speed();
  if (!(dv > 0.0)) {
    return {TtcValue::Kind::NotClosing, 0.0};
  }
  return {TtcValue::Kind::Finite, gap / dv};
}

BarrierValue barrier_value(const PairState & pair, const BarrierParams & params)
{
  const auto t = ttc(pair);
  switch (t.kind) {
    case TtcValue::Kind::Finite:
      return {BarrierValue::Kind::Defined, t.seconds - params.t_safe};
    case TtcValue::Kind::NotClosing:
      return {BarrierValue::Kind::StructurallySafe, 0.0};
    case TtcValue::Kind::Overlap:
      break;
  }
  return {BarrierValue::Kind::Violated, 0.0};
}

namespace
{
void require_closing(double gap, double dv, double eps)
{
  if (!(gap > 0.0) || !(dv > eps)) {
    throw DegenerateClosing(
      "barrier derivative undefined for gap=" + std::to_string(gap) +
      " closing_speed=" + std::to_string(dv));
  }
}
}  // namespace

double barrier_derivative(const PairState & pair, const BarrierParams & params)
{
  const double gap = pair.gap();
  const double dv = pair.closing_speed();
  require_closing(gap, dv, params.eps);
  return -1.0 - gap * pair.relative_accel() / (dv * dv);
}

double safe_accel_bound(const PairState & pair, double eps)
{
  const double gap = pair.gap();
  const double dv = pair.closing_speed();
  require_closing(gap, dv, eps);
  return pair.leader.a - dv * dv / gap;
}

PairClass classify(const PairState & pair, const BarrierParams & params)
{
  const auto t = ttc(pair);
  if (t.kind == TtcValue::Kind::Overlap) {
    return PairClass::Collision;
  }
  if (t.finite() && t.seconds < params.t_safe) {
    return PairClass::Conflict;
  }
  return PairClass::Safe;
}

}  // namespace bcv
