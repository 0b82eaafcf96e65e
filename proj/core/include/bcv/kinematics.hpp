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

#ifndef BCV__KINEMATICS_HPP_
#define BCV__KINEMATICS_HPP_

#include <cstdint>

namespace bcv
{

/// Default tolerance for closing-speed positivity and equality checks.
inline constexpr double kDefaultEps = 1e-9;

/// One vehicle's longitudinal sample. `x` is the front bumper, increasing in
/// the driving direction.
struct VehicleState
{
  std::int64_t id{0};
  std::int64_t frame{0};
  double t{0.0};       // [s]
  double x{0.0};       // [m]
  double v{0.0};       // [m/s]
  double a{0.0};       // [m/s^2]
  double length{5.0};  // [m]
  int lane{0};
};

/// Which length is subtracted from the bumper-to-bumper distance.
enum class GapReference { LeaderLength, FollowerLength, Fixed };

/// A follower (vehicle i) behind its leader (vehicle i-1) at one instant.
struct PairState
{
  VehicleState follower;
  VehicleState leader;
  double reference_length{0.0};  // [m] length subtracted from the position difference

  /// leader.x - follower.x - reference_length
  [[nodiscard]] double gap() const { return leader.x - follower.x - reference_length; }
  /// follower.v - leader.v; positive while the gap shrinks.
  [[nodiscard]] double closing_speed() const { return follower.v - leader.v; }
  /// follower.a - leader.a
  [[nodiscard]] double relative_accel() const { return follower.a - leader.a; }
};

PairState make_pair(
  const VehicleState & follower, const VehicleState & leader,
  GapReference reference = GapReference::LeaderLength, double fixed_length = 0.0);

/// Builds a pair directly in relative coordinates: the leader sits at the origin
/// with zero length so that gap() returns `gap` exactly.
PairState make_relative_pair(
  double gap, double leader_v, double follower_v, double follower_a = 0.0, double leader_a = 0.0);

struct BarrierParams
{
  double t_safe{3.0};   // [s] TTC threshold
  double a_min{-6.0};   // [m/s^2]
  double a_max{3.0};    // [m/s^2]
  double eps{kDefaultEps};
  double t_target{3.0};  // [s] TTC restored by speed adjustment

  /// Throws InvalidSpec when the parameter invariants do not hold.
  void validate() const;
};

struct TtcValue
{
  enum class Kind { Finite, NotClosing, Overlap };
  Kind kind{Kind::NotClosing};
  double seconds{0.0};  // meaningful only for Finite

  [[nodiscard]] bool finite() const { return kind == Kind::Finite; }
};

struct BarrierValue
{
  enum class Kind { Defined, StructurallySafe, Violated };
  Kind kind{Kind::StructurallySafe};
  double value{0.0};  // TTC - t_safe, meaningful only for Defined

  [[nodiscard]] bool defined() const { return kind == Kind::Defined; }
};

enum class PairClass { Safe, Conflict, Collision };

const char * to_string(PairClass c);
const char * to_string(TtcValue::Kind k);

/// Time to collision at constant speeds. Finite iff gap > 0 and closing speed > 0.
[[nodiscard]] TtcValue ttc(const PairState & pair);

/// B = TTC - t_safe, tagged for the non-closing and overlapping cases.
[[nodiscard]] BarrierValue barrier_value(const PairState & pair, const BarrierParams & params);

/// dB/dt = -1 - gap * (a_f - a_l) / dv^2, from the quotient rule applied to gap/dv
/// with d(gap)/dt = -dv and d(dv)/dt = a_f - a_l.
/// Throws DegenerateClosing unless gap > 0 and dv > params.eps.
[[nodiscard]] double barrier_derivative(const PairState & pair, const BarrierParams & params);

/// Largest follower acceleration keeping dB/dt >= 0: a_l - dv^2 / gap.
/// Throws DegenerateClosing unless gap > 0 and dv > eps.
[[nodiscard]] double safe_accel_bound(const PairState & pair, double eps = kDefaultEps);

[[nodiscard]] PairClass classify(const PairState & pair, const BarrierParams & params);

}  // namespace bcv

#endif  // BCV__KINEMATICS_HPP_
