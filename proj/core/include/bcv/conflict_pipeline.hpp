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

#ifndef BCV__CONFLICT_PIPELINE_HPP_
#define BCV__CONFLICT_PIPELINE_HPP_

#include "bcv/kinematics.hpp"
#include "bcv/trajectory_ingest.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace bcv
{

/// Inclusive frame range.
struct FrameWindow
{
  std::int64_t first_frame{0};
  std::int64_t last_frame{0};

  [[nodiscard]] bool contains(std::int64_t frame) const
  {
    return frame >= first_frame && frame <= last_frame;
  }
  [[nodiscard]] std::int64_t size() const { return last_frame - first_frame + 1; }
  bool operator==(const FrameWindow &) const = default;
};

/// Every frame of the dataset.
[[nodiscard]] FrameWindow full_window(const TrajectoryDataset & dataset);
/// The first `frames` frames starting at the dataset's first frame, clipped to its end.
[[nodiscard]] FrameWindow leading_window(const TrajectoryDataset & dataset, std::int64_t frames);

struct PairKey
{
  std::int64_t follower_id{0};
  std::int64_t leader_id{0};
  auto operator<=>(const PairKey &) const = default;
};

/// One (pair, frame) sample, the unit of conflict counting.
struct FrameInstance
{
  PairState pair;
  std::int64_t frame{0};
  TtcValue ttc;
  PairClass cls{PairClass::Safe};
  bool adjusted{false};  // follower velocity was changed at this instance

  [[nodiscard]] PairKey key() const { return {pair.follower.id, pair.leader.id}; }
  [[nodiscard]] int lane() const { return pair.follower.lane; }
};

/// Maximal run of consecutive frames in which one pair is classified as conflict.
struct ConflictEvent
{
  std::int64_t follower_id{0};
  std::int64_t leader_id{0};
  int lane{0};
  std::int64_t first_frame{0};
  std::int64_t last_frame{0};
  double min_ttc{0.0};  // [s]
  std::int64_t frame_count{0};
};

/// Same merging rule for frames classified as collision (gap <= 0).
struct CollisionEvent
{
  std::int64_t follower_id{0};
  std::int64_t leader_id{0};
  int lane{0};
  std::int64_t first_frame{0};
  std::int64_t last_frame{0};
  std::int64_t frame_count{0};
};

struct ScanResult
{
  FrameWindow window;
  std::vector<FrameInstance> instances;  // frame-major, in pairing order
  std::vector<ConflictEvent> events;
  std::vector<CollisionEvent> collisions;
};

/// Classifies every pair in the window and merges consecutive conflict frames of
/// one pair into events. Throws EmptyWindow when the window holds no frame.
[[nodiscard]] ScanResult scan_conflicts(
  const PairedFrames & paired, const BarrierParams & params, const FrameWindow & window);
[[nodiscard]] ScanResult scan_conflicts(
  const TrajectoryDataset & dataset, const BarrierParams & params, const FrameWindow & window);

/// Rebuilds events and collision runs from a list of instances.
void rebuild_events(ScanResult & scan);

struct AdjustmentStrategy
{
  enum class Kind { Instantaneous, DecelLimited };
  Kind kind{Kind::Instantaneous};
  double t_target{3.0};  // [s]
  double a_min{-6.0};    // [m/s^2] per-step braking cap, DecelLimited only
  double dt{0.04};       // [s] step length, DecelLimited only

  static AdjustmentStrategy instantaneous(double t_target);
  static AdjustmentStrategy decel_limited(double t_target, double a_min, double dt);

  /// Throws InvalidSpec when t_target < params.t_safe, a_min >= 0 or dt <= 0.
  void validate(const BarrierParams & params) const;
};

const char * to_string(AdjustmentStrategy::Kind kind);

/// v_f' = min(v_f, v_l + gap / t_target), lowered by rounding steps if needed so
/// that the recomputed TTC is >= t_target. Pairs that are not in conflict come
/// back unchanged.
[[nodiscard]] double adjust_instantaneous(
  const PairState & pair, const BarrierParams & params, double t_target);

/// v_f' = max(v_target, v_f + a_min * dt); one braking step, possibly leaving a
/// residual conflict. Pairs that are not in conflict come back unchanged.
[[nodiscard]] double adjust_decel_limited(
  const PairState & pair, const BarrierParams & params, const AdjustmentStrategy & strategy);

[[nodiscard]] double adjust_velocity(
  const PairState & pair, const BarrierParams & params, const AdjustmentStrategy & strategy);

enum class AdjustmentMode {
  PerFrame,    // each conflicting instance adjusted on its own, nothing carried forward
  Propagated,  // adjusted speeds rewrite the follower's later positions
};

const char * to_string(AdjustmentMode mode);

struct TtcHistogram
{
  static constexpr double kBinWidth = 0.25;  // [s]
  static constexpr double kUpper = 10.0;     // [s]
  static constexpr std::size_t kBins = 40;

  std::vector<std::size_t> counts = std::vector<std::size_t>(kBins, 0);
  std::size_t overflow{0};  // finite TTC >= kUpper

  void add(double ttc_seconds);
};

struct LaneStats
{
  int lane{0};
  std::size_t before{0};  // conflict frame-instances
  std::size_t after{0};
  double reduction_pct{0.0};
  std::size_t events_before{0};
  std::size_t events_after{0};
  std::size_t collisions_before{0};  // collision frame-instances
  std::size_t collisions_after{0};
};

struct ConflictReport
{
  FrameWindow window;
  std::vector<LaneStats> lanes;  // ascending lane id
  LaneStats total;
  TtcHistogram hist_before;
  TtcHistogram hist_after;
  bool no_conflicts{false};  // before-count is zero; reductions are reported as 0
};

/// Compares two scans of the same window and pair instances.
/// Throws WindowMismatch otherwise.
[[nodiscard]] ConflictReport summarize(const ScanResult & before, const ScanResult & after);

struct AdjustmentResult
{
  TrajectoryDataset adjusted;
  ScanResult before;
  ScanResult after;
  ConflictReport report;
  std::size_t adjusted_instances{0};
};

/// Scans, adjusts every conflicting follower with `strategy`, re-evaluates and
/// summarizes.
///
/// PerFrame: each conflicting instance gets its follower speed replaced and its
/// TTC recomputed against the recorded leader; the adjusted dataset carries the
/// new speeds at those frames only.
///
/// Propagated: frames are replayed in order. A vehicle that was slowed keeps a
/// position lag (integrated speed deficit) and may regain its recorded speed no
/// faster than params.a_max. Within a frame leaders are settled before their
/// followers, so upstream adjustments see downstream results.
[[nodiscard]] AdjustmentResult apply_adjustment(
  const TrajectoryDataset & dataset, const AdjustmentStrategy & strategy,
  const BarrierParams & params, const FrameWindow & window,
  AdjustmentMode mode = AdjustmentMode::PerFrame);

}  // namespace bcv

#endif  // BCV__CONFLICT_PIPELINE_HPP_
