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

#ifndef BCV__TRAJECTORY_INGEST_HPP_
#define BCV__TRAJECTORY_INGEST_HPP_

#include "bcv/kinematics.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace bcv
{

/// Where the raw x coordinate sits on the vehicle.
enum class PositionReference {
  FrontBumper,        // x is the front bumper in the recorded driving direction
  BoundingBoxCorner,  // x is the low-x edge of the bounding box, length along +x
};

/// Maps the logical columns onto CSV header names. An empty `preceding_id`
/// disables id-based pairing.
struct IngestSchema
{
  std::string frame{"frame"};
  std::string id{"id"};
  std::string x{"x"};
  std::string x_velocity{"xVelocity"};
  std::string x_acceleration{"xAcceleration"};
  std::string length{"width"};
  std::string lane{"laneId"};
  std::string preceding_id{"precedingId"};
  double frame_rate{25.0};  // [Hz]
  PositionReference position_reference{PositionReference::BoundingBoxCorner};
  GapReference gap_reference{GapReference::LeaderLength};
  double fixed_gap_length{0.0};  // used when gap_reference == Fixed

  /// Throws InvalidSpec for a non-positive frame rate or duplicate column names.
  void validate() const;
};

/// One recorded sample plus the dataset's own notion of the vehicle ahead.
struct TrackSample
{
  VehicleState state;
  std::int64_t preceding_id{0};  // 0 when unknown or absent
};

struct Track
{
  std::int64_t id{0};
  std::vector<TrackSample> samples;  // strictly increasing frames
};

struct Provenance
{
  std::vector<std::filesystem::path> sources;
  PositionReference position_reference{PositionReference::FrontBumper};
  std::set<int> mirrored_lanes;
  bool has_preceding_id{false};
};

struct DataQuality
{
  std::size_t negative_speed_clamped{0};  // samples with v < 0 after mirroring
  std::size_t speed_out_of_range{0};      // samples outside [0, 70] m/s
  std::size_t nonpositive_length{0};
  std::vector<std::string> warnings;
};

struct TrajectoryDataset
{
  std::map<std::int64_t, Track> tracks;
  std::set<int> lanes;
  double frame_rate{25.0};
  GapReference gap_reference{GapReference::LeaderLength};
  double fixed_gap_length{0.0};
  Provenance provenance;
  DataQuality quality;

  [[nodiscard]] std::int64_t first_frame() const;
  [[nodiscard]] std::int64_t last_frame() const;
  [[nodiscard]] std::size_t sample_count() const;
};

/// Streams every file row by row, groups samples by vehicle id and normalizes the
/// result (see normalize_dataset). Throws MissingColumn, NonMonotoneFrames (two
/// samples of one vehicle share a frame) or EmptyDataset.
[[nodiscard]] TrajectoryDataset load_dataset(
  const std::vector<std::filesystem::path> & paths, const IngestSchema & schema);

/// Brings a dataset to +x travel and front-bumper positions. Lanes whose mean
/// velocity is negative are mirrored (x, v, a negated); bounding-box positions are
/// shifted to the front bumper. Negative speeds left after mirroring are clamped
/// to zero and counted. Idempotent.
void normalize_dataset(TrajectoryDataset & dataset);

struct PairingDiagnostics
{
  std::size_t dangling_preceding_id{0};  // leader id not present in that frame
  std::size_t preceding_lane_mismatch{0};
  std::size_t preceding_not_ahead{0};    // referenced leader is not ahead: pair skipped
  std::size_t preceding_order_mismatch{0};  // another vehicle sits between: id wins
  std::size_t overlapping_pairs{0};
  std::vector<std::string> messages;  // first few diagnostics in readable form
};

struct FramePairs
{
  std::int64_t frame{0};
  std::vector<PairState> pairs;  // lane-major, front to back within a lane
};

struct PairedFrames
{
  std::vector<FramePairs> frames;  // increasing frame order
  PairingDiagnostics diagnostics;
};

/// Forms follower/leader pairs per frame and lane. The precedingId column decides
/// when present and nonzero; otherwise the nearest same-lane vehicle ahead is the
/// leader. Pairs with gap <= 0 are kept.
[[nodiscard]] PairedFrames pair_frames(const TrajectoryDataset & dataset);

}  // namespace bcv

#endif  // BCV__TRAJECTORY_INGEST_HPP_
