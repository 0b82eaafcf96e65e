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


#include "bcv/errors.hpp"
#include "bcv/trajectory_ingest.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>

namespace bcv
{
namespace
{

using test::fixture;

TrajectoryDataset load(const std::string & name, const IngestSchema & schema = {})
{
  return load_dataset({fixture("trajectories/" + name)}, schema);
}

std::filesystem::path write_csv(const test::TempDir & dir, const std::string & body)
{
  const auto path = dir.path() / "input.csv";
  std::ofstream(path) << body;
  return path;
}

void expect_same_states(const TrajectoryDataset & a, const TrajectoryDataset & b)
{
  ASSERT_EQ(a.tracks.size(), b.tracks.size());
  for (const auto & [id, track] : a.tracks) {
    const auto & other = b.tracks.at(id).samples;
    ASSERT_EQ(track.samples.size(), other.size());
    for (std::size_t k = 0; k < other.size(); ++k) {
      const auto & s = track.samples[k].state;
      const auto & o = other[k].state;
      EXPECT_EQ(s.frame, o.frame);
      EXPECT_DOUBLE_EQ(s.t, o.t);
      EXPECT_DOUBLE_EQ(s.x, o.x);
      EXPECT_DOUBLE_EQ(s.v, o.v);
      EXPECT_DOUBLE_EQ(s.a, o.a);
      EXPECT_DOUBLE_EQ(s.length, o.length);
      EXPECT_EQ(s.lane, o.lane);
      EXPECT_EQ(track.samples[k].preceding_id, other[k].preceding_id);
    }
  }
}

TEST(LoadDataset, TwoVehicleFixture)
{
  const auto ds = load("two_vehicle.csv");
  ASSERT_EQ(ds.tracks.size(), 2U);
  EXPECT_EQ(ds.sample_count(), 20U);
  EXPECT_EQ(ds.first_frame(), 0);
  EXPECT_EQ(ds.last_frame(), 9);
  EXPECT_EQ(ds.lanes, std::set<int>{1});
  EXPECT_TRUE(ds.provenance.has_preceding_id);
  EXPECT_EQ(ds.provenance.position_reference, PositionReference::FrontBumper);
  EXPECT_TRUE(ds.provenance.mirrored_lanes.empty());

  const auto & leader = ds.tracks.at(1).samples;
  const auto & follower = ds.tracks.at(2).samples;
  ASSERT_EQ(leader.size(), 10U);
  ASSERT_EQ(follower.size(), 10U);
  // Corner x of 75 plus the 5 m length puts the leader's front bumper at 80.
  EXPECT_DOUBLE_EQ(leader[0].state.x, 80.0);
  EXPECT_DOUBLE_EQ(follower[0].state.x, 40.0);
  EXPECT_DOUBLE_EQ(leader[9].state.x, 80.0 + 9 * 20.0 / 25.0);
  EXPECT_DOUBLE_EQ(follower[9].state.v, 25.0);
  EXPECT_DOUBLE_EQ(follower[4].state.t, 4.0 / 25.0);
  EXPECT_EQ(follower[0].preceding_id, 1);
}

TEST(LoadDataset, MirroredRecordingNormalizesIdentically)
{
  const auto plain = load("two_vehicle.csv");
  const auto mirrored = load("two_vehicle_mirrored.csv");
  EXPECT_EQ(mirrored.provenance.mirrored_lanes, std::set<int>{1});
  expect_same_states(plain, mirrored);
}

TEST(LoadDataset, FrontBumperReferenceKeepsPositions)
{
  IngestSchema schema;
  schema.position_reference = PositionReference::FrontBumper;
  const auto ds = load("two_vehicle.csv", schema);
  EXPECT_DOUBLE_EQ(ds.tracks.at(1).samples[0].state.x, 75.0);
}

TEST(LoadDataset, MissingLaneColumn)
{
  try {
    (void)load("two_vehicle_no_lane.csv");
    FAIL() << "expected MissingColumn";
  } catch (const MissingColumn & e) {
    EXPECT_EQ(e.column(), "laneId");
    EXPECT_STREQ(e.what(), "MissingColumn(\"laneId\")");
  }
}

TEST(LoadDataset, RemappedColumns)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "f,vid,pos,len,speed,acc,lane\n0,7,10,4,12,0,3\n1,7,10.48,4,12,0,3\n");
  IngestSchema schema;
  schema.frame = "f";
  schema.id = "vid";
  schema.x = "pos";
  schema.length = "len";
  schema.x_velocity = "speed";
  schema.x_acceleration = "acc";
  schema.lane = "lane";
  const auto ds = load_dataset({path}, schema);
  ASSERT_EQ(ds.tracks.size(), 1U);
  EXPECT_DOUBLE_EQ(ds.tracks.at(7).samples[1].state.x, 14.48);
  EXPECT_FALSE(ds.provenance.has_preceding_id);
}

TEST(LoadDataset, DuplicateFrameIsNonMonotone)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,laneId\n"
                                   "0,4,10,5,20,0,1\n1,4,10.8,5,20,0,1\n1,4,10.8,5,20,0,1\n");
  try {
    (void)load_dataset({path}, {});
    FAIL() << "expected NonMonotoneFrames";
  } catch (const NonMonotoneFrames & e) {
    EXPECT_EQ(e.vehicle_id(), 4);
  }
}

TEST(LoadDataset, OutOfOrderRowsAreSorted)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,laneId\n"
                                   "2,4,11.6,5,20,0,1\n0,4,10,5,20,0,1\n1,4,10.8,5,20,0,1\n");
  const auto ds = load_dataset({path}, {});
  const auto & s = ds.tracks.at(4).samples;
  ASSERT_EQ(s.size(), 3U);
  EXPECT_EQ(s[0].state.frame, 0);
  EXPECT_EQ(s[2].state.frame, 2);
}

TEST(LoadDataset, EmptyAndMalformedInput)
{
  test::TempDir dir;
  auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,laneId\n");
  EXPECT_THROW((void)load_dataset({path}, {}), EmptyDataset);
  path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,laneId\n0,1,abc,5,20,0,1\n");
  EXPECT_THROW((void)load_dataset({path}, {}), DataError);
  EXPECT_THROW((void)load_dataset({dir.path() / "absent.csv"}, {}), DataError);
}

TEST(LoadDataset, MultipleFilesMerge)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,laneId\n0,10,10,5,20,0,3\n");
  const auto ds = load_dataset({fixture("trajectories/two_vehicle.csv"), path}, IngestSchema{});
  EXPECT_EQ(ds.provenance.sources.size(), 2U);
  EXPECT_EQ(ds.tracks.size(), 3U);
  EXPECT_EQ(ds.lanes, (std::set<int>{1, 3}));
  // The same vehicle id and frame in two files is a duplicate sample.
  EXPECT_THROW(
    (void)load_dataset(
      {fixture("trajectories/two_vehicle.csv"), fixture("trajectories/two_vehicle.csv")}, IngestSchema{}),
    NonMonotoneFrames);
}

TEST(LoadDataset, SpeedWarningsAreNotErrors)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,laneId\n"
                                   "0,1,10,5,80,0,1\n0,2,50,5,20,0,1\n");
  const auto ds = load_dataset({path}, {});
  EXPECT_EQ(ds.quality.speed_out_of_range, 1U);
  EXPECT_FALSE(ds.quality.warnings.empty());
}

TEST(LoadDataset, SpeedsWithinRangeOnFixtures)
{
  for (const char * name : {"closing.csv", "two_episodes.csv", "multi_lane.csv", "no_conflict.csv"}) {
    const auto ds = load(name);
    EXPECT_EQ(ds.quality.speed_out_of_range, 0U) << name;
    for (const auto & [id, track] : ds.tracks) {
      for (const auto & s : track.samples) {
        EXPECT_GE(s.state.v, 0.0);
        EXPECT_LE(s.state.v, 70.0);
      }
    }
  }
}

TEST(NormalizeDataset, Idempotent)
{
  for (const char * name : {"two_vehicle_mirrored.csv", "multi_lane.csv"}) {
    const auto once = load(name);
    auto twice = once;
    normalize_dataset(twice);
    expect_same_states(once, twice);
    EXPECT_EQ(once.provenance.mirrored_lanes, twice.provenance.mirrored_lanes);
  }
}

TEST(PairFrames, ChainPairing)
{
  const auto paired = pair_frames(load("chain.csv"));
  ASSERT_EQ(paired.frames.size(), 2U);
  const auto & f0 = paired.frames[0].pairs;
  ASSERT_EQ(f0.size(), 2U);
  EXPECT_EQ(f0[0].follower.id, 2);
  EXPECT_EQ(f0[0].leader.id, 1);
  EXPECT_DOUBLE_EQ(f0[0].leader.x, 100.0);
  EXPECT_DOUBLE_EQ(f0[0].follower.x, 60.0);
  EXPECT_EQ(f0[1].follower.id, 3);
  EXPECT_EQ(f0[1].leader.id, 2);
  EXPECT_DOUBLE_EQ(f0[1].gap(), 35.0);
  // One vehicle per lane in frame 1.
  EXPECT_TRUE(paired.frames[1].pairs.empty());
}

TEST(PairFrames, PrecedingIdWinsOverPosition)
{
  const auto paired = pair_frames(load("adversarial_preceding.csv"));
  ASSERT_EQ(paired.frames.size(), 1U);
  const auto & pairs = paired.frames[0].pairs;
  ASSERT_EQ(pairs.size(), 2U);
  EXPECT_EQ(pairs[1].follower.id, 3);
  EXPECT_EQ(pairs[1].leader.id, 1);
  EXPECT_EQ(paired.diagnostics.preceding_order_mismatch, 1U);
  ASSERT_FALSE(paired.diagnostics.messages.empty());
  EXPECT_NE(paired.diagnostics.messages[0].find("precedingId used"), std::string::npos);
}

TEST(PairFrames, DanglingAndInvalidPrecedingId)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,precedingId,laneId\n"
                                   "0,1,95,5,20,0,0,1\n"
                                   "0,2,55,5,20,0,99,1\n"
                                   "0,3,15,5,20,0,4,1\n"
                                   "0,4,195,5,20,0,0,2\n"
                                   "0,5,-50,5,20,0,3,1\n"
                                   "0,6,-100,5,20,0,5,1\n"
                                   "0,7,-200,5,20,0,6,1\n");
  auto ds = load_dataset({path}, {});
  const auto paired = pair_frames(ds);
  const auto & d = paired.diagnostics;
  EXPECT_EQ(d.dangling_preceding_id, 1U);
  EXPECT_EQ(d.preceding_lane_mismatch, 1U);
  EXPECT_EQ(paired.frames[0].pairs.size(), 3U);
}

TEST(PairFrames, PrecedingNotAheadIsSkipped)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,precedingId,laneId\n"
                                   "0,1,95,5,20,0,2,1\n"
                                   "0,2,55,5,20,0,0,1\n");
  const auto paired = pair_frames(load_dataset({path}, {}));
  EXPECT_EQ(paired.diagnostics.preceding_not_ahead, 1U);
  // Vehicle 2 has precedingId 0 and falls back to the vehicle ahead.
  ASSERT_EQ(paired.frames[0].pairs.size(), 1U);
  EXPECT_EQ(paired.frames[0].pairs[0].follower.id, 2);
}

TEST(PairFrames, OverlapsAreKeptAndCounted)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,laneId\n"
                                   "0,1,100,5,20,0,1\n0,2,98,5,25,0,1\n");
  const auto paired = pair_frames(load_dataset({path}, {}));
  ASSERT_EQ(paired.frames[0].pairs.size(), 1U);
  EXPECT_LE(paired.frames[0].pairs[0].gap(), 0.0);
  EXPECT_EQ(paired.diagnostics.overlapping_pairs, 1U);
}

TEST(PairFrames, GapReferenceFromSchema)
{
  test::TempDir dir;
  const auto path = write_csv(dir, "frame,id,x,width,xVelocity,xAcceleration,laneId\n"
                                   "0,1,96,4,20,0,1\n0,2,48,12,25,0,1\n");
  IngestSchema schema;
  EXPECT_DOUBLE_EQ(pair_frames(load_dataset({path}, schema)).frames[0].pairs[0].gap(), 36.0);
  schema.gap_reference = GapReference::FollowerLength;
  EXPECT_DOUBLE_EQ(pair_frames(load_dataset({path}, schema)).frames[0].pairs[0].gap(), 28.0);
  schema.gap_reference = GapReference::Fixed;
  schema.fixed_gap_length = 5.0;
  EXPECT_DOUBLE_EQ(pair_frames(load_dataset({path}, schema)).frames[0].pairs[0].gap(), 35.0);
}

// Every vehicle with someone ahead in its lane is a follower exactly once.
TEST(PairFramesProperty, Totality)
{
  test::Rng rng(0x7A1);
  for (int trial = 0; trial < 200; ++trial) {
    TrajectoryDataset ds;
    const int vehicles = rng.integer(1, 25);
    for (int id = 1; id <= vehicles; ++id) {
      VehicleState s;
      s.id = id;
      s.frame = 0;
      s.lane = rng.integer(1, 4);
      s.x = rng.uniform(0.0, 500.0);
      s.v = rng.uniform(0.0, 40.0);
      ds.tracks[id].id = id;
      ds.tracks[id].samples.push_back({s, 0});
      ds.lanes.insert(s.lane);
    }
    const auto paired = pair_frames(ds);
    ASSERT_EQ(paired.frames.size(), 1U);
    std::map<std::int64_t, int> as_follower;
    for (const auto & p : paired.frames[0].pairs) {
      ++as_follower[p.follower.id];
      EXPECT_EQ(p.follower.lane, p.leader.lane);
      EXPECT_GT(p.leader.x, p.follower.x);
    }
    for (const auto & [id, track] : ds.tracks) {
      const auto & me = track.samples[0].state;
      bool has_leader = false;
      for (const auto & [other_id, other] : ds.tracks) {
        const auto & o = other.samples[0].state;
        has_leader = has_leader || (other_id != id && o.lane == me.lane && o.x > me.x);
      }
      EXPECT_EQ(as_follower[id], has_leader ? 1 : 0) << "trial " << trial << " id " << id;
    }
  }
}

}  // namespace
}  // namespace bcv
