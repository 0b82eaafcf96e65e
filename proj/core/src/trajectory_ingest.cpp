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

#include "bcv/trajectory_ingest.hpp"

#include "bcv/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <optional>
#include <string_view>
#include <unordered_map>

namespace bcv
{

namespace
{

constexpr double kMaxPlausibleSpeed = 70.0;  // [m/s]
constexpr std::size_t kMaxMessages = 20;

std::vector<std::string_view> split_fields(std::string_view line)
{
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_field(std::string_view text, const std::filesystem::path & path, std::size_t line_no,
  std::string_view column)
{
  text = trim(text);
  if (!text.empty() && text.front() == '+') {
    text.remove_prefix(1);
  }
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError(
      path.string() + ":" + std::to_string(line_no) + ": cannot parse column '" +
      std::string(column) + "' value '" + std::string(text) + "'");
  }
  return value;
}

struct ColumnIndex
{
  std::size_t frame, id, x, v, a, length, lane;
  std::optional<std::size_t> preceding;
  std::size_t width;  // number of header fields
};

ColumnIndex resolve_columns(std::string_view header, const IngestSchema & schema)
{
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") {
    header.remove_prefix(3);
  }
  const auto names = split_fields(header);
  auto find = [&names](const std::string & wanted) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (trim(names[i]) == wanted) {
        return i;
      }
    }
    return std::nullopt;
  };
  auto require = [&find](const std::string & wanted) {
    const auto idx = find(wanted);
    if (!idx) {
      throw MissingColumn(wanted);
    }
    return *idx;
  };
  ColumnIndex idx{};
  idx.frame = require(schema.frame);
  idx.id = require(schema.id);
  idx.x = require(schema.x);
  idx.v = require(schema.x_velocity);
  idx.a = require(schema.x_acceleration);
  idx.length = require(schema.length);
  idx.lane = require(schema.lane);
  if (!schema.preceding_id.empty()) {
    idx.preceding = find(schema.preceding_id);
  }
  idx.width = names.size();
  return idx;
}

void read_file(
  const std::filesystem::path & path, const IngestSchema & schema, TrajectoryDataset & dataset,
  bool & any_preceding)
{
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw EmptyDataset(path.string() + " has no header row");
  }
  const auto cols = resolve_columns(line, schema);
  any_preceding = any_preceding || cols.preceding.has_value();

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() < cols.width) {
      throw DataError(
        path.string() + ":" + std::to_string(line_no) + ": expected " +
        std::to_string(cols.width) + " fields, found " + std::to_string(fields.size()));
    }
    TrackSample sample;
    auto & s = sample.state;
    s.frame = parse_field<std::int64_t>(fields[cols.frame], path, line_no, schema.frame);
    s.id = parse_field<std::int64_t>(fields[cols.id], path, line_no, schema.id);
    s.x = parse_field<double>(fields[cols.x], path, line_no, schema.x);
    s.v = parse_field<double>(fields[cols.v], path, line_no, schema.x_velocity);
    s.a = parse_field<double>(fields[cols.a], path, line_no, schema.x_acceleration);
    s.length = parse_field<double>(fields[cols.length], path, line_no, schema.length);
    s.lane = parse_field<int>(fields[cols.lane], path, line_no, schema.lane);
    s.t = static_cast<double>(s.frame) / schema.frame_rate;
    if (cols.preceding) {
      sample.preceding_id =
        parse_field<std::int64_t>(fields[*cols.preceding], path, line_no, schema.preceding_id);
    }
    auto & track = dataset.tracks[s.id];
    track.id = s.id;
    track.samples.push_back(sample);
  }
}

void warn(DataQuality & q, std::string message)
{
  if (q.warnings.size() < kMaxMessages) {
    q.warnings.push_back(std::move(message));
  }
}

}  // namespace

void IngestSchema::validate() const
{
  if (!(frame_rate > 0.0)) {
    throw InvalidSpec("frame rate must be positive");
  }
  std::vector<std::string> names{frame, id, x, x_velocity, x_acceleration, length, lane};
  if (!preceding_id.empty()) {
    names.push_back(preceding_id);
  }
  for (const auto & n : names) {
    if (n.empty()) {
      throw InvalidSpec("column mapping contains an empty name");
    }
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw InvalidSpec("column mapping names must be distinct");
  }
}

std::int64_t TrajectoryDataset::first_frame() const
{
  auto first = std::numeric_limits<std::int64_t>::max();
  for (const auto & [id, track] : tracks) {
    if (!track.samples.empty()) {
      first = std::min(first, track.samples.front().state.frame);
    }
  }
  return first;
}

std::int64_t TrajectoryDataset::last_frame() const
{
  auto last = std::numeric_limits<std::int64_t>::min();
  for (const auto & [id, track] : tracks) {
    if (!track.samples.empty()) {
      last = std::max(last, track.samples.back().state.frame);
    }
  }
  return last;
}

std::size_t TrajectoryDataset::sample_count() const
{
  std::size_t n = 0;
  for (const auto & [id, track] : tracks) {
    n += track.samples.size();
  }
  return n;
}

TrajectoryDataset load_dataset(
  const std::vector<std::filesystem::path> & paths, const IngestSchema & schema)
{
  schema.validate();
  TrajectoryDataset dataset;
  dataset.frame_rate = schema.frame_rate;
  dataset.gap_reference = schema.gap_reference;
  dataset.fixed_gap_length = schema.fixed_gap_length;
  dataset.provenance.position_reference = schema.position_reference;

  bool any_preceding = false;
  for (const auto & path : paths) {
    read_file(path, schema, dataset, any_preceding);
    dataset.provenance.sources.push_back(path);
  }
  dataset.provenance.has_preceding_id = any_preceding;
  if (dataset.tracks.empty()) {
    throw EmptyDataset("no trajectory rows found");
  }

  for (auto & [id, track] : dataset.tracks) {
    auto & samples = track.samples;
    std::stable_sort(samples.begin(), samples.end(), [](const auto & lhs, const auto & rhs) {
      return lhs.state.frame < rhs.state.frame;
    });
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].state.frame <= samples[i - 1].state.frame) {
        throw NonMonotoneFrames(id);
      }
    }
    for (const auto & s : samples) {
      dataset.lanes.insert(s.state.lane);
    }
  }

  normalize_dataset(dataset);
  return dataset;
}

void normalize_dataset(TrajectoryDataset & dataset)
{
  std::map<int, std::pair<double, std::size_t>> lane_speed;
  for (const auto & [id, track] : dataset.tracks) {
    for (const auto & s : track.samples) {
      auto & acc = lane_speed[s.state.lane];
      acc.first += s.state.v;
      acc.second += 1;
    }
  }
  std::set<int> mirror;
  for (const auto & [lane, acc] : lane_speed) {
    if (acc.second > 0 && acc.first / static_cast<double>(acc.second) < 0.0) {
      mirror.insert(lane);
    }
  }

  const bool corner = dataset.provenance.position_reference == PositionReference::BoundingBoxCorner;
  auto & q = dataset.quality;
  for (auto & [id, track] : dataset.tracks) {
    for (auto & sample : track.samples) {
      auto & s = sample.state;
      const bool flip = mirror.count(s.lane) > 0;
      if (flip) {
        // The low-x box edge is the front bumper of a vehicle travelling towards -x.
        s.x = -s.x;
        s.v = -s.v;
        s.a = -s.a;
      } else if (corner) {
        s.x += s.length;
      }
      if (s.v < 0.0) {
        ++q.negative_speed_clamped;
        warn(q, "vehicle " + std::to_string(s.id) + " frame " + std::to_string(s.frame) +
                  ": negative speed " + std::to_string(s.v) + " clamped to 0");
        s.v = 0.0;
      }
      if (s.v > kMaxPlausibleSpeed) {
        ++q.speed_out_of_range;
        warn(q, "vehicle " + std::to_string(s.id) + " frame " + std::to_string(s.frame) +
                  ": implausible speed " + std::to_string(s.v) + " m/s");
      }
      if (!(s.length > 0.0)) {
        ++q.nonpositive_length;
        warn(q, "vehicle " + std::to_string(s.id) + ": non-positive length");
      }
    }
  }
  dataset.provenance.mirrored_lanes.insert(mirror.begin(), mirror.end());
  dataset.provenance.position_reference = PositionReference::FrontBumper;
}

PairedFrames pair_frames(const TrajectoryDataset & dataset)
{
  std::map<std::int64_t, std::vector<const TrackSample *>> by_frame;
  for (const auto & [id, track] : dataset.tracks) {
    for (const auto & s : track.samples) {
      by_frame[s.state.frame].push_back(&s);
    }
  }

  PairedFrames out;
  auto & diag = out.diagnostics;
  auto note = [&diag](std::string message) {
    if (diag.messages.size() < kMaxMessages) {
      diag.messages.push_back(std::move(message));
    }
  };
  const bool use_preceding = dataset.provenance.has_preceding_id;

  for (const auto & [frame, samples] : by_frame) {
    FramePairs fp;
    fp.frame = frame;
    std::unordered_map<std::int64_t, const TrackSample *> by_id;
    std::map<int, std::vector<const TrackSample *>> by_lane;
    for (const auto * s : samples) {
      by_id.emplace(s->state.id, s);
      by_lane[s->state.lane].push_back(s);
    }
    for (auto & [lane, members] : by_lane) {
      std::sort(members.begin(), members.end(), [](const auto * lhs, const auto * rhs) {
        if (lhs->state.x != rhs->state.x) {
          return lhs->state.x > rhs->state.x;
        }
        return lhs->state.id < rhs->state.id;
      });
      for (std::size_t k = 0; k < members.size(); ++k) {
        const auto * follower = members[k];
        const TrackSample * nearest = nullptr;
        for (std::size_t j = k; j-- > 0;) {
          if (members[j]->state.x > follower->state.x) {
            nearest = members[j];
            break;
          }
        }

        const TrackSample * leader = nullptr;
        if (use_preceding && follower->preceding_id != 0) {
          const auto it = by_id.find(follower->preceding_id);
          const auto tag = "frame " + std::to_string(frame) + " vehicle " +
                           std::to_string(follower->state.id) + ": ";
          if (it == by_id.end()) {
            ++diag.dangling_preceding_id;
            note(tag + "DanglingPrecedingId(" + std::to_string(follower->preceding_id) + ")");
            continue;
          }
          leader = it->second;
          if (leader->state.lane != follower->state.lane) {
            ++diag.preceding_lane_mismatch;
            note(tag + "preceding vehicle is in lane " + std::to_string(leader->state.lane));
            continue;
          }
          if (!(leader->state.x > follower->state.x)) {
            ++diag.preceding_not_ahead;
            note(tag + "preceding vehicle is not ahead; pair skipped");
            continue;
          }
          if (nearest != nullptr && nearest != leader) {
            ++diag.preceding_order_mismatch;
            note(
              tag + "precedingId " + std::to_string(leader->state.id) +
              " differs from nearest vehicle ahead " + std::to_string(nearest->state.id) +
              "; precedingId used");
          }
        } else {
          leader = nearest;
        }
        if (leader == nullptr) {
          continue;
        }
        auto pair =
          make_pair(follower->state, leader->state, dataset.gap_reference, dataset.fixed_gap_length);
        if (!(pair.gap() > 0.0)) {
          ++diag.overlapping_pairs;
        }
        fp.pairs.push_back(pair);
      }
    }
    out.frames.push_back(std::move(fp));
  }
  return out;
}

}  // namespace bcv
