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

#include "bcv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

namespace bcv
{

FrameWindow full_window(const TrajectoryDataset & dataset)
{
  return {dataset.first_frame(), dataset.last_frame()};
}

FrameWindow leading_window(const TrajectoryDataset & dataset, std::int64_t frames)
{
  if (frames <= 0) {
    throw EmptyWindow("window length must be positive");
  }
  const auto first = dataset.first_frame();
  return {first, std::min(dataset.last_frame(), first + frames - 1)};
}

namespace
{

FrameInstance make_instance(const PairState & pair, std::int64_t frame, const BarrierParams & params)
{
  FrameInstance inst;
  inst.pair = pair;
  inst.frame = frame;
  inst.ttc = ttc(pair);
  inst.cls = classify(pair, params);
  return inst;
}

void check_window(const FrameWindow & window)
{
  if (window.first_frame > window.last_frame) {
    throw EmptyWindow(
      "window [" + std::to_string(window.first_frame) + ", " +
      std::to_string(window.last_frame) + "] is empty");
  }
}

}  // namespace

void rebuild_events(ScanResult & scan)
{
  std::map<PairKey, std::vector<const FrameInstance *>> by_pair;
  for (const auto & inst : scan.instances) {
    by_pair[inst.key()].push_back(&inst);
  }
  scan.events.clear();
  scan.collisions.clear();
  for (auto & [key, list] : by_pair) {
    std::sort(list.begin(), list.end(), [](const auto * lhs, const auto * rhs) {
      return lhs->frame < rhs->frame;
    });
    const FrameInstance * prev = nullptr;
    for (const auto * inst : list) {
      const bool continues = prev != nullptr && inst->frame == prev->frame + 1 && prev->cls == inst->cls;
      if (inst->cls == PairClass::Conflict) {
        if (continues) {
          auto & ev = scan.events.back();
          ev.last_frame = inst->frame;
          ev.min_ttc = std::min(ev.min_ttc, inst->ttc.seconds);
          ++ev.frame_count;
        } else {
          scan.events.push_back(
            {key.follower_id, key.leader_id, inst->lane(), inst->frame, inst->frame,
             inst->ttc.seconds, 1});
        }
      } else if (inst->cls == PairClass::Collision) {
        if (continues) {
          auto & ev = scan.collisions.back();
          ev.last_frame = inst->frame;
          ++ev.frame_count;
        } else {
          scan.collisions.push_back(
            {key.follower_id, key.leader_id, inst->lane(), inst->frame, inst->frame, 1});
        }
      }
      prev = inst;
    }
  }
  auto order = [](const auto & lhs, const auto & rhs) {
    return std::tie(lhs.first_frame, lhs.follower_id, lhs.leader_id) <
           std::tie(rhs.first_frame, rhs.follower_id, rhs.leader_id);
  };
  std::sort(scan.events.begin(), scan.events.end(), order);
  std::sort(scan.collisions.begin(), scan.collisions.end(), order);
}

ScanResult scan_conflicts(
  const PairedFrames & paired, const BarrierParams & params, const FrameWindow & window)
{
  check_window(window);
  ScanResult scan;
  scan.window = window;
  bool any_frame = false;
  for (const auto & fp : paired.frames) {
    if (!window.contains(fp.frame)) {
      continue;
    }
    any_frame = true;
    for (const auto & pair : fp.pairs) {
      scan.instances.push_back(make_instance(pair, fp.frame, params));
    }
  }
  if (!any_frame) {
    throw EmptyWindow(
      "no recorded frame inside [" + std::to_string(window.first_frame) + ", " +
      std::to_string(window.last_frame) + "]");
  }
  rebuild_events(scan);
  return scan;
}

ScanResult scan_conflicts(
  const TrajectoryDataset & dataset, const BarrierParams & params, const FrameWindow & window)
{
  return scan_conflicts(pair_frames(dataset), params, window);
}

AdjustmentStrategy AdjustmentStrategy::instantaneous(double t_target)
{
  AdjustmentStrategy s;
  s.kind = Kind::Instantaneous;
  s.t_target = t_target;
  return s;
}

AdjustmentStrategy AdjustmentStrategy::decel_limited(double t_target, double a_min, double dt)
{
  AdjustmentStrategy s;
  s.kind = Kind::DecelLimited;
  s.t_target = t_target;
  s.a_min = a_min;
  s.dt = dt;
  return s;
}

void AdjustmentStrategy::validate(const BarrierParams & params) const
{
  if (!(t_target >= params.t_safe)) {
    throw InvalidSpec("adjustment target TTC must not be below t_safe");
  }
  if (kind == Kind::DecelLimited) {
    if (!(a_min < 0.0)) {
      throw InvalidSpec("braking cap a_min must be negative");
    }
    if (!(dt > 0.0)) {
      throw InvalidSpec("adjustment step dt must be positive");
    }
  }
}

const char * to_string(AdjustmentStrategy::Kind kind)
{
  return kind == AdjustmentStrategy::Kind::Instantaneous ? "instantaneous" : "decel_limited";
}

const char * to_string(AdjustmentMode mode)
{
  return mode == AdjustmentMode::PerFrame ? "per_frame" : "propagated";
}

double adjust_instantaneous(const PairState & pair, const BarrierParams & params, double t_target)
{
  if (classify(pair, params) != PairClass::Conflict) {
    return pair.follower.v;
  }
  const double gap = pair.gap();
  double v = std::min(pair.follower.v, pair.leader.v + gap / t_target);
  // gap / t_target rounds; step down until the recomputed TTC clears the target.
  auto probe = pair;
  for (;;) {
    probe.follower.v = v;
    const auto t = ttc(probe);
    if (!t.finite() || t.seconds >= t_target) {
      break;
    }
    v = std::nextafter(v, -std::numeric_limits<double>::infinity());
  }
  return std::max(v, 0.0);
}

double adjust_decel_limited(
  const PairState & pair, const BarrierParams & params, const AdjustmentStrategy & strategy)
{
  if (classify(pair, params) != PairClass::Conflict) {
    return pair.follower.v;
  }
  const double target = adjust_instantaneous(pair, params, strategy.t_target);
  return std::max(target, pair.follower.v + strategy.a_min * strategy.dt);
}

double adjust_velocity(
  const PairState & pair, const BarrierParams & params, const AdjustmentStrategy & strategy)
{
  return strategy.kind == AdjustmentStrategy::Kind::Instantaneous
           ? adjust_instantaneous(pair, params, strategy.t_target)
           : adjust_decel_limited(pair, params, strategy);
}

void TtcHistogram::add(double ttc_seconds)
{
  if (ttc_seconds >= kUpper) {
    ++overflow;
    return;
  }
  const auto bin = static_cast<std::size_t>(std::floor(std::max(ttc_seconds, 0.0) / kBinWidth));
  ++counts[std::min(bin, kBins - 1)];
}

ConflictReport summarize(const ScanResult & before, const ScanResult & after)
{
  if (!(before.window == after.window)) {
    throw WindowMismatch("before and after scans cover different windows");
  }
  if (before.instances.size() != after.instances.size()) {
    throw WindowMismatch("before and after scans hold different numbers of pair instances");
  }
  for (std::size_t i = 0; i < before.instances.size(); ++i) {
    const auto & b = before.instances[i];
    const auto & a = after.instances[i];
    if (b.frame != a.frame || !(b.key() == a.key())) {
      throw WindowMismatch("before and after scans pair different vehicles");
    }
  }

  ConflictReport report;
  report.window = before.window;
  std::map<int, LaneStats> lanes;
  for (std::size_t i = 0; i < before.instances.size(); ++i) {
    const auto & b = before.instances[i];
    const auto & a = after.instances[i];
    auto & stats = lanes[b.lane()];
    stats.lane = b.lane();
    stats.before += b.cls == PairClass::Conflict;
    stats.after += a.cls == PairClass::Conflict;
    stats.collisions_before += b.cls == PairClass::Collision;
    stats.collisions_after += a.cls == PairClass::Collision;
    if (b.ttc.finite()) {
      report.hist_before.add(b.ttc.seconds);
    }
    if (a.ttc.finite()) {
      report.hist_after.add(a.ttc.seconds);
    }
  }
  for (const auto & ev : before.events) {
    ++lanes[ev.lane].events_before;
  }
  for (const auto & ev : after.events) {
    ++lanes[ev.lane].events_after;
  }

  auto finish = [](LaneStats & s) {
    s.reduction_pct = s.before > 0 ? 100.0 * (static_cast<double>(s.before) - static_cast<double>(s.after)) /
                                       static_cast<double>(s.before)
                                   : 0.0;
  };
  report.total.lane = -1;
  for (auto & [lane, stats] : lanes) {
    finish(stats);
    report.total.before += stats.before;
    report.total.after += stats.after;
    report.total.events_before += stats.events_before;
    report.total.events_after += stats.events_after;
    report.total.collisions_before += stats.collisions_before;
    report.total.collisions_after += stats.collisions_after;
    report.lanes.push_back(stats);
  }
  finish(report.total);
  report.no_conflicts = report.total.before == 0;
  return report;
}

namespace
{

TrackSample * find_sample(TrajectoryDataset & dataset, std::int64_t id, std::int64_t frame)
{
  const auto it = dataset.tracks.find(id);
  if (it == dataset.tracks.end()) {
    return nullptr;
  }
  auto & samples = it->second.samples;
  const auto pos = std::lower_bound(
    samples.begin(), samples.end(), frame,
    [](const TrackSample & s, std::int64_t f) { return s.state.frame < f; });
  if (pos == samples.end() || pos->state.frame != frame) {
    return nullptr;
  }
  return &*pos;
}

void adjust_per_frame(
  AdjustmentResult & result, const AdjustmentStrategy & strategy, const BarrierParams & params)
{
  result.after = result.before;
  for (auto & inst : result.after.instances) {
    if (inst.cls != PairClass::Conflict) {
      continue;
    }
    const double v = adjust_velocity(inst.pair, params, strategy);
    if (v == inst.pair.follower.v) {
      continue;
    }
    auto adjusted = inst.pair;
    adjusted.follower.v = v;
    inst = make_instance(adjusted, inst.frame, params);
    inst.adjusted = true;
    ++result.adjusted_instances;
    if (auto * sample = find_sample(result.adjusted, adjusted.follower.id, inst.frame)) {
      sample->state.v = v;
    }
  }
  rebuild_events(result.after);
}

struct Carry
{
  std::int64_t prev_frame{0};
  double v_recorded_prev{0.0};
  double v_final_prev{0.0};
  double lag{0.0};  // [m] accumulated distance behind the recorded track
  bool touched{false};
};

void adjust_propagated(
  AdjustmentResult & result, const TrajectoryDataset & dataset, const PairedFrames & paired,
  const AdjustmentStrategy & strategy, const BarrierParams & params)
{
  const auto & window = result.before.window;
  std::map<std::int64_t, std::vector<const TrackSample *>> by_frame;
  for (const auto & [id, track] : dataset.tracks) {
    for (const auto & s : track.samples) {
      if (window.contains(s.state.frame)) {
        by_frame[s.state.frame].push_back(&s);
      }
    }
  }
  std::unordered_map<std::int64_t, const FramePairs *> pairs_at;
  for (const auto & fp : paired.frames) {
    pairs_at.emplace(fp.frame, &fp);
  }

  std::unordered_map<std::int64_t, Carry> carry;
  result.after.window = window;
  result.after.instances.clear();

  for (const auto & [frame, samples] : by_frame) {
    const auto it_pairs = pairs_at.find(frame);
    const FramePairs * fp = it_pairs == pairs_at.end() ? nullptr : it_pairs->second;

    std::unordered_map<std::int64_t, const PairState *> leader_of;
    if (fp != nullptr) {
      for (const auto & p : fp->pairs) {
        leader_of.emplace(p.follower.id, &p);
      }
    }
    std::unordered_map<std::int64_t, const TrackSample *> recorded;
    for (const auto * s : samples) {
      recorded.emplace(s->state.id, s);
    }
    std::unordered_map<std::int64_t, VehicleState> settled;
    std::unordered_map<std::int64_t, double> lag_now;

    auto settle = [&](auto & self, std::int64_t id) -> const VehicleState & {
      if (const auto it = settled.find(id); it != settled.end()) {
        return it->second;
      }
      const auto & rec = recorded.at(id)->state;
      VehicleState state = rec;
      double lag = 0.0;
      if (const auto c = carry.find(id); c != carry.end() && c->second.touched) {
        const auto & prev = c->second;
        const double dt = static_cast<double>(frame - prev.prev_frame) / dataset.frame_rate;
        lag = prev.lag + (prev.v_recorded_prev - prev.v_final_prev) * dt;
        state.x = rec.x - lag;
        state.v = std::min(rec.v, prev.v_final_prev + params.a_max * dt);
      }
      lag_now[id] = lag;
      if (const auto lp = leader_of.find(id); lp != leader_of.end()) {
        const auto & leader = self(self, lp->second->leader.id);
        const auto pair = make_pair(state, leader, dataset.gap_reference, dataset.fixed_gap_length);
        if (classify(pair, params) == PairClass::Conflict) {
          state.v = adjust_velocity(pair, params, strategy);
        }
      }
      return settled.emplace(id, state).first->second;
    };

    for (const auto * s : samples) {
      settle(settle, s->state.id);
    }

    if (fp != nullptr) {
      for (const auto & p : fp->pairs) {
        const auto & f = settled.at(p.follower.id);
        const auto & l = settled.at(p.leader.id);
        auto inst = make_instance(
          make_pair(f, l, dataset.gap_reference, dataset.fixed_gap_length), frame, params);
        inst.adjusted = f.v != p.follower.v;
        result.adjusted_instances += inst.adjusted;
        result.after.instances.push_back(inst);
      }
    }

    for (const auto & [id, state] : settled) {
      const auto & rec = recorded.at(id)->state;
      auto & c = carry[id];
      c.lag = lag_now[id];
      c.touched = c.touched || state.v != rec.v || c.lag != 0.0;
      c.prev_frame = frame;
      c.v_recorded_prev = rec.v;
      c.v_final_prev = state.v;
      if (auto * sample = find_sample(result.adjusted, id, frame)) {
        sample->state.x = state.x;
        sample->state.v = state.v;
      }
    }
  }
  rebuild_events(result.after);
}

}  // namespace

AdjustmentResult apply_adjustment(
  const TrajectoryDataset & dataset, const AdjustmentStrategy & strategy,
  const BarrierParams & params, const FrameWindow & window, AdjustmentMode mode)
{
  params.validate();
  strategy.validate(params);
  const auto paired = pair_frames(dataset);

  AdjustmentResult result;
  result.adjusted = dataset;
  result.before = scan_conflicts(paired, params, window);
  if (mode == AdjustmentMode::PerFrame) {
    adjust_per_frame(result, strategy, params);
  } else {
    adjust_propagated(result, dataset, paired, strategy, params);
  }
  result.report = summarize(result.before, result.after);
  return result;
}

}  // namespace bcv
