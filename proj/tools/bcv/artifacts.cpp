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

#include "bcv/artifacts.hpp"

#include "bcv_cli/version.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <json.hpp>

namespace bcv::cli
{

using nlohmann::json;

namespace
{

/// JSON numbers carry at most six fractional digits.
double round6(double value)
{
  const double r = std::round(value * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;
}

json header(const Stamp & stamp)
{
  return {
    {"schema_version", kSchemaVersion},
    {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
    {"config_digest", stamp.config_digest},
    {"command", stamp.command},
  };
}

std::string csv_banner(const Stamp & stamp)
{
  return std::string("# ") + kToolName + " " + kToolVersion + " schema_version=" +
         std::to_string(kSchemaVersion) + " command=" + stamp.command +
         " config_digest=" + stamp.config_digest + "\n";
}

json window_json(const FrameWindow & w)
{
  return {{"first_frame", w.first_frame}, {"last_frame", w.last_frame}, {"frames", w.size()}};
}

json histogram_json(const TtcHistogram & h)
{
  return {{"counts", h.counts}, {"overflow", h.overflow}};
}

json lane_json(const LaneStats & s)
{
  json j = {
    {"before", s.before},
    {"after", s.after},
    {"reduction_pct", round6(s.reduction_pct)},
    {"events_before", s.events_before},
    {"events_after", s.events_after},
    {"collisions_before", s.collisions_before},
    {"collisions_after", s.collisions_after},
  };
  if (s.lane >= 0) {
    j["lane"] = s.lane;
  }
  return j;
}

json pairing_json(const PairingDiagnostics & d)
{
  return {
    {"dangling_preceding_id", d.dangling_preceding_id},
    {"preceding_lane_mismatch", d.preceding_lane_mismatch},
    {"preceding_not_ahead", d.preceding_not_ahead},
    {"preceding_order_mismatch", d.preceding_order_mismatch},
    {"overlapping_pairs", d.overlapping_pairs},
    {"messages", d.messages},
  };
}

json quality_json(const DataQuality & q)
{
  return {
    {"negative_speed_clamped", q.negative_speed_clamped},
    {"speed_out_of_range", q.speed_out_of_range},
    {"nonpositive_length", q.nonpositive_length},
    {"warnings", q.warnings},
  };
}

}  // namespace

std::string fixed6(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", round6(value));
  return buf;
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
}

std::string verdict_json(const Stamp & stamp, const VerifyOutcome & o)
{
  json j = header(stamp);
  j["mode"] = to_string(o.spec.mode);
  j["n"] = o.spec.n;
  j["status"] = to_string(o.run.status);
  if (o.run.model) {
    json model = json::object();
    for (const auto & [name, literal] : o.run.model->values) {
      model[name] = {{"literal", literal.text}, {"value", round6(literal.value)}};
    }
    j["model"] = model;
  }
  if (o.run.status == SolverRun::Status::LaunchFailure || o.run.status == SolverRun::Status::Timeout) {
    j["detail"] = o.run.detail;
  }
  j["validated"] = o.validated;
  j["oracle_agreement"] = o.oracle_agreement;
  json oracle = {{"counterexample_found", o.oracle_cex.has_value()}};
  if (o.oracle_cex) {
    oracle["counterexample"] = {
      {"gap", round6(o.oracle_cex->gap)},
      {"closing_speed", round6(o.oracle_cex->closing_speed)},
      {"follower_accel", round6(o.oracle_cex->follower_accel)},
      {"leader_accel", round6(o.oracle_cex->leader_accel)},
    };
    oracle["counterexample_validated"] =
      o.oracle_cex_validated ? json(*o.oracle_cex_validated) : json(nullptr);
  }
  j["oracle"] = oracle;
  return j.dump(2) + "\n";
}

std::string conflicts_json(
  const Stamp & stamp, const ScanResult & scan, const PairingDiagnostics & pairing,
  const DataQuality & quality)
{
  json j = header(stamp);
  j["window"] = window_json(scan.window);
  json events = json::array();
  for (const auto & e : scan.events) {
    events.push_back({
      {"follower_id", e.follower_id},
      {"leader_id", e.leader_id},
      {"lane", e.lane},
      {"first_frame", e.first_frame},
      {"last_frame", e.last_frame},
      {"frame_count", e.frame_count},
      {"min_ttc", round6(e.min_ttc)},
    });
  }
  j["events"] = events;
  json collisions = json::array();
  for (const auto & e : scan.collisions) {
    collisions.push_back({
      {"follower_id", e.follower_id},
      {"leader_id", e.leader_id},
      {"lane", e.lane},
      {"first_frame", e.first_frame},
      {"last_frame", e.last_frame},
      {"frame_count", e.frame_count},
    });
  }
  j["collisions"] = collisions;

  std::map<int, std::array<std::size_t, 4>> lanes;  // instances, conflicts, events, collisions
  for (const auto & inst : scan.instances) {
    auto & l = lanes[inst.lane()];
    ++l[0];
    l[1] += inst.cls == PairClass::Conflict;
    l[3] += inst.cls == PairClass::Collision;
  }
  for (const auto & e : scan.events) {
    ++lanes[e.lane][2];
  }
  json lane_rows = json::array();
  std::array<std::size_t, 4> total{};
  for (const auto & [lane, c] : lanes) {
    lane_rows.push_back({
      {"lane", lane},
      {"pair_instances", c[0]},
      {"conflict_instances", c[1]},
      {"events", c[2]},
      {"collision_instances", c[3]},
    });
    for (std::size_t k = 0; k < 4; ++k) {
      total[k] += c[k];
    }
  }
  j["lanes"] = lane_rows;
  j["total"] = {
    {"pair_instances", total[0]},
    {"conflict_instances", total[1]},
    {"events", total[2]},
    {"collision_instances", total[3]},
  };
  j["diagnostics"] = {{"pairing", pairing_json(pairing)}, {"data_quality", quality_json(quality)}};
  return j.dump(2) + "\n";
}

std::string ttc_per_frame_csv(const Stamp & stamp, const ScanResult & scan)
{
  std::string out = csv_banner(stamp);
  out += "pair_id,follower_id,leader_id,lane,frame,gap,closing_speed,ttc,ttc_kind,class\n";
  for (const auto & inst : scan.instances) {
    const auto key = inst.key();
    out += std::to_string(key.follower_id) + "-" + std::to_string(key.leader_id) + ",";
    out += std::to_string(key.follower_id) + "," + std::to_string(key.leader_id) + ",";
    out += std::to_string(inst.lane()) + "," + std::to_string(inst.frame) + ",";
    out += fixed6(inst.pair.gap()) + "," + fixed6(inst.pair.closing_speed()) + ",";
    out += (inst.ttc.finite() ? fixed6(inst.ttc.seconds) : std::string()) + ",";
    out += std::string(to_string(inst.ttc.kind)) + "," + to_string(inst.cls) + "\n";
  }
  return out;
}

std::string report_json(
  const Stamp & stamp, const AdjustmentResult & result, const AdjustmentStrategy & strategy,
  AdjustmentMode mode)
{
  const auto & r = result.report;
  json j = header(stamp);
  json strat = {{"kind", to_string(strategy.kind)}, {"t_target", round6(strategy.t_target)}};
  if (strategy.kind == AdjustmentStrategy::Kind::DecelLimited) {
    strat["a_min"] = round6(strategy.a_min);
    strat["dt"] = round6(strategy.dt);
  }
  j["strategy"] = strat;
  j["mode"] = to_string(mode);
  j["window"] = window_json(r.window);
  json lanes = json::array();
  for (const auto & l : r.lanes) {
    lanes.push_back(lane_json(l));
  }
  j["lanes"] = lanes;
  j["total"] = lane_json(r.total);
  j["no_conflicts"] = r.no_conflicts;
  j["adjusted_instances"] = result.adjusted_instances;
  j["counting_unit"] = "frame_instance";
  j["ttc_histogram"] = {
    {"bin_width", TtcHistogram::kBinWidth},
    {"upper", TtcHistogram::kUpper},
    {"before", histogram_json(r.hist_before)},
    {"after", histogram_json(r.hist_after)},
  };
  return j.dump(2) + "\n";
}

std::string report_csv(const Stamp & stamp, const ConflictReport & report)
{
  std::string out = csv_banner(stamp);
  out += "lane,before,after,reduction_pct\n";
  auto row = [&out](const std::string & lane, const LaneStats & s) {
    out += lane + "," + std::to_string(s.before) + "," + std::to_string(s.after) + "," +
           fixed6(s.reduction_pct) + "\n";
  };
  for (const auto & l : report.lanes) {
    row(std::to_string(l.lane), l);
  }
  row("all", report.total);
  return out;
}

std::string histogram_csv(const Stamp & stamp, const TtcHistogram & hist)
{
  std::string out = csv_banner(stamp);
  out += "bin_lower,bin_upper,count\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    const double lo = static_cast<double>(i) * TtcHistogram::kBinWidth;
    out += fixed6(lo) + "," + fixed6(lo + TtcHistogram::kBinWidth) + "," +
           std::to_string(hist.counts[i]) + "\n";
  }
  out += fixed6(TtcHistogram::kUpper) + ",inf," + std::to_string(hist.overflow) + "\n";
  return out;
}

}  // namespace bcv::cli
