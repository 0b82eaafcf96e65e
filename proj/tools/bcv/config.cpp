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

#include "bcv/config.hpp"

#include "bcv/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <json.hpp>

namespace bcv::cli
{

using nlohmann::json;

RunConfig::RunConfig()
{
  solver.input = SolverInput::TempFile;
  grid.follower_accel = {barrier.a_min, barrier.a_max};
  grid.leader_accel = {barrier.a_min, barrier.a_max};
  adjust_t_target = barrier.t_target;
  adjust_a_min = barrier.a_min;
}

AdjustmentStrategy RunConfig::make_strategy() const
{
  const double dt = adjust_dt > 0.0 ? adjust_dt : 1.0 / schema.frame_rate;
  return strategy == AdjustmentStrategy::Kind::Instantaneous
           ? AdjustmentStrategy::instantaneous(adjust_t_target)
           : AdjustmentStrategy::decel_limited(adjust_t_target, adjust_a_min, dt);
}

void RunConfig::validate() const
{
  try {
    barrier.validate();
    QuerySpec spec;
    spec.params = barrier;
    spec.bounds = bounds;
    spec.vehicle_length = vehicle_length;
    spec.validate();
    grid.validate();
    solver.validate();
    schema.validate();
    make_strategy().validate(barrier);
  } catch (const Error & e) {
    throw ConfigError(e.what());
  }
  if (adjust_dt < 0.0) {
    throw ConfigError("adjust.dt must be positive (or 0 for one frame period)");
  }
  if (formats.empty()) {
    throw ConfigError("at least one report format is required");
  }
  for (const auto & f : formats) {
    if (f != "json" && f != "csv") {
      throw ConfigError("unknown report format '" + f + "'");
    }
  }
}

namespace
{

void check_keys(const json & obj, const std::string & section, std::initializer_list<const char *> allowed)
{
  if (!obj.is_object()) {
    throw ConfigError("section '" + section + "' must be an object");
  }
  for (const auto & [key, value] : obj.items()) {
    bool ok = false;
    for (const char * a : allowed) {
      ok = ok || key == a;
    }
    if (!ok) {
      throw ConfigError("unknown key '" + key + "' in section '" + section + "'");
    }
  }
}

template <typename T>
void read(const json & obj, const char * key, T & out)
{
  if (const auto it = obj.find(key); it != obj.end()) {
    out = it->template get<T>();
  }
}

void read_interval(const json & obj, const char * key, Interval & out)
{
  if (const auto it = obj.find(key); it != obj.end()) {
    if (!it->is_array() || it->size() != 2) {
      throw ConfigError(std::string("'") + key + "' must be a [lower, upper] pair");
    }
    out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
  }
}

PositionReference parse_position_reference(const std::string & s)
{
  if (s == "front_bumper") {
    return PositionReference::FrontBumper;
  }
  if (s == "bounding_box_corner") {
    return PositionReference::BoundingBoxCorner;
  }
  throw ConfigError("position_reference must be front_bumper or bounding_box_corner");
}

const char * position_reference_name(PositionReference r)
{
  return r == PositionReference::FrontBumper ? "front_bumper" : "bounding_box_corner";
}

GapReference parse_gap_reference(const std::string & s)
{
  if (s == "leader") {
    return GapReference::LeaderLength;
  }
  if (s == "follower") {
    return GapReference::FollowerLength;
  }
  if (s == "fixed") {
    return GapReference::Fixed;
  }
  throw ConfigError("gap_reference must be leader, follower or fixed");
}

const char * gap_reference_name(GapReference r)
{
  switch (r) {
    case GapReference::LeaderLength:
      return "leader";
    case GapReference::FollowerLength:
      return "follower";
    case GapReference::Fixed:
      return "fixed";
  }
  return "leader";
}

void apply_json(const json & root, RunConfig & cfg)
{
  check_keys(root, "<root>", {"barrier", "query", "oracle", "solver", "ingest", "adjust", "window", "output"});

  if (const auto it = root.find("barrier"); it != root.end()) {
    check_keys(*it, "barrier", {"t_safe", "a_min", "a_max", "eps", "t_target"});
    read(*it, "t_safe", cfg.barrier.t_safe);
    read(*it, "a_min", cfg.barrier.a_min);
    read(*it, "a_max", cfg.barrier.a_max);
    read(*it, "eps", cfg.barrier.eps);
    cfg.barrier.t_target = cfg.barrier.t_safe;
    read(*it, "t_target", cfg.barrier.t_target);
    cfg.grid.follower_accel = {cfg.barrier.a_min, cfg.barrier.a_max};
    cfg.grid.leader_accel = {cfg.barrier.a_min, cfg.barrier.a_max};
    cfg.adjust_t_target = cfg.barrier.t_target;
    cfg.adjust_a_min = cfg.barrier.a_min;
  }
  if (const auto it = root.find("query"); it != root.end()) {
    check_keys(*it, "query", {"vehicle_length", "x_max", "v_max"});
    read(*it, "vehicle_length", cfg.vehicle_length);
    read(*it, "x_max", cfg.bounds.x_upper);
    read(*it, "v_max", cfg.bounds.v_upper);
  }
  if (const auto it = root.find("oracle"); it != root.end()) {
    check_keys(*it, "oracle", {"resolution", "gap", "closing_speed", "follower_accel", "leader_accel"});
    read(*it, "resolution", cfg.grid.resolution);
    read_interval(*it, "gap", cfg.grid.gap);
    read_interval(*it, "closing_speed", cfg.grid.closing_speed);
    read_interval(*it, "follower_accel", cfg.grid.follower_accel);
    read_interval(*it, "leader_accel", cfg.grid.leader_accel);
  }
  if (const auto it = root.find("solver"); it != root.end()) {
    check_keys(*it, "solver", {"path", "args", "timeout_s", "input"});
    read(*it, "path", cfg.solver.executable_path);
    read(*it, "args", cfg.solver.extra_args);
    read(*it, "timeout_s", cfg.solver.timeout_s);
    std::string input = cfg.solver.input == SolverInput::Stdin ? "stdin" : "file";
    read(*it, "input", input);
    if (input != "stdin" && input != "file") {
      throw ConfigError("solver.input must be stdin or file");
    }
    cfg.solver.input = input == "stdin" ? SolverInput::Stdin : SolverInput::TempFile;
  }
  if (const auto it = root.find("ingest"); it != root.end()) {
    check_keys(*it, "ingest", {"columns", "frame_rate", "position_reference", "gap_reference", "fixed_gap_length"});
    if (const auto c = it->find("columns"); c != it->end()) {
      check_keys(*c, "ingest.columns",
        {"frame", "id", "x", "xVelocity", "xAcceleration", "length", "laneId", "precedingId"});
      read(*c, "frame", cfg.schema.frame);
      read(*c, "id", cfg.schema.id);
      read(*c, "x", cfg.schema.x);
      read(*c, "xVelocity", cfg.schema.x_velocity);
      read(*c, "xAcceleration", cfg.schema.x_acceleration);
      read(*c, "length", cfg.schema.length);
      read(*c, "laneId", cfg.schema.lane);
      read(*c, "precedingId", cfg.schema.preceding_id);
    }
    read(*it, "frame_rate", cfg.schema.frame_rate);
    if (const auto r = it->find("position_reference"); r != it->end()) {
      cfg.schema.position_reference = parse_position_reference(r->get<std::string>());
    }
    if (const auto r = it->find("gap_reference"); r != it->end()) {
      cfg.schema.gap_reference = parse_gap_reference(r->get<std::string>());
    }
    read(*it, "fixed_gap_length", cfg.schema.fixed_gap_length);
  }
  if (const auto it = root.find("adjust"); it != root.end()) {
    check_keys(*it, "adjust", {"strategy", "mode", "t_target", "a_min", "dt"});
    if (const auto s = it->find("strategy"); s != it->end()) {
      const auto name = s->get<std::string>();
      if (name == "instantaneous") {
        cfg.strategy = AdjustmentStrategy::Kind::Instantaneous;
      } else if (name == "decel_limited") {
        cfg.strategy = AdjustmentStrategy::Kind::DecelLimited;
      } else {
        throw ConfigError("adjust.strategy must be instantaneous or decel_limited");
      }
    }
    if (const auto m = it->find("mode"); m != it->end()) {
      const auto name = m->get<std::string>();
      if (name == "per_frame") {
        cfg.adjust_mode = AdjustmentMode::PerFrame;
      } else if (name == "propagated") {
        cfg.adjust_mode = AdjustmentMode::Propagated;
      } else {
        throw ConfigError("adjust.mode must be per_frame or propagated");
      }
    }
    read(*it, "t_target", cfg.adjust_t_target);
    read(*it, "a_min", cfg.adjust_a_min);
    read(*it, "dt", cfg.adjust_dt);
  }
  if (const auto it = root.find("window"); it != root.end()) {
    cfg.window = it->is_string() ? it->get<std::string>() : std::to_string(it->get<std::int64_t>());
  }
  if (const auto it = root.find("output"); it != root.end()) {
    check_keys(*it, "output", {"dir", "formats"});
    if (const auto d = it->find("dir"); d != it->end()) {
      cfg.out_dir = d->get<std::string>();
    }
    if (const auto f = it->find("formats"); f != it->end()) {
      cfg.formats = f->get<std::set<std::string>>();
    }
  }
}

}  // namespace

RunConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  RunConfig cfg;
  try {
    apply_json(json::parse(in), cfg);
  } catch (const json::exception & e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return cfg;
}

std::string canonical_config(const RunConfig & c)
{
  json j;
  j["barrier"] = {
    {"t_safe", c.barrier.t_safe}, {"a_min", c.barrier.a_min}, {"a_max", c.barrier.a_max},
    {"eps", c.barrier.eps}, {"t_target", c.barrier.t_target}};
  j["query"] = {
    {"vehicle_length", c.vehicle_length}, {"x_max", c.bounds.x_upper}, {"v_max", c.bounds.v_upper}};
  j["oracle"] = {
    {"resolution", c.grid.resolution},
    {"gap", {c.grid.gap.lower, c.grid.gap.upper}},
    {"closing_speed", {c.grid.closing_speed.lower, c.grid.closing_speed.upper}},
    {"follower_accel", {c.grid.follower_accel.lower, c.grid.follower_accel.upper}},
    {"leader_accel", {c.grid.leader_accel.lower, c.grid.leader_accel.upper}}};
  j["solver"] = {
    {"path", c.solver.executable_path}, {"args", c.solver.extra_args},
    {"timeout_s", c.solver.timeout_s},
    {"input", c.solver.input == SolverInput::Stdin ? "stdin" : "file"}};
  j["ingest"] = {
    {"columns",
     {{"frame", c.schema.frame}, {"id", c.schema.id}, {"x", c.schema.x},
      {"xVelocity", c.schema.x_velocity}, {"xAcceleration", c.schema.x_acceleration},
      {"length", c.schema.length}, {"laneId", c.schema.lane}, {"precedingId", c.schema.preceding_id}}},
    {"frame_rate", c.schema.frame_rate},
    {"position_reference", position_reference_name(c.schema.position_reference)},
    {"gap_reference", gap_reference_name(c.schema.gap_reference)},
    {"fixed_gap_length", c.schema.fixed_gap_length}};
  j["adjust"] = {
    {"strategy", to_string(c.strategy)}, {"mode", to_string(c.adjust_mode)},
    {"t_target", c.adjust_t_target}, {"a_min", c.adjust_a_min}, {"dt", c.adjust_dt}};
  j["window"] = c.window;
  j["formats"] = c.formats;
  return j.dump();
}

std::string config_digest(const RunConfig & config)
{
  const auto text = canonical_config(config);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[md[i] >> 4];
    hex += kHex[md[i] & 0xF];
  }
  return hex;
}

namespace
{
std::int64_t parse_frame_number(std::string_view text, const std::string & spec)
{
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("invalid window '" + spec + "' (use all, <frames> or <first>:<last>)");
  }
  return value;
}
}  // namespace

FrameWindow resolve_window(const std::string & spec, const TrajectoryDataset & dataset)
{
  if (spec == "all") {
    return full_window(dataset);
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    const auto frames = parse_frame_number(spec, spec);
    if (frames <= 0) {
      throw ConfigError("window length must be positive");
    }
    return leading_window(dataset, frames);
  }
  const std::string_view view(spec);
  return {parse_frame_number(view.substr(0, colon), spec), parse_frame_number(view.substr(colon + 1), spec)};
}

}  // namespace bcv::cli
