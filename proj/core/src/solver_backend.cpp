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

#include "bcv/solver_backend.hpp"

#include "bcv/errors.hpp"
#include "bcv/kinematics.hpp"
#include "process.hpp"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>

namespace bcv
{

void SolverConfig::validate() const
{
  if (!(timeout_s > 0.0)) {
    throw InvalidSpec("solver timeout must be positive");
  }
}

const char * to_string(SolverRun::Status status)
{
  switch (status) {
    case SolverRun::Status::Sat:
      return "sat";
    case SolverRun::Status::Unsat:
      return "unsat";
    case SolverRun::Status::Unknown:
      return "unknown";
    case SolverRun::Status::Timeout:
      return "timeout";
    case SolverRun::Status::LaunchFailure:
      return "launch_failure";
  }
  return "unknown";
}

namespace
{

class TempQueryFile
{
public:
  explicit TempQueryFile(std::string_view contents)
  {
    auto pattern = (std::filesystem::temp_directory_path() / "bcv-query-XXXXXX.smt2").string();
    const int fd = ::mkstemps(pattern.data(), 5);
    if (fd < 0) {
      throw Error("cannot create temporary query file");
    }
    ::close(fd);
    path_ = pattern;
    std::ofstream out(path_, std::ios::binary);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      throw Error("cannot write temporary query file " + path_.string());
    }
  }
  TempQueryFile(const TempQueryFile &) = delete;
  TempQueryFile & operator=(const TempQueryFile &) = delete;
  ~TempQueryFile()
  {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

  [[nodiscard]] const std::filesystem::path & path() const { return path_; }

private:
  std::filesystem::path path_;
};

std::vector<double> linspace(const Interval & range, int samples)
{
  std::vector<double> out(static_cast<std::size_t>(samples));
  const double step = (range.upper - range.lower) / static_cast<double>(samples - 1);
  for (int i = 0; i < samples; ++i) {
    out[static_cast<std::size_t>(i)] = range.lower + step * static_cast<double>(i);
  }
  out.back() = range.upper;
  return out;
}

}  // namespace

SolverRun run_solver(std::string_view query, const SolverConfig & config)
{
  config.validate();
  std::vector<std::string> argv{config.executable_path};
  argv.insert(argv.end(), config.extra_args.begin(), config.extra_args.end());

  std::optional<TempQueryFile> file;
  std::string stdin_text;
  if (config.input == SolverInput::TempFile) {
    file.emplace(query);
    argv.push_back(file->path().string());
  } else {
    stdin_text = std::string(query);
  }

  const auto timeout = std::chrono::milliseconds(static_cast<long long>(config.timeout_s * 1000.0));
  const auto start = std::chrono::steady_clock::now();
  auto proc = detail::run_process(argv, stdin_text, timeout);

  SolverRun run;
  run.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
    std::chrono::steady_clock::now() - start);
  run.transcript = std::move(proc.stdout_text);
  switch (proc.status) {
    case detail::ProcessResult::Status::LaunchFailed:
      run.status = SolverRun::Status::LaunchFailure;
      run.detail = std::move(proc.detail);
      return run;
    case detail::ProcessResult::Status::TimedOut:
      run.status = SolverRun::Status::Timeout;
      run.detail = "solver exceeded " + std::to_string(config.timeout_s) + " s";
      return run;
    case detail::ProcessResult::Status::Exited:
      break;
  }
  run.detail = std::move(proc.stderr_text);
  const auto verdict = parse_solver_output(run.transcript);
  switch (verdict.status) {
    case SolverVerdict::Status::Sat:
      run.status = SolverRun::Status::Sat;
      run.model = verdict.model;
      break;
    case SolverVerdict::Status::Unsat:
      run.status = SolverRun::Status::Unsat;
      break;
    case SolverVerdict::Status::Unknown:
      run.status = SolverRun::Status::Unknown;
      break;
  }
  return run;
}

void GridBounds::validate() const
{
  for (const auto * range : {&gap, &closing_speed, &follower_accel, &leader_accel}) {
    if (!(range->lower < range->upper)) {
      throw InvalidSpec("grid interval lower bound must be below upper bound");
    }
  }
  if (resolution < 2) {
    throw InvalidSpec("grid resolution must be at least 2");
  }
}

std::optional<GridCounterexample> grid_oracle_search(
  const QuerySpec & spec, const GridBounds & bounds)
{
  bounds.validate();
  const auto & params = spec.params;
  const bool filtered = spec.mode == QueryMode::ClosedLoop;
  const auto gaps = linspace(bounds.gap, bounds.resolution);
  const auto speeds = linspace(bounds.closing_speed, bounds.resolution);
  const auto follower_accels = linspace(bounds.follower_accel, bounds.resolution);
  const auto leader_accels = linspace(bounds.leader_accel, bounds.resolution);

  for (const double g : gaps) {
    if (!(g > 0.0)) {
      continue;
    }
    for (const double d : speeds) {
      if (!(d > params.eps)) {
        continue;
      }
      const auto base = make_relative_pair(g, 0.0, d);
      const auto b = barrier_value(base, params);
      if (!b.defined() || b.value < 0.0) {
        continue;
      }
      for (const double a_f : follower_accels) {
        for (const double a_l : leader_accels) {
          auto pair = base;
          pair.follower.a = a_f;
          pair.leader.a = a_l;
          if (filtered && !(a_f <= safe_accel_bound(pair, params.eps))) {
            continue;
          }
          if (barrier_derivative(pair, params) < -params.eps) {
            return GridCounterexample{g, d, a_f, a_l};
          }
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<ModelAssignment> lift_counterexample(
  const GridCounterexample & cex, const QuerySpec & spec)
{
  spec.validate();
  const auto & b = spec.bounds;
  const auto & p = spec.params;
  const double pairs = static_cast<double>(spec.n - 1);

  const double speed_slack = (b.v_upper - b.v_lower) - pairs * cex.closing_speed;
  if (!(speed_slack > 0.0)) {
    return std::nullopt;
  }
  const double lead_speed = b.v_lower + 0.5 * speed_slack;
  const double lead_position = b.x_upper;
  if (!(lead_position - pairs * (spec.vehicle_length + cex.gap) > b.x_lower)) {
    return std::nullopt;
  }

  ModelAssignment model;
  auto put = [&model](const std::string & name, double value) {
    model.values.insert_or_assign(name, RealLiteral{value, smt::format_decimal(value)});
  };
  double accel = cex.leader_accel;
  for (int i = 0; i < spec.n; ++i) {
    const double k = static_cast<double>(i);
    put(smt_names::position(i), lead_position - k * (spec.vehicle_length + cex.gap));
    put(smt_names::velocity(i), lead_speed + k * cex.closing_speed);
    if (i == 1) {
      accel = cex.follower_accel;
    } else if (i > 1 && spec.mode == QueryMode::ClosedLoop) {
      accel -= cex.closing_speed * cex.closing_speed / cex.gap;
    }
    if (accel < p.a_min || accel > p.a_max) {
      return std::nullopt;
    }
    put(smt_names::accel(i), accel);
  }
  return model;
}

}  // namespace bcv
