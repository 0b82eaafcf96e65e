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

#ifndef BCV__SOLVER_BACKEND_HPP_
#define BCV__SOLVER_BACKEND_HPP_

#include "bcv/smt_encoding.hpp"

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcv
{

/// How the query reaches the solver process.
enum class SolverInput { Stdin, TempFile };

struct SolverConfig
{
  std::string executable_path;
  std::vector<std::string> extra_args;
  double timeout_s{30.0};
  SolverInput input{SolverInput::Stdin};

  /// Throws InvalidSpec when timeout_s <= 0.
  void validate() const;
};

struct SolverRun
{
  enum class Status { Sat, Unsat, Unknown, Timeout, LaunchFailure };
  Status status{Status::Unknown};
  std::optional<ModelAssignment> model;  // present iff Sat
  std::string detail;                    // launch failure reason or solver stderr
  std::string transcript;                // raw standard output
  std::chrono::milliseconds elapsed{0};
};

const char * to_string(SolverRun::Status status);

/// Spawns one solver process, hands it `query` (stdin or temp file argument) and
/// parses its standard output. The exit code is ignored; only the transcript
/// counts. Parse failures propagate as ParseError / MissingModel.
[[nodiscard]] SolverRun run_solver(std::string_view query, const SolverConfig & config);

struct Interval
{
  double lower{0.0};
  double upper{0.0};
};

/// Search box of the grid oracle, in pair-relative coordinates.
struct GridBounds
{
  Interval gap{1.0, 100.0};            // [m]
  Interval closing_speed{0.5, 20.0};   // [m/s]
  Interval follower_accel{-6.0, 3.0};  // [m/s^2]
  Interval leader_accel{-6.0, 3.0};    // [m/s^2]
  int resolution{50};                  // samples per dimension, endpoints included

  /// Throws InvalidSpec unless every lower < upper and resolution >= 2.
  void validate() const;
};

struct GridCounterexample
{
  double gap{0.0};
  double closing_speed{0.0};
  double follower_accel{0.0};
  double leader_accel{0.0};
};

/// Exhaustive search for a pair state with B >= 0 and dB/dt < -eps (and, for
/// closed-loop specs, a follower acceleration at or below the safe bound).
///
/// Working in (gap, closing speed, a_f, a_l) loses nothing: B and dB/dt depend on
/// the absolute positions and speeds only through gap and closing speed, so a
/// violation exists for some (x, v) assignment iff it exists in these coordinates
/// (subject to the box bounds, see lift_counterexample). Grid points with
/// gap <= 0 or closing speed <= eps are outside the query's ordering constraints
/// and are skipped. Returns the first violation in lexicographic grid order.
[[nodiscard]] std::optional<GridCounterexample> grid_oracle_search(
  const QuerySpec & spec, const GridBounds & bounds);

/// Embeds a pair-relative counterexample into a full N-vehicle assignment: the
/// violation sits on pair (1, 0) and every further vehicle repeats the same gap
/// and closing speed. Returns nullopt when the platoon does not fit the box bounds
/// or, in closed-loop mode, the filter cannot be met inside the envelope.
[[nodiscard]] std::optional<ModelAssignment> lift_counterexample(
  const GridCounterexample & cex, const QuerySpec & spec);

}  // namespace bcv

#endif  // BCV__SOLVER_BACKEND_HPP_
