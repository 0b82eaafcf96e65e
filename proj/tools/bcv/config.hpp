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

#ifndef BCV_CLI__CONFIG_HPP_
#define BCV_CLI__CONFIG_HPP_

#include "bcv/conflict_pipeline.hpp"
#include "bcv/solver_backend.hpp"
#include "bcv/trajectory_ingest.hpp"

#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>

namespace bcv::cli
{

/// Exit-code contract of the `bcv` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 2,  // solver/oracle disagreement, invalid model, inconclusive verdict
  kExitConfigError = 64,
  kExitDataError = 65,
};

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig
{
  BarrierParams barrier;
  StateBounds bounds;
  double vehicle_length{5.0};
  GridBounds grid;
  SolverConfig solver;
  IngestSchema schema;
  AdjustmentStrategy::Kind strategy{AdjustmentStrategy::Kind::Instantaneous};
  AdjustmentMode adjust_mode{AdjustmentMode::PerFrame};
  double adjust_t_target{3.0};
  double adjust_a_min{-6.0};
  double adjust_dt{0.0};  // 0 selects one frame period
  std::string window{"all"};
  std::filesystem::path out_dir{"."};
  std::set<std::string> formats{"csv", "json"};

  RunConfig();

  [[nodiscard]] AdjustmentStrategy make_strategy() const;
  [[nodiscard]] bool solver_configured() const { return !solver.executable_path.empty(); }

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;
};

/// Reads a JSON config file whose sections mirror RunConfig. Unknown keys are
/// rejected. Throws ConfigError.
RunConfig load_config(const std::filesystem::path & path);

/// Canonical JSON text of everything that affects results (the output directory
/// is excluded).
std::string canonical_config(const RunConfig & config);

/// Hex SHA-256 of canonical_config().
std::string config_digest(const RunConfig & config);

/// "all", "<frames>" (leading window) or "<first>:<last>".
FrameWindow resolve_window(const std::string & spec, const TrajectoryDataset & dataset);

}  // namespace bcv::cli

#endif  // BCV_CLI__CONFIG_HPP_
