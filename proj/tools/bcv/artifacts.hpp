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

#ifndef BCV_CLI__ARTIFACTS_HPP_
#define BCV_CLI__ARTIFACTS_HPP_

#include "bcv/config.hpp"
#include "bcv/conflict_pipeline.hpp"
#include "bcv/solver_backend.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace bcv::cli
{

inline constexpr int kSchemaVersion = 1;

/// Provenance stamped into every artifact.
struct Stamp
{
  std::string config_digest;
  std::string command;
};

struct VerifyOutcome
{
  QuerySpec spec;
  SolverRun run;
  bool validated{false};
  std::optional<GridCounterexample> oracle_cex;
  std::optional<bool> oracle_cex_validated;  // nullopt when it does not fit the box bounds
  bool oracle_agreement{false};
};

/// Decimal with exactly six fractional digits.
std::string fixed6(double value);

/// Writes `text` to `path`, throwing ConfigError when the file cannot be written.
void write_text(const std::filesystem::path & path, const std::string & text);

std::string verdict_json(const Stamp & stamp, const VerifyOutcome & outcome);

std::string conflicts_json(
  const Stamp & stamp, const ScanResult & scan, const PairingDiagnostics & pairing,
  const DataQuality & quality);
std::string ttc_per_frame_csv(const Stamp & stamp, const ScanResult & scan);

std::string report_json(
  const Stamp & stamp, const AdjustmentResult & result, const AdjustmentStrategy & strategy,
  AdjustmentMode mode);
std::string report_csv(const Stamp & stamp, const ConflictReport & report);
std::string histogram_csv(const Stamp & stamp, const TtcHistogram & hist);

}  // namespace bcv::cli

#endif  // BCV_CLI__ARTIFACTS_HPP_
