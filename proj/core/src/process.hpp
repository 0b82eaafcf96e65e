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

#ifndef BCV__PROCESS_HPP_
#define BCV__PROCESS_HPP_

#include <chrono>
#include <string>
#include <vector>

namespace bcv::detail
{

struct ProcessResult
{
  enum class Status { Exited, TimedOut, LaunchFailed };
  Status status{Status::Exited};
  int exit_code{0};
  std::string stdout_text;
  std::string stderr_text;
  std::string detail;  // launch failure reason
};

/// Runs `argv[0]` with the given arguments, feeds `input` on stdin and collects
/// both output streams. The child is killed once `timeout` elapses.
ProcessResult run_process(
  const std::vector<std::string> & argv, const std::string & input,
  std::chrono::milliseconds timeout);

}  // namespace bcv::detail

#endif  // BCV__PROCESS_HPP_
