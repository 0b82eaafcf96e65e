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

#ifndef BCV_CLI__COMMANDS_HPP_
#define BCV_CLI__COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace bcv::cli
{

/// Entry point of the `bcv` tool. `args` excludes the program name. Returns one of
/// the ExitCode values.
///
///   bcv [--config FILE] [--out DIR] verify [--mode open|closed] [--n N] [--emit-only]
///   bcv [--config FILE] [--out DIR] scan   [--window W] CSV...
///   bcv [--config FILE] [--out DIR] adjust [--window W] [--strategy S] [--adjust-mode M] CSV...
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace bcv::cli

#endif  // BCV_CLI__COMMANDS_HPP_
