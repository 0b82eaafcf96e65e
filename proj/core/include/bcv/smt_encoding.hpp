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

#ifndef BCV__SMT_ENCODING_HPP_
#define BCV__SMT_ENCODING_HPP_

#include "bcv/kinematics.hpp"
#include "bcv/smt/expr.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcv
{

enum class QueryMode { OpenLoop, ClosedLoop };

const char * to_string(QueryMode mode);

/// Box limits on the state symbols. Lower limits are strict, upper limits inclusive.
struct StateBounds
{
  double x_lower{0.0};
  double x_upper{10000.0};  // [m]
  double v_lower{0.0};
  double v_upper{60.0};  // [m/s]
};

struct QuerySpec
{
  int n{2};  // number of vehicles, vehicle 0 leads
  QueryMode mode{QueryMode::OpenLoop};
  BarrierParams params{};
  StateBounds bounds{};
  double vehicle_length{5.0};  // [m] length subtracted in every gap

  /// Throws InvalidSpec when n < 2, a bound interval is empty or params are invalid.
  void validate() const;
};

/// Unrolled constraint system. Symbols are named `x_<i>`, `v_<i>`, `a_<i>`.
///
/// Per vehicle: one state-domain assertion (x and v inside their boxes) and one
/// actuation assertion (a_min <= a <= a_max). Per pair (i, i-1): position order,
/// velocity order, collision avoidance. Closed-loop systems append one filter
/// assertion per pair. The goal is the disjunction over pairs of B >= 0 and
/// dB/dt < 0, multiplied through by the positive closing speed so no division
/// appears.
struct ConstraintSystem
{
  std::vector<std::string> declarations;
  std::vector<smt::Expr> assertions;
  std::optional<smt::Expr> goal;
};

namespace smt_names
{
std::string position(int i);
std::string velocity(int i);
std::string accel(int i);
}  // namespace smt_names

/// Throws InvalidSpec unless spec.mode is OpenLoop and spec is valid.
[[nodiscard]] ConstraintSystem build_open_loop_query(const QuerySpec & spec);

/// Open-loop system plus a[i]*g <= a[i-1]*g - d^2 for every pair.
/// Throws InvalidSpec unless spec.mode is ClosedLoop and spec is valid.
[[nodiscard]] ConstraintSystem build_closed_loop_query(const QuerySpec & spec);

/// Dispatches on spec.mode.
[[nodiscard]] ConstraintSystem build_query(const QuerySpec & spec);

/// Byte-stable SMT-LIB v2 script ending in (check-sat) and (get-model).
[[nodiscard]] std::string emit_smtlib(const ConstraintSystem & system);

struct RealLiteral
{
  double value{0.0};
  std::string text;  // literal as printed by the solver
};

struct ModelAssignment
{
  std::map<std::string, RealLiteral, std::less<>> values;

  [[nodiscard]] bool contains(std::string_view name) const { return values.find(name) != values.end(); }
  /// Throws IncompleteModel when absent.
  [[nodiscard]] double at(std::string_view name) const;
  [[nodiscard]] smt::Environment environment() const;
};

struct SolverVerdict
{
  enum class Status { Sat, Unsat, Unknown };
  Status status{Status::Unknown};
  std::optional<ModelAssignment> model;  // present iff Sat
};

const char * to_string(SolverVerdict::Status status);

/// Reads a solver transcript. Accepts both `(model (define-fun ...) ...)` and the
/// bare `((define-fun ...) ...)` layout, with integer, decimal, `(- c)` and
/// `(/ p q)` literals. Throws ParseError or MissingModel.
[[nodiscard]] SolverVerdict parse_solver_output(std::string_view text);

/// Re-evaluates every assertion and the goal of build_query(spec) under the model
/// in double arithmetic, relaxing comparisons by spec.params.eps.
/// Throws IncompleteModel when a declared symbol has no value.
[[nodiscard]] bool validate_counterexample(const ModelAssignment & model, const QuerySpec & spec);

}  // namespace bcv

#endif  // BCV__SMT_ENCODING_HPP_
