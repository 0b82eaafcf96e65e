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

#ifndef BCV__SMT__EXPR_HPP_
#define BCV__SMT__EXPR_HPP_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bcv::smt
{

/// Immutable term over real constants and real-valued symbols. The operator set
/// is closed under polynomial arithmetic; there is deliberately no division.
class Expr
{
public:
  enum class Op { Var, Const, Add, Sub, Mul, Neg, Lt, Le, Gt, Ge, Eq, And, Or };

  static Expr var(std::string name);
  static Expr constant(double value);
  static Expr apply(Op op, std::vector<Expr> args);

  [[nodiscard]] Op op() const { return node_->op; }
  [[nodiscard]] const std::string & name() const { return node_->name; }
  [[nodiscard]] double value() const { return node_->value; }
  [[nodiscard]] std::span<const Expr> args() const { return node_->args; }

  /// True for comparisons and connectives.
  [[nodiscard]] bool is_boolean() const;

private:
  struct Node
  {
    Op op{Op::Const};
    std::string name;
    double value{0.0};
    std::vector<Expr> args;
  };
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr & lhs, const Expr & rhs);
Expr operator-(const Expr & lhs, const Expr & rhs);
Expr operator*(const Expr & lhs, const Expr & rhs);
Expr operator-(const Expr & operand);

Expr lt(const Expr & lhs, const Expr & rhs);
Expr le(const Expr & lhs, const Expr & rhs);
Expr gt(const Expr & lhs, const Expr & rhs);
Expr ge(const Expr & lhs, const Expr & rhs);
Expr eq(const Expr & lhs, const Expr & rhs);
/// Conjunction; a single operand is returned unchanged.
Expr all_of(std::vector<Expr> operands);
/// Disjunction; a single operand is returned unchanged.
Expr any_of(std::vector<Expr> operands);

/// SMT-LIB numeral for `value`: shortest round-trip decimal, always with a
/// fractional part, negatives as `(- c)`.
std::string format_decimal(double value);

/// SMT-LIB v2 rendering of a term.
std::string to_smtlib(const Expr & expr);

/// Collects every symbol referenced by `expr` into `out`.
void collect_symbols(const Expr & expr, std::vector<std::string> & out);

using Environment = std::map<std::string, double, std::less<>>;

/// Evaluates an arithmetic term. Throws IncompleteModel for unbound symbols.
double evaluate_real(const Expr & expr, const Environment & env);

/// Evaluates a boolean term, relaxing every comparison by `tolerance`.
bool evaluate_bool(const Expr & expr, const Environment & env, double tolerance);

}  // namespace bcv::smt

#endif  // BCV__SMT__EXPR_HPP_
