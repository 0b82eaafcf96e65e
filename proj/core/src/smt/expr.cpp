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

#include "bcv/smt/expr.hpp"

#include "bcv/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace bcv::smt
{

Expr Expr::var(std::string name)
{
  auto node = std::make_shared<Node>();
  node->op = Op::Var;
  node->name = std::move(name);
  return Expr(std::move(node));
}

Expr Expr::constant(double value)
{
  if (!std::isfinite(value)) {
    throw std::invalid_argument("SMT constants must be finite");
  }
  auto node = std::make_shared<Node>();
  node->op = Op::Const;
  node->value = value;
  return Expr(std::move(node));
}

Expr Expr::apply(Op op, std::vector<Expr> args)
{
  if (op == Op::Var || op == Op::Const) {
    throw std::invalid_argument("Expr::apply needs an operator");
  }
  auto node = std::make_shared<Node>();
  node->op = op;
  node->args = std::move(args);
  return Expr(std::move(node));
}

bool Expr::is_boolean() const
{
  switch (op()) {
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq:
    case Op::And:
    case Op::Or:
      return true;
    default:
      return false;
  }
}

Expr operator+(const Expr & lhs, const Expr & rhs) { return Expr::apply(Expr::Op::Add, {lhs, rhs}); }
Expr operator-(const Expr & lhs, const Expr & rhs) { return Expr::apply(Expr::Op::Sub, {lhs, rhs}); }
Expr operator*(const Expr & lhs, const Expr & rhs) { return Expr::apply(Expr::Op::Mul, {lhs, rhs}); }
Expr operator-(const Expr & operand) { return Expr::apply(Expr::Op::Neg, {operand}); }

Expr lt(const Expr & lhs, const Expr & rhs) { return Expr::apply(Expr::Op::Lt, {lhs, rhs}); }
Expr le(const Expr & lhs, const Expr & rhs) { return Expr::apply(Expr::Op::Le, {lhs, rhs}); }
Expr gt(const Expr & lhs, const Expr & rhs) { return Expr::apply(Expr::Op::Gt, {lhs, rhs}); }
Expr ge(const Expr & lhs, const Expr & rhs) { return Expr::apply(Expr::Op::Ge, {lhs, rhs}); }
Expr eq(const Expr & lhs, const Expr & rhs) { return Expr::apply(Expr::Op::Eq, {lhs, rhs}); }

Expr all_of(std::vector<Expr> operands)
{
  if (operands.empty()) {
    throw std::invalid_argument("empty conjunction");
  }
  if (operands.size() == 1) {
    return operands.front();
  }
  return Expr::apply(Expr::Op::And, std::move(operands));
}

Expr any_of(std::vector<Expr> operands)
{
  if (operands.empty()) {
    throw std::invalid_argument("empty disjunction");
  }
  if (operands.size() == 1) {
    return operands.front();
  }
  return Expr::apply(Expr::Op::Or, std::move(operands));
}

std::string format_decimal(double value)
{
  const double magnitude = std::fabs(value);
  std::array<char, 512> buf{};
  const auto [end, ec] =
    std::to_chars(buf.data(), buf.data() + buf.size(), magnitude, std::chars_format::fixed);
  if (ec != std::errc{}) {
    throw std::runtime_error("cannot format constant");
  }
  std::string text(buf.data(), end);
  if (text.find('.') == std::string::npos) {
    text += ".0";
  }
  if (std::signbit(value) && magnitude != 0.0) {
    return "(- " + text + ")";
  }
  return text;
}

namespace
{
const char * op_symbol(Expr::Op op)
{
  switch (op) {
    case Expr::Op::Add:
      return "+";
    case Expr::Op::Sub:
    case Expr::Op::Neg:
      return "-";
    case Expr::Op::Mul:
      return "*";
    case Expr::Op::Lt:
      return "<";
    case Expr::Op::Le:
      return "<=";
    case Expr::Op::Gt:
      return ">";
    case Expr::Op::Ge:
      return ">=";
    case Expr::Op::Eq:
      return "=";
    case Expr::Op::And:
      return "and";
    case Expr::Op::Or:
      return "or";
    default:
      return "?";
  }
}

void render(const Expr & expr, std::string & out)
{
  switch (expr.op()) {
    case Expr::Op::Var:
      out += expr.name();
      return;
    case Expr::Op::Const:
      out += format_decimal(expr.value());
      return;
    default:
      break;
  }
  out += '(';
  out += op_symbol(expr.op());
  for (const auto & arg : expr.args()) {
    out += ' ';
    render(arg, out);
  }
  out += ')';
}

bool compare(Expr::Op op, double lhs, double rhs, double tol)
{
  switch (op) {
    case Expr::Op::Lt:
      return lhs < rhs + tol;
    case Expr::Op::Le:
      return lhs <= rhs + tol;
    case Expr::Op::Gt:
      return lhs + tol > rhs;
    case Expr::Op::Ge:
      return lhs + tol >= rhs;
    case Expr::Op::Eq:
      return std::fabs(lhs - rhs) <= tol;
    default:
      throw std::logic_error("not a comparison");
  }
}
}  // namespace

std::string to_smtlib(const Expr & expr)
{
  std::string out;
  render(expr, out);
  return out;
}

void collect_symbols(const Expr & expr, std::vector<std::string> & out)
{
  if (expr.op() == Expr::Op::Var) {
    out.push_back(expr.name());
    return;
  }
  for (const auto & arg : expr.args()) {
    collect_symbols(arg, out);
  }
}

double evaluate_real(const Expr & expr, const Environment & env)
{
  const auto args = expr.args();
  switch (expr.op()) {
    case Expr::Op::Var: {
      const auto it = env.find(expr.name());
      if (it == env.end()) {
        throw IncompleteModel(expr.name());
      }
      return it->second;
    }
    case Expr::Op::Const:
      return expr.value();
    case Expr::Op::Neg:
      return -evaluate_real(args[0], env);
    case Expr::Op::Add: {
      double sum = 0.0;
      for (const auto & a : args) {
        sum += evaluate_real(a, env);
      }
      return sum;
    }
    case Expr::Op::Sub: {
      double acc = evaluate_real(args[0], env);
      for (std::size_t i = 1; i < args.size(); ++i) {
        acc -= evaluate_real(args[i], env);
      }
      return acc;
    }
    case Expr::Op::Mul: {
      double prod = 1.0;
      for (const auto & a : args) {
        prod *= evaluate_real(a, env);
      }
      return prod;
    }
    default:
      throw std::logic_error("boolean term in arithmetic position");
  }
}

bool evaluate_bool(const Expr & expr, const Environment & env, double tolerance)
{
  const auto args = expr.args();
  switch (expr.op()) {
    case Expr::Op::And:
      for (const auto & a : args) {
        if (!evaluate_bool(a, env, tolerance)) {
          return false;
        }
      }
      return true;
    case Expr::Op::Or:
      for (const auto & a : args) {
        if (evaluate_bool(a, env, tolerance)) {
          return true;
        }
      }
      return false;
    case Expr::Op::Lt:
    case Expr::Op::Le:
    case Expr::Op::Gt:
    case Expr::Op::Ge:
    case Expr::Op::Eq:
      return compare(
        expr.op(), evaluate_real(args[0], env), evaluate_real(args[1], env), tolerance);
    default:
      throw std::logic_error("arithmetic term in boolean position");
  }
}

}  // namespace bcv::smt
