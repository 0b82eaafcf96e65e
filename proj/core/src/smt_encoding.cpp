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

#include "bcv/smt_encoding.hpp"

#include "bcv/errors.hpp"
#include "bcv/smt/sexpr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace bcv
{

using smt::Expr;

const char * to_string(QueryMode mode)
{
  return mode == QueryMode::OpenLoop ? "open" : "closed";
}

const char * to_string(SolverVerdict::Status status)
{
  switch (status) {
    case SolverVerdict::Status::Sat:
      return "sat";
    case SolverVerdict::Status::Unsat:
      return "unsat";
    case SolverVerdict::Status::Unknown:
      return "unknown";
  }
  return "unknown";
}

void QuerySpec::validate() const
{
  if (n < 2) {
    throw InvalidSpec("query needs at least two vehicles, got n=" + std::to_string(n));
  }
  if (!(bounds.x_lower < bounds.x_upper) || !(bounds.v_lower < bounds.v_upper)) {
    throw InvalidSpec("state bounds must be non-empty intervals");
  }
  if (!(vehicle_length >= 0.0)) {
    throw InvalidSpec("vehicle length must be non-negative");
  }
  params.validate();
}

namespace smt_names
{
std::string position(int i) { return "x_" + std::to_string(i); }
std::string velocity(int i) { return "v_" + std::to_string(i); }
std::string accel(int i) { return "a_" + std::to_string(i); }
}  // namespace smt_names

namespace
{

struct PairTerms
{
  Expr gap;      // x[i-1] - x[i] - L
  Expr closing;  // v[i] - v[i-1]
  Expr rel_accel;  // a[i] - a[i-1]
};

PairTerms pair_terms(int i, double length)
{
  const auto x_f = Expr::var(smt_names::position(i));
  const auto x_l = Expr::var(smt_names::position(i - 1));
  const auto v_f = Expr::var(smt_names::velocity(i));
  const auto v_l = Expr::var(smt_names::velocity(i - 1));
  const auto a_f = Expr::var(smt_names::accel(i));
  const auto a_l = Expr::var(smt_names::accel(i - 1));
  return {(x_l - x_f) - Expr::constant(length), v_f - v_l, a_f - a_l};
}

ConstraintSystem build_base(const QuerySpec & spec)
{
  spec.validate();
  const auto & p = spec.params;
  const auto & b = spec.bounds;
  ConstraintSystem sys;

  for (int i = 0; i < spec.n; ++i) {
    sys.declarations.push_back(smt_names::position(i));
    sys.declarations.push_back(smt_names::velocity(i));
    sys.declarations.push_back(smt_names::accel(i));
  }

  for (int i = 0; i < spec.n; ++i) {
    const auto x = Expr::var(smt_names::position(i));
    const auto v = Expr::var(smt_names::velocity(i));
    const auto a = Expr::var(smt_names::accel(i));
    sys.assertions.push_back(smt::all_of({
      gt(x, Expr::constant(b.x_lower)),
      le(x, Expr::constant(b.x_upper)),
      gt(v, Expr::constant(b.v_lower)),
      le(v, Expr::constant(b.v_upper)),
    }));
    sys.assertions.push_back(
      smt::all_of({ge(a, Expr::constant(p.a_min)), le(a, Expr::constant(p.a_max))}));
  }

  std::vector<Expr> unsafe_transitions;
  for (int i = 1; i < spec.n; ++i) {
    sys.assertions.push_back(
      lt(Expr::var(smt_names::position(i)), Expr::var(smt_names::position(i - 1))));
    sys.assertions.push_back(
      gt(Expr::var(smt_names::velocity(i)), Expr::var(smt_names::velocity(i - 1))));
    const auto t = pair_terms(i, spec.vehicle_length);
    sys.assertions.push_back(gt(t.gap, Expr::constant(0.0)));

    // B >= 0   <=>  g >= T_safe * d          (d > 0)
    // dB/dt < 0 <=> g * (a_f - a_l) > -d^2   (times d^2 > 0)
    unsafe_transitions.push_back(smt::all_of({
      ge(t.gap, Expr::constant(p.t_safe) * t.closing),
      gt(t.gap * t.rel_accel, -(t.closing * t.closing)),
    }));
  }
  sys.goal = smt::any_of(std::move(unsafe_transitions));
  return sys;
}

}  // namespace

ConstraintSystem build_open_loop_query(const QuerySpec & spec)
{
  if (spec.mode != QueryMode::OpenLoop) {
    throw InvalidSpec("build_open_loop_query called with a closed-loop spec");
  }
  return build_base(spec);
}

ConstraintSystem build_closed_loop_query(const QuerySpec & spec)
{
  if (spec.mode != QueryMode::ClosedLoop) {
    throw InvalidSpec("build_closed_loop_query called with an open-loop spec");
  }
  auto sys = build_base(spec);
  for (int i = 1; i < spec.n; ++i) {
    const auto t = pair_terms(i, spec.vehicle_length);
    const auto a_f = Expr::var(smt_names::accel(i));
    const auto a_l = Expr::var(smt_names::accel(i - 1));
    // a_f <= a_l - d^2 / g, times g > 0
    sys.assertions.push_back(le(a_f * t.gap, a_l * t.gap - t.closing * t.closing));
  }
  return sys;
}

ConstraintSystem build_query(const QuerySpec & spec)
{
  return spec.mode == QueryMode::OpenLoop ? build_open_loop_query(spec)
                                          : build_closed_loop_query(spec);
}

std::string emit_smtlib(const ConstraintSystem & system)
{
  std::string out = "(set-logic QF_NRA)\n";
  for (const auto & name : system.declarations) {
    out += "(declare-const " + name + " Real)\n";
  }
  for (const auto & assertion : system.assertions) {
    out += "(assert " + smt::to_smtlib(assertion) + ")\n";
  }
  if (system.goal) {
    out += "(assert " + smt::to_smtlib(*system.goal) + ")\n";
  }
  out += "(check-sat)\n(get-model)\n";
  return out;
}

double ModelAssignment::at(std::string_view name) const
{
  const auto it = values.find(name);
  if (it == values.end()) {
    throw IncompleteModel(std::string(name));
  }
  return it->second.value;
}

smt::Environment ModelAssignment::environment() const
{
  smt::Environment env;
  for (const auto & [name, literal] : values) {
    env.emplace(name, literal.value);
  }
  return env;
}

namespace
{

std::string render_sexpr(const smt::SExpr & e)
{
  if (!e.is_list) {
    return e.atom;
  }
  std::string out = "(";
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i > 0) {
      out += ' ';
    }
    out += render_sexpr(e.items[i]);
  }
  return out + ")";
}

double parse_numeral(const smt::SExpr & e)
{
  const auto & s = e.atom;
  if (s.empty() || !(std::isdigit(static_cast<unsigned char>(s.front())))) {
    throw ParseError("expected numeric literal, got '" + s + "'", e.offset);
  }
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.') {
      throw ParseError("malformed numeric literal '" + s + "'", e.offset);
    }
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("malformed numeric literal '" + s + "'", e.offset);
  }
  return value;
}

double parse_real_literal(const smt::SExpr & e)
{
  if (!e.is_list) {
    return parse_numeral(e);
  }
  if (e.items.size() == 2 && e.items[0].is_atom("-")) {
    return -parse_real_literal(e.items[1]);
  }
  if (e.items.size() == 3 && e.items[0].is_atom("/")) {
    const double num = parse_real_literal(e.items[1]);
    const double den = parse_real_literal(e.items[2]);
    if (den == 0.0) {
      throw ParseError("zero denominator in rational literal", e.offset);
    }
    return num / den;
  }
  throw ParseError("unsupported value term '" + render_sexpr(e) + "'", e.offset);
}

bool is_error_form(const smt::SExpr & e)
{
  return e.is_list && !e.items.empty() && e.items[0].is_atom("error");
}

ModelAssignment parse_model(const smt::SExpr & block)
{
  if (!block.is_list) {
    throw ParseError("expected model block, got '" + block.atom + "'", block.offset);
  }
  std::size_t first = 0;
  if (!block.items.empty() && block.items[0].is_atom("model")) {
    first = 1;
  }
  ModelAssignment model;
  for (std::size_t i = first; i < block.items.size(); ++i) {
    const auto & def = block.items[i];
    // (define-fun <name> () <sort> <value>)
    if (
      !def.is_list || def.items.size() != 5 || !def.items[0].is_atom("define-fun") ||
      def.items[1].is_list || !def.items[2].is_list || !def.items[2].items.empty() ||
      def.items[3].is_list) {
      throw ParseError("expected (define-fun <name> () <sort> <value>)", def.offset);
    }
    const auto & sort = def.items[3].atom;
    if (sort != "Real" && sort != "Int") {
      throw ParseError("unsupported sort '" + sort + "'", def.items[3].offset);
    }
    RealLiteral literal{parse_real_literal(def.items[4]), render_sexpr(def.items[4])};
    model.values.insert_or_assign(def.items[1].atom, std::move(literal));
  }
  return model;
}

}  // namespace

SolverVerdict parse_solver_output(std::string_view text)
{
  smt::SExprReader reader(text);
  const auto head = reader.next();
  if (!head) {
    throw ParseError("empty solver output", 0);
  }
  if (head->is_list) {
    throw ParseError("expected sat, unsat or unknown", head->offset);
  }
  SolverVerdict verdict;
  if (head->atom == "unsat") {
    verdict.status = SolverVerdict::Status::Unsat;
    return verdict;
  }
  if (head->atom == "unknown") {
    verdict.status = SolverVerdict::Status::Unknown;
    return verdict;
  }
  if (head->atom != "sat") {
    throw ParseError("expected sat, unsat or unknown, got '" + head->atom + "'", head->offset);
  }
  verdict.status = SolverVerdict::Status::Sat;
  const auto block = reader.next();
  if (!block || is_error_form(*block)) {
    throw MissingModel("solver answered sat but printed no model");
  }
  verdict.model = parse_model(*block);
  return verdict;
}

bool validate_counterexample(const ModelAssignment & model, const QuerySpec & spec)
{
  const auto system = build_query(spec);
  for (const auto & name : system.declarations) {
    if (!model.contains(name)) {
      throw IncompleteModel(name);
    }
  }
  const auto env = model.environment();
  const double tol = spec.params.eps;
  for (const auto & assertion : system.assertions) {
    if (!smt::evaluate_bool(assertion, env, tol)) {
      return false;
    }
  }
  return !system.goal || smt::evaluate_bool(*system.goal, env, tol);
}

}  // namespace bcv
