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

#ifndef BCV__SMT__SEXPR_HPP_
#define BCV__SMT__SEXPR_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcv::smt
{

/// A parsed s-expression: either an atom (symbol, numeral, string) or a list.
struct SExpr
{
  bool is_list{false};
  std::string atom;
  std::vector<SExpr> items;
  std::size_t offset{0};  // byte offset of the first character in the source

  [[nodiscard]] bool is_atom(std::string_view text) const { return !is_list && atom == text; }
};

/// Incremental reader over SMT-LIB output. Comments (`;` to end of line) and
/// whitespace are skipped between expressions.
class SExprReader
{
public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  /// Next top-level expression, or nullopt at end of input.
  /// Throws ParseError on unbalanced parentheses or unterminated literals.
  std::optional<SExpr> next();

  [[nodiscard]] std::size_t position() const { return pos_; }

private:
  void skip_blank();
  SExpr read();

  std::string_view text_;
  std::size_t pos_{0};
};

}  // namespace bcv::smt

#endif  // BCV__SMT__SEXPR_HPP_
