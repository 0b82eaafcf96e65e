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

#include "bcv/smt/sexpr.hpp"

#include "bcv/errors.hpp"

#include <cctype>

namespace bcv::smt
{

void SExprReader::skip_blank()
{
  while (pos_ < text_.size()) {
    const char c = text_[pos_];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos_;
    } else if (c == ';') {
      while (pos_ < text_.size() && text_[pos_] != '\n') {
        ++pos_;
      }
    } else {
      break;
    }
  }
}

std::optional<SExpr> SExprReader::next()
{
  skip_blank();
  if (pos_ >= text_.size()) {
    return std::nullopt;
  }
  return read();
}

SExpr SExprReader::read()
{
  skip_blank();
  if (pos_ >= text_.size()) {
    throw ParseError("unexpected end of input", pos_);
  }
  SExpr out;
  out.offset = pos_;
  const char c = text_[pos_];
  if (c == '(') {
    out.is_list = true;
    ++pos_;
    for (;;) {
      skip_blank();
      if (pos_ >= text_.size()) {
        throw ParseError("unbalanced '('", out.offset);
      }
      if (text_[pos_] == ')') {
        ++pos_;
        return out;
      }
      out.items.push_back(read());
    }
  }
  if (c == ')') {
    throw ParseError("unexpected ')'", pos_);
  }
  if (c == '"' || c == '|') {
    const char close = c;
    std::size_t end = pos_ + 1;
    for (;;) {
      if (end >= text_.size()) {
        throw ParseError("unterminated literal", pos_);
      }
      if (text_[end] == close) {
        // SMT-LIB escapes a quote inside a string by doubling it.
        if (close == '"' && end + 1 < text_.size() && text_[end + 1] == '"') {
          end += 2;
          continue;
        }
        break;
      }
      ++end;
    }
    out.atom = std::string(text_.substr(pos_, end + 1 - pos_));
    if (close == '|') {
      out.atom = out.atom.substr(1, out.atom.size() - 2);
    }
    pos_ = end + 1;
    return out;
  }
  const std::size_t start = pos_;
  while (pos_ < text_.size()) {
    const char d = text_[pos_];
    if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') {
      break;
    }
    ++pos_;
  }
  out.atom = std::string(text_.substr(start, pos_ - start));
  return out;
}

}  // namespace bcv::smt
