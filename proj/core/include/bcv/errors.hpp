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

#ifndef BCV__ERRORS_HPP_
#define BCV__ERRORS_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bcv
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Closing speed too small for the barrier derivative or the safe bound to exist.
class DegenerateClosing : public Error
{
public:
  using Error::Error;
};

class InvalidSpec : public Error
{
public:
  using Error::Error;
};

/// Solver output that matches none of the accepted grammars.
class ParseError : public Error
{
public:
  ParseError(const std::string & what, std::size_t offset)
  : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset)
  {
  }
  [[nodiscard]] std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class MissingModel : public Error
{
public:
  using Error::Error;
};

class IncompleteModel : public Error
{
public:
  explicit IncompleteModel(const std::string & symbol)
  : Error("model has no value for '" + symbol + "'"), symbol_(symbol)
  {
  }
  [[nodiscard]] const std::string & symbol() const { return symbol_; }

private:
  std::string symbol_;
};

/// Base class for trajectory ingestion failures.
class DataError : public Error
{
public:
  using Error::Error;
};

class MissingColumn : public DataError
{
public:
  explicit MissingColumn(const std::string & column)
  : DataError("MissingColumn(\"" + column + "\")"), column_(column)
  {
  }
  [[nodiscard]] const std::string & column() const { return column_; }

private:
  std::string column_;
};

class NonMonotoneFrames : public DataError
{
public:
  explicit NonMonotoneFrames(std::int64_t vehicle_id)
  : DataError("NonMonotoneFrames(" + std::to_string(vehicle_id) + ")"), vehicle_id_(vehicle_id)
  {
  }
  [[nodiscard]] std::int64_t vehicle_id() const { return vehicle_id_; }

private:
  std::int64_t vehicle_id_;
};

class EmptyDataset : public DataError
{
public:
  using DataError::DataError;
};

class EmptyWindow : public Error
{
public:
  using Error::Error;
};

class WindowMismatch : public Error
{
public:
  using Error::Error;
};

class InvalidProfile : public Error
{
public:
  using Error::Error;
};

}  // namespace bcv

#endif  // BCV__ERRORS_HPP_
