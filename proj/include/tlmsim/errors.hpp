/* Copyright 2026 The tlmsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tlmsim {

using Tick = std::uint64_t;

/// Base of every error raised by the simulator.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad key, k not dividing m, ...).
class ConfigError : public SimError {
 public:
  using SimError::SimError;
};

/// An output file could not be written.
class IoError : public SimError {
 public:
  using SimError::SimError;
};

/// A breached simulator invariant. The run is aborted.
class InvariantError : public SimError {
 public:
  using SimError::SimError;
};

/// Misuse of the management protocol (unknown barrier, bad count, ...).
class ProtocolError : public SimError {
 public:
  using SimError::SimError;
};

/// Message payload does not match the schema of its type.
class SchemaError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

/// A node tried to use a bus it is not attached to.
class RoutingError : public SimError {
 public:
  using SimError::SimError;
};

/// Malformed trace text or an invalid trace step.
class TraceError : public SimError {
 public:
  TraceError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : SimError(line == 0 ? what
                           : "line " + std::to_string(line) + ", column " +
                                 std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace tlmsim
