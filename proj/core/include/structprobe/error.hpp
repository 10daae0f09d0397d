// Copyright 2026 The structprobe Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace structprobe {

/// Failure categories. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  invalid_argument,
  io,
  parse,
  structure,
  duplicate_key,
  bad_magic,
  version_mismatch,
  truncated,
  non_finite,
  dimension_mismatch,
  empty_root,
  undefined_loss,
  empty_corpus,
  degenerate,
  alignment,
  missing_input,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exit status used by the CLI for `kind`; always nonzero.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure carrying the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace structprobe
