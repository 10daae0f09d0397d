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

#include "structprobe/error.hpp"

namespace structprobe {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::structure: return "structure";
    case ErrorKind::duplicate_key: return "duplicate_key";
    case ErrorKind::bad_magic: return "bad_magic";
    case ErrorKind::version_mismatch: return "version_mismatch";
    case ErrorKind::truncated: return "truncated";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::empty_root: return "empty_root";
    case ErrorKind::undefined_loss: return "undefined_loss";
    case ErrorKind::empty_corpus: return "empty_corpus";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::missing_input: return "missing_input";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  // 1 is reserved for unexpected failures, 2 for command-line usage errors.
  return 10 + static_cast<int>(kind);
}

}  // namespace structprobe
