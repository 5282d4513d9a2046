// Copyright 2026 The Usher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef USHER_RESULT_HPP
#define USHER_RESULT_HPP

#include <cassert>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace usher {

// Every way a request can be turned down, end to end. These travel on the
// wire (one byte), surface at the CLI, and name test fixtures, so the
// numbering is part of the stable format.
enum class FailureCode : std::uint8_t {
  NotAuthorized = 1,
  UnknownOrg = 2,
  BadSignature = 3,
  Expired = 4,
  Replay = 5,
  ModifierDenied = 6,
  DebitExhausted = 7,
  ConfirmRequired = 8,
  Malformed = 9,
  // Local-only: an authenticated decryption that did not verify. Never
  // serialized; boundaries that owe a wire answer report Malformed.
  DecryptFailure = 10,
};

std::string_view failure_code_name(FailureCode code);
// Returns false if the name is not a known code.
bool failure_code_from_name(std::string_view name, FailureCode& out);

struct Failure {
  FailureCode code;
  std::string detail;

  Failure(FailureCode c, std::string d = {}) : code(c), detail(std::move(d)) {}
};

// Value-or-Failure. Parsers and protocol steps return this instead of
// throwing; a Failure is an ordinary protocol outcome, not an exception.
template <typename T>
class Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Failure f) : v_(std::move(f)) {}
  Result(FailureCode c, std::string detail = {})
      : v_(Failure(c, std::move(detail))) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() {
    assert(ok());
    return std::get<T>(v_);
  }
  const T& value() const {
    assert(ok());
    return std::get<T>(v_);
  }
  T take() {
    assert(ok());
    return std::move(std::get<T>(v_));
  }

  const Failure& failure() const {
    assert(!ok());
    return std::get<Failure>(v_);
  }
  FailureCode code() const { return failure().code; }

 private:
  std::variant<T, Failure> v_;
};

// Result<void> analogue.
class Status {
 public:
  Status() : failure_(std::nullopt) {}
  Status(Failure f) : failure_(std::move(f)) {}
  Status(FailureCode c, std::string detail = {})
      : failure_(Failure(c, std::move(detail))) {}

  static Status ok_status() { return Status(); }

  bool ok() const { return !failure_.has_value(); }
  explicit operator bool() const { return ok(); }
  const Failure& failure() const {
    assert(!ok());
    return *failure_;
  }
  FailureCode code() const { return failure().code; }

 private:
  std::optional<Failure> failure_;
};

}  // namespace usher

#endif  // USHER_RESULT_HPP
