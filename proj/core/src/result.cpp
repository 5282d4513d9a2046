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

#include "usher/result.hpp"

#include <array>
#include <utility>

namespace usher {

namespace {

constexpr std::array<std::pair<FailureCode, std::string_view>, 10> kNames = {{
    {FailureCode::NotAuthorized, "NotAuthorized"},
    {FailureCode::UnknownOrg, "UnknownOrg"},
    {FailureCode::BadSignature, "BadSignature"},
    {FailureCode::Expired, "Expired"},
    {FailureCode::Replay, "Replay"},
    {FailureCode::ModifierDenied, "ModifierDenied"},
    {FailureCode::DebitExhausted, "DebitExhausted"},
    {FailureCode::ConfirmRequired, "ConfirmRequired"},
    {FailureCode::Malformed, "Malformed"},
    {FailureCode::DecryptFailure, "DecryptFailure"},
}};

}  // namespace

std::string_view failure_code_name(FailureCode code) {
  for (const auto& [c, name] : kNames)
    if (c == code) return name;
  return "Unknown";
}

bool failure_code_from_name(std::string_view name, FailureCode& out) {
  for (const auto& [c, n] : kNames) {
    if (n == name) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace usher
