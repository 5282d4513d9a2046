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

#include "usher/codec.hpp"

namespace usher {

Result<Tag> peek_tag(std::span<const std::uint8_t> data) {
  if (data.size() < 2) return Failure(FailureCode::Malformed, "short message");
  if (data[0] != kWireVersion) return Failure(FailureCode::Malformed, "bad version");
  return static_cast<Tag>(data[1]);
}

}  // namespace usher
