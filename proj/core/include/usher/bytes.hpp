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

#ifndef USHER_BYTES_HPP
#define USHER_BYTES_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace usher {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

inline std::string to_string_view_copy(const Bytes& b) {
  return std::string(b.begin(), b.end());
}

std::string hex_encode(std::span<const std::uint8_t> data);
// Returns false on odd length or non-hex characters.
bool hex_decode(std::string_view hex, Bytes& out);

// Orders byte strings exactly as their length-prefixed canonical encodings
// would order: shorter strings first, then lexicographic.
struct LenLexLess {
  bool operator()(const Bytes& a, const Bytes& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

// 16-byte node / principal identifier.
struct Uuid {
  std::array<std::uint8_t, 16> data{};

  auto operator<=>(const Uuid&) const = default;

  std::string hex() const { return hex_encode(data); }
  static Uuid from_hex(std::string_view h);  // all-zero on bad input
};

// Deterministic byte source. Every nondeterministic choice in the system
// (key generation, nonces, uuids, sealing randomness) draws from one of
// these, so a fixed seed reproduces a run bit for bit.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  void fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t word = engine_();
      for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
        out[i] = static_cast<std::uint8_t>(word >> (8 * b));
      }
    }
  }

  Bytes bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
  }

  Uuid uuid() {
    Uuid u;
    fill(u.data);
    return u;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace usher

#endif  // USHER_BYTES_HPP
