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

#ifndef USHER_SIMNET_HPP
#define USHER_SIMNET_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "usher/bytes.hpp"

namespace usher {

// Shared simulated clock. Every actor on one network reads the same time;
// tests move it forward explicitly.
class SimClock {
public:
  explicit SimClock(std::int64_t start = 0) : now_(start) {}

  std::int64_t now() const { return now_; }

  // Time never moves backwards.
  void advance(std::int64_t delta);
  void set(std::int64_t t);

private:
  std::int64_t now_;
};

struct TranscriptEntry {
  std::uint64_t seq = 0;
  Uuid from;
  Uuid to;
  Bytes bytes;
  // Present only for a piggybacked exchange, where one transport step
  // carries a request and its reply together.
  std::optional<Bytes> responseBytes;
  std::int64_t simTime = 0;
  // True when an adversary injected this copy rather than an actor.
  bool injected = false;
  // Recorded but never handed to the receiver.
  bool dropped = false;
};

// An endpoint consumes one wire message and produces the reply bytes.
// The caller id is transport metadata, not an authenticated identity.
using EndpointHandler = std::function<Bytes(const Uuid& caller, const Bytes& wire)>;

// In-process transport between actor instances. Delivery is reliable and
// in order; the only perturbations are explicit adversary actions. Every
// message is appended to the transcript before any delivery decision, so
// the transcript is a byte-exact record of what crossed the wire.
class Network {
public:
  explicit Network(SimClock& clock) : clock_(clock) {}

  SimClock& clock() { return clock_; }
  const SimClock& clock() const { return clock_; }

  void register_endpoint(const Uuid& id, EndpointHandler handler);
  bool has_endpoint(const Uuid& id) const;

  // Request plus reply, recorded as two transcript entries. Returns the
  // reply, or nothing when either direction was dropped.
  std::optional<Bytes> call(const Uuid& from, const Uuid& to, const Bytes& bytes);

  // Request plus reply recorded as one transcript entry: the two travel
  // as a single transport step and cannot be separated by an adversary.
  std::optional<Bytes> exchange(const Uuid& from, const Uuid& to, const Bytes& bytes);

  // Suppresses delivery of the message that will be assigned this seq.
  void schedule_drop(std::uint64_t seq);

  // Re-delivers a byte-exact copy of a recorded message to its original
  // receiver. Returns the receiver's reply. Unknown seq is a harness
  // misuse and throws.
  std::optional<Bytes> adversary_replay(std::uint64_t seq);

  // Delivers a copy of a recorded message with one byte changed.
  std::optional<Bytes> adversary_tamper(std::uint64_t seq, std::size_t byteIndex,
                                        std::uint8_t newByte);

  const std::vector<TranscriptEntry>& transcript() const { return entries_; }
  std::uint64_t next_seq() const { return nextSeq_; }

  // Digest over every recorded field, for determinism checks.
  Bytes transcript_hash() const;

private:
  std::optional<Bytes> deliver(const Uuid& from, const Uuid& to, const Bytes& bytes,
                               bool piggyback, bool injected);

  SimClock& clock_;
  std::uint64_t nextSeq_ = 0;
  std::map<Uuid, EndpointHandler> endpoints_;
  std::set<std::uint64_t> drops_;
  std::vector<TranscriptEntry> entries_;
};

}  // namespace usher

#endif  // USHER_SIMNET_HPP
