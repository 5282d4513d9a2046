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

#include "usher/simnet.hpp"

#include <sodium.h>

#include <stdexcept>

#include "usher/codec.hpp"

namespace usher {

void SimClock::advance(std::int64_t delta) {
  if (delta < 0) throw std::runtime_error("clock cannot move backwards");
  now_ += delta;
}

void SimClock::set(std::int64_t t) {
  if (t < now_) throw std::runtime_error("clock cannot move backwards");
  now_ = t;
}

void Network::register_endpoint(const Uuid& id, EndpointHandler handler) {
  endpoints_[id] = std::move(handler);
}

bool Network::has_endpoint(const Uuid& id) const { return endpoints_.count(id) != 0; }

std::optional<Bytes> Network::deliver(const Uuid& from, const Uuid& to, const Bytes& bytes,
                                      bool piggyback, bool injected) {
  auto it = endpoints_.find(to);
  if (it == endpoints_.end()) throw std::runtime_error("unknown endpoint");

  std::uint64_t seq = nextSeq_++;
  entries_.push_back({seq, from, to, bytes, std::nullopt, clock_.now(), injected, false});
  std::size_t reqIndex = entries_.size() - 1;
  if (drops_.count(seq) != 0) {
    entries_[reqIndex].dropped = true;
    return std::nullopt;
  }

  // The handler may itself send messages, growing entries_; index, not
  // reference, survives that.
  Bytes reply = it->second(from, bytes);

  if (piggyback) {
    entries_[reqIndex].responseBytes = reply;
    return reply;
  }

  std::uint64_t rseq = nextSeq_++;
  entries_.push_back({rseq, to, from, reply, std::nullopt, clock_.now(), injected, false});
  if (drops_.count(rseq) != 0) {
    entries_.back().dropped = true;
    return std::nullopt;
  }
  return reply;
}

std::optional<Bytes> Network::call(const Uuid& from, const Uuid& to, const Bytes& bytes) {
  return deliver(from, to, bytes, false, false);
}

std::optional<Bytes> Network::exchange(const Uuid& from, const Uuid& to, const Bytes& bytes) {
  return deliver(from, to, bytes, true, false);
}

void Network::schedule_drop(std::uint64_t seq) { drops_.insert(seq); }

std::optional<Bytes> Network::adversary_replay(std::uint64_t seq) {
  if (seq >= entries_.size()) throw std::runtime_error("replay of unknown seq");
  // Copy first: delivery appends and may reallocate.
  TranscriptEntry original = entries_[seq];
  return deliver(original.from, original.to, original.bytes, false, true);
}

std::optional<Bytes> Network::adversary_tamper(std::uint64_t seq, std::size_t byteIndex,
                                               std::uint8_t newByte) {
  if (seq >= entries_.size()) throw std::runtime_error("tamper of unknown seq");
  TranscriptEntry original = entries_[seq];
  if (byteIndex >= original.bytes.size()) throw std::runtime_error("tamper index out of range");
  Bytes mutated = original.bytes;
  mutated[byteIndex] = newByte;
  return deliver(original.from, original.to, mutated, false, true);
}

Bytes Network::transcript_hash() const {
  Encoder e;
  for (const auto& entry : entries_) {
    e.u64(entry.seq);
    e.uuid(entry.from);
    e.uuid(entry.to);
    e.bytes(entry.bytes);
    e.boolean(entry.responseBytes.has_value());
    if (entry.responseBytes) e.bytes(*entry.responseBytes);
    e.i64(entry.simTime);
    e.boolean(entry.injected);
    e.boolean(entry.dropped);
  }
  Bytes material = e.take();
  Bytes out(32);
  crypto_generichash(out.data(), out.size(), material.data(), material.size(), nullptr, 0);
  return out;
}

}  // namespace usher
