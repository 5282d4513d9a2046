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

#ifndef USHER_SERVER_HPP
#define USHER_SERVER_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/crypto.hpp"
#include "usher/messages.hpp"
#include "usher/result.hpp"
#include "usher/tokens.hpp"

namespace usher {

// Server-side access list. Maps a ticket token to the resources it opens,
// each with the modifiers this server imposes on top of whatever the
// clearance center already applied.
class Acl {
public:
  Acl() = default;

  void load(const std::vector<AclEntry>& entries);

  // All ticket tokens that this server would accept for the resource.
  std::vector<Token> candidate_tickets(const Token& resource) const;

  // Modifiers for one (ticket, resource) pair. Empty optional when the
  // pair is not on the list.
  std::optional<std::vector<Modifier>> server_modifiers(const Token& ticket,
                                                        const Token& resource) const;

  std::vector<AclEntry> snapshot() const;

private:
  // Key: ticket token canonical bytes. Value keyed by resource bytes.
  std::map<Bytes, std::pair<Token, std::map<Bytes, std::pair<Token, std::vector<Modifier>>>>> entries_;
};

// Sliding-window replay filter over request stamps. A stamp is accepted at
// most once while it stays inside the window; stamps outside the window are
// rejected outright, which bounds the cache size.
class ReplayCache {
public:
  explicit ReplayCache(std::int64_t windowSeconds = 300) : window_(windowSeconds) {}

  // Atomically checks the stamp and records it. Returns false when the
  // stamp was seen before or lies outside [now - window, now + window].
  bool check_and_insert(const Tau& tau, std::int64_t now);

  std::size_t size() const;
  std::int64_t window() const { return window_; }

private:
  void evict_locked(std::int64_t now);

  std::int64_t window_;
  mutable std::mutex mu_;
  // Keyed by full stamp encoding; value is the stamp's own timestamp,
  // used for eviction.
  std::map<Bytes, std::int64_t> seen_;
};

// A resource handler produces the answer payload for one granted request.
// Params arrive already canonically ordered.
using ResourceHandler = std::function<Bytes(const ParamMap& params, std::int64_t now)>;

class Network;

// The producer-side server S. Owns the replay filter, the access list and
// the resource handlers. Talks to its clearance center and back to the
// requesting user through the simulated network.
class ResourceServer {
public:
  ResourceServer(ServerId selfId, KeyPair selfKeys, ServerId clearanceId,
                 PublicKey clearancePub, std::uint64_t rngSeed,
                 std::int64_t replayWindow = 300);

  ServerId id() const { return selfId_; }
  PublicKey public_key() const { return selfKeys_.pub(); }

  void load_acl(const std::vector<AclEntry>& entries);
  std::vector<AclEntry> acl_snapshot() const;

  // Installs a handler for one resource token.
  void add_resource(const Token& resource, ResourceHandler handler);

  // Built-in resource behaviors used by scenarios and drills.
  // A counter resource increments an internal register per granted request
  // and answers with its new value.
  void add_counter_resource(const Token& resource);
  std::int64_t counter_value(const Token& resource) const;
  // An echo resource answers with one "key=value" text line per param.
  void add_echo_resource(const Token& resource);
  // A document resource answers with fixed bytes.
  void add_document_resource(const Token& resource, Bytes content);

  // Entry point for one request envelope. Drives the full pipeline:
  // open, replay check, clearance exchange, modifier evaluation,
  // confirmation, debit commit, dispatch, sealed answer. The network is
  // used for the clearance exchange and the confirmation round trip;
  // requester is the return address for the confirmation ask.
  Bytes handle_request(const Bytes& wire, Network& net, const Uuid& requester, std::int64_t now);

  std::size_t replay_cache_size() const { return replay_.size(); }

private:
  struct Granted;

  Bytes fail(FailureCode code, const std::string& detail) const;
  Bytes answer_to(const PublicKey& kU, const Bytes& payload);

  ServerId selfId_;
  KeyPair selfKeys_;
  ServerId clearanceId_;
  PublicKey clearancePub_;
  mutable std::mutex rngMu_;
  DetRng rng_;
  ReplayCache replay_;

  mutable std::mutex aclMu_;
  Acl acl_;

  mutable std::mutex resourceMu_;
  std::map<Bytes, std::pair<Token, ResourceHandler>> handlers_;
  std::map<Bytes, std::shared_ptr<std::atomic<std::int64_t>>> counters_;
};

}  // namespace usher

#endif  // USHER_SERVER_HPP
