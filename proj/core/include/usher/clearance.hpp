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

#ifndef USHER_CLEARANCE_HPP
#define USHER_CLEARANCE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/crypto.hpp"
#include "usher/messages.hpp"
#include "usher/result.hpp"
#include "usher/tokens.hpp"

namespace usher {

// One budget per (enrollment, ticket, position of the Debit modifier in
// the grant-edge ++ ticket modifier concatenation). Keying by enrollment
// rather than ephemeral key means budgets survive key rotation and are
// shared by everyone holding that enrollment.
struct LedgerKey {
  Bytes enrollment;   // Enrollment field bytes
  Bytes ticketToken;  // Token field bytes
  std::uint32_t index = 0;

  friend auto operator<=>(const LedgerKey&, const LedgerKey&) = default;
};

struct LedgerValue {
  bool decimal = false;
  std::int64_t raw = 0;  // never negative
};

struct CorrelatorRecord {
  LedgerKey key;
  std::int64_t createdAt = 0;
};

struct AgreementRecord {
  ImplicationMap implications;
  ServiceAgreement agreement;
};

struct CommitOutcome {
  bool proceed = false;
  FailureCode code = FailureCode::Malformed;
};

// The producer-side decision maker. All mutation happens under one lock;
// clear and debit_commit are safe to call from many threads.
class ClearanceCenter {
 public:
  ClearanceCenter(Uuid selfId, KeyPair selfKeys, std::uint64_t rngSeed,
                  std::int64_t correlatorTimeout = 120);

  const Uuid& id() const { return selfId_; }
  PublicKey public_key() const { return selfKeys_.pub(); }

  // Administrative surface (trusted local calls). Re-registration replaces
  // the org's maps atomically and resets that org's budgets.
  void register_agreement(const Uuid& orgId, const PublicKey& orgPub, ImplicationMap implications,
                          ServiceAgreement agreement);
  void register_server(const Uuid& serverId, const PublicKey& serverPub);

  // Wire entry point: ClearanceRequest or DebitCommit bytes in, sealed
  // response out. Messages that cannot be attributed to a registered
  // server get a cleartext FailureMessage instead.
  Bytes handle(const Bytes& message, std::int64_t now);

  // Decision pipeline on an already authenticated request. Exposed for
  // tests that drive C without transport.
  ClearanceDecisionPayload decide(const ClearanceRequestPayload& request, std::int64_t now);

  // Atomic check-and-decrement; consumes the correlator only on Proceed.
  CommitOutcome debit_commit(const Token& correlator, const DebitAmount& amount, std::int64_t now);

  void correlator_gc(std::int64_t now);

  Bytes save_state() const;
  static Result<std::unique_ptr<ClearanceCenter>> load_state(std::span<const std::uint8_t> data,
                                                             std::uint64_t rngSeed,
                                                             std::int64_t correlatorTimeout = 120);

  std::optional<std::int64_t> ledger_remaining(const Enrollment& enrollment, const Token& ticket,
                                               std::uint32_t index) const;
  std::size_t correlator_count() const;

 private:
  ClearanceDecisionPayload decide_locked(const ClearanceRequestPayload& request, std::int64_t now);
  Bytes respond_clear(const ClearanceRequest& msg, std::int64_t now);
  Bytes respond_commit(const DebitCommit& msg, std::int64_t now);
  void gc_locked(std::int64_t now);

  Uuid selfId_;
  KeyPair selfKeys_;
  std::int64_t correlatorTimeout_;

  mutable std::mutex mu_;
  DetRng rng_;
  std::map<Uuid, PublicKey> orgRegistry_;
  std::map<Uuid, PublicKey> serverRegistry_;
  std::map<Uuid, AgreementRecord> agreements_;
  std::map<LedgerKey, LedgerValue> debitLedger_;
  std::map<Bytes, CorrelatorRecord> correlators_;  // keyed by correlator Token bytes
};

}  // namespace usher

#endif  // USHER_CLEARANCE_HPP
