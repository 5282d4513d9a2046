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

#include "usher/clearance.hpp"

#include <algorithm>

namespace usher {

namespace {

Uuid ledger_org(const LedgerKey& key) {
  // Enrollment field bytes: token (uuid + length-prefixed value), org
  // uuid, group. Decode just far enough to read the org.
  Decoder d(key.enrollment);
  Enrollment en = Enrollment::decode_body(d);
  return en.org;
}

ClearanceDenied denied(FailureCode code, const char* detail) {
  return ClearanceDenied{code, detail};
}

// Persistent image of a ClearanceCenter. Correlators ride along so a
// reloaded center honors commits for transactions begun before the save.
struct ClearanceStateFile {
  Uuid selfId;
  KeyPair selfKeys;
  std::map<Uuid, PublicKey> orgRegistry;
  std::map<Uuid, PublicKey> serverRegistry;
  std::vector<std::pair<Uuid, AgreementRecord>> agreements;
  std::vector<std::pair<LedgerKey, LedgerValue>> ledger;
  std::vector<std::pair<Bytes, CorrelatorRecord>> correlators;

  static constexpr Tag kTag = Tag::ClearanceStateFile;

  void encode_body(Encoder& e) const {
    e.uuid(selfId);
    selfKeys.encode_body(e);
    e.sorted_set(orgRegistry.begin(), orgRegistry.end(), [](Encoder& sub, const auto& kv) {
      sub.uuid(kv.first);
      kv.second.encode_body(sub);
    });
    e.sorted_set(serverRegistry.begin(), serverRegistry.end(), [](Encoder& sub, const auto& kv) {
      sub.uuid(kv.first);
      kv.second.encode_body(sub);
    });
    e.sorted_set(agreements.begin(), agreements.end(), [](Encoder& sub, const auto& kv) {
      sub.uuid(kv.first);
      kv.second.implications.encode_body(sub);
      kv.second.agreement.encode_body(sub);
    });
    e.sorted_set(ledger.begin(), ledger.end(), [](Encoder& sub, const auto& kv) {
      sub.bytes(kv.first.enrollment);
      sub.bytes(kv.first.ticketToken);
      sub.u32(kv.first.index);
      sub.boolean(kv.second.decimal);
      sub.i64(kv.second.raw);
    });
    e.sorted_set(correlators.begin(), correlators.end(), [](Encoder& sub, const auto& kv) {
      sub.bytes(kv.first);
      sub.bytes(kv.second.key.enrollment);
      sub.bytes(kv.second.key.ticketToken);
      sub.u32(kv.second.key.index);
      sub.i64(kv.second.createdAt);
    });
  }

  static ClearanceStateFile decode_body(Decoder& d) {
    ClearanceStateFile f;
    f.selfId = d.uuid();
    f.selfKeys = KeyPair::decode_body(d);
    d.sorted_map([&](Decoder& sub) { f.orgRegistry.emplace(sub.uuid(), PublicKey{}); },
                 [&](Decoder& sub) { f.orgRegistry.rbegin()->second = PublicKey::decode_body(sub); });
    d.sorted_map(
        [&](Decoder& sub) { f.serverRegistry.emplace(sub.uuid(), PublicKey{}); },
        [&](Decoder& sub) { f.serverRegistry.rbegin()->second = PublicKey::decode_body(sub); });
    d.sorted_map([&](Decoder& sub) { f.agreements.emplace_back(sub.uuid(), AgreementRecord{}); },
                 [&](Decoder& sub) {
                   f.agreements.back().second.implications = ImplicationMap::decode_body(sub);
                   f.agreements.back().second.agreement = ServiceAgreement::decode_body(sub);
                 });
    d.sorted_set([&](Decoder& sub) {
      LedgerKey key{sub.bytes(), sub.bytes(), sub.u32()};
      LedgerValue val{sub.boolean(), sub.i64()};
      if (val.raw < 0) throw CodecError("negative ledger value");
      f.ledger.emplace_back(std::move(key), val);
    });
    d.sorted_set([&](Decoder& sub) {
      Bytes token = sub.bytes();
      CorrelatorRecord rec;
      rec.key = LedgerKey{sub.bytes(), sub.bytes(), sub.u32()};
      rec.createdAt = sub.i64();
      f.correlators.emplace_back(std::move(token), std::move(rec));
    });
    return f;
  }
};

}  // namespace

ClearanceCenter::ClearanceCenter(Uuid selfId, KeyPair selfKeys, std::uint64_t rngSeed,
                                 std::int64_t correlatorTimeout)
    : selfId_(selfId),
      selfKeys_(std::move(selfKeys)),
      correlatorTimeout_(correlatorTimeout),
      rng_(rngSeed) {}

void ClearanceCenter::register_agreement(const Uuid& orgId, const PublicKey& orgPub,
                                         ImplicationMap implications, ServiceAgreement agreement) {
  implications.normalize();
  agreement.normalize();
  std::lock_guard<std::mutex> lock(mu_);
  orgRegistry_[orgId] = orgPub;
  agreements_[orgId] = AgreementRecord{std::move(implications), std::move(agreement)};
  // Fresh maps mean fresh budgets; stale correlators for them die too.
  for (auto it = debitLedger_.begin(); it != debitLedger_.end();) {
    it = ledger_org(it->first) == orgId ? debitLedger_.erase(it) : std::next(it);
  }
  for (auto it = correlators_.begin(); it != correlators_.end();) {
    it = ledger_org(it->second.key) == orgId ? correlators_.erase(it) : std::next(it);
  }
}

void ClearanceCenter::register_server(const Uuid& serverId, const PublicKey& serverPub) {
  std::lock_guard<std::mutex> lock(mu_);
  serverRegistry_[serverId] = serverPub;
}

Bytes ClearanceCenter::handle(const Bytes& message, std::int64_t now) {
  Result<Tag> tag = peek_tag(message);
  if (tag.ok() && tag.value() == Tag::ClearanceRequest) {
    Result<ClearanceRequest> msg = canonical_decode<ClearanceRequest>(message);
    if (msg.ok()) return respond_clear(msg.value(), now);
  } else if (tag.ok() && tag.value() == Tag::DebitCommit) {
    Result<DebitCommit> msg = canonical_decode<DebitCommit>(message);
    if (msg.ok()) return respond_commit(msg.value(), now);
  }
  return canonical_encode(FailureMessage{FailureCode::Malformed, "unrecognized message"});
}

Bytes ClearanceCenter::respond_clear(const ClearanceRequest& msg, std::int64_t now) {
  std::map<Uuid, PublicKey> registrySnapshot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    registrySnapshot = serverRegistry_;
  }
  Result<ClearanceRequestPayload> parsed =
      parse_clearance_request(selfKeys_, registrySnapshot, msg);
  if (!parsed.ok()) {
    // No authenticated requester to seal a denial to.
    return canonical_encode(
        FailureMessage{parsed.failure().code, parsed.failure().detail});
  }
  ClearanceDecisionPayload decision = decide(parsed.value(), now);

  std::lock_guard<std::mutex> lock(mu_);
  const PublicKey& serverPub = registrySnapshot.at(parsed.value().serverId);
  Result<ClearanceResponse> resp = build_clearance_response(selfKeys_, serverPub, decision, rng_);
  if (!resp.ok())
    return canonical_encode(FailureMessage{FailureCode::Malformed, "response build failed"});
  return canonical_encode(resp.value());
}

Bytes ClearanceCenter::respond_commit(const DebitCommit& msg, std::int64_t now) {
  std::map<Uuid, PublicKey> registrySnapshot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    registrySnapshot = serverRegistry_;
  }
  Result<DebitCommitPayload> parsed = parse_debit_commit(selfKeys_, registrySnapshot, msg);
  if (!parsed.ok()) {
    return canonical_encode(
        FailureMessage{parsed.failure().code, parsed.failure().detail});
  }
  CommitOutcome outcome = debit_commit(parsed.value().correlator, parsed.value().amount, now);

  DebitResultPayload payload;
  payload.correlator = parsed.value().correlator;
  payload.proceed = outcome.proceed;
  if (!outcome.proceed) {
    payload.code = outcome.code;
    payload.detail = "commit refused";
  }
  std::lock_guard<std::mutex> lock(mu_);
  const PublicKey& serverPub = registrySnapshot.at(parsed.value().serverId);
  Result<DebitResult> resp = build_debit_result(selfKeys_, serverPub, payload, rng_);
  if (!resp.ok())
    return canonical_encode(FailureMessage{FailureCode::Malformed, "response build failed"});
  return canonical_encode(resp.value());
}

ClearanceDecisionPayload ClearanceCenter::decide(const ClearanceRequestPayload& request,
                                                 std::int64_t now) {
  std::lock_guard<std::mutex> lock(mu_);
  gc_locked(now);
  return decide_locked(request, now);
}

ClearanceDecisionPayload ClearanceCenter::decide_locked(const ClearanceRequestPayload& request,
                                                        std::int64_t now) {
  ClearanceDecisionPayload out;

  Result<Bytes> blobPlain = crypto_open(selfKeys_, request.blob);
  if (!blobPlain.ok()) {
    out.v = denied(FailureCode::Malformed, "clearance blob did not open");
    return out;
  }
  Result<ClearanceBlobPayload> blob = canonical_decode<ClearanceBlobPayload>(blobPlain.value());
  if (!blob.ok()) {
    out.v = denied(FailureCode::Malformed, "clearance blob structure");
    return out;
  }

  // The claim must be signed by the ephemeral key presented next to it:
  // that signature is what makes the certificate non-transferable.
  if (!crypto_verify(blob.value().kU, blob.value().claim)) {
    out.v = denied(FailureCode::BadSignature, "ephemeral signature");
    return out;
  }
  Result<ClearanceClaimPayload> claim =
      canonical_decode<ClearanceClaimPayload>(blob.value().claim.payload);
  if (!claim.ok()) {
    out.v = denied(FailureCode::Malformed, "claim structure");
    return out;
  }

  auto orgIt = orgRegistry_.find(claim.value().org);
  if (orgIt == orgRegistry_.end()) {
    out.v = denied(FailureCode::UnknownOrg, "org not registered");
    return out;
  }
  Result<CertificatePayload> cert = verify_certificate(orgIt->second, claim.value().certificate);
  if (!cert.ok()) {
    out.v = denied(cert.failure().code, "certificate");
    return out;
  }

  if (!(cert.value().kU == blob.value().kU)) {
    out.v = denied(FailureCode::BadSignature, "ephemeral key binding");
    return out;
  }
  for (const Enrollment& en : cert.value().enrollments) {
    if (en.org != claim.value().org) {
      out.v = denied(FailureCode::Malformed, "enrollment outside issuing org");
      return out;
    }
  }
  if (now > cert.value().expiry) {
    out.v = denied(FailureCode::Expired, "certificate expired");
    return out;
  }

  auto agreementIt = agreements_.find(claim.value().org);
  if (agreementIt == agreements_.end()) {
    out.v = denied(FailureCode::UnknownOrg, "no agreement for org");
    return out;
  }
  const AgreementRecord& record = agreementIt->second;
  std::vector<Enrollment> closed =
      enrollment_closure(cert.value().enrollments, record.implications);

  std::vector<Ticket> candidates;
  candidates.reserve(request.candidates.size());
  for (const Token& t : request.candidates) candidates.push_back(Ticket{t, {}});
  std::optional<GrantMatch> match = agreement_lookup(record.agreement, closed, candidates);
  if (!match) {
    out.v = denied(FailureCode::NotAuthorized, "no grant covers the candidates");
    return out;
  }

  // Partial evaluation: what C can decide without the request parameters.
  EvalContext ctx;
  ctx.now = now;
  std::vector<Modifier> composed = match->grantModifiers;
  composed.insert(composed.end(), match->ticket.modifiers.begin(),
                  match->ticket.modifiers.end());

  Bytes enrollmentBytes = body_bytes(match->enrollment);
  Bytes ticketTokenBytes = body_bytes(match->ticket.token);
  std::optional<std::uint32_t> firstDebit;

  for (std::uint32_t i = 0; i < composed.size(); ++i) {
    Modifier& m = composed[i];
    if (const auto* db = m.debit()) {
      LedgerKey key{enrollmentBytes, ticketTokenBytes, i};
      auto [it, inserted] =
          debitLedger_.try_emplace(key, LedgerValue{db->remaining.decimal, db->remaining.raw});
      if (it->second.raw <= 0) {
        out.v = denied(FailureCode::DebitExhausted, "budget exhausted");
        return out;
      }
      // Report the live balance, not the agreement's starting value.
      m.debit()->remaining.raw = it->second.raw;
      if (!firstDebit) firstDebit = i;
      continue;
    }
    if (std::holds_alternative<ParamConstraintModifier>(m.v)) continue;  // needs z; S's job
    if (eval_modifier(m, ctx) == Verdict::Fail) {
      out.v = denied(FailureCode::ModifierDenied, "modifier refused at clearance");
      return out;
    }
  }

  ClearanceGranted granted;
  granted.ticket = match->ticket;
  granted.effectiveModifiers = std::move(composed);
  granted.kUEcho = blob.value().kU;
  if (firstDebit) {
    Token correlator;
    correlator.creator = selfId_;
    correlator.value = rng_.bytes(16);
    correlators_[body_bytes(correlator)] =
        CorrelatorRecord{LedgerKey{enrollmentBytes, ticketTokenBytes, *firstDebit}, now};
    granted.debitCorrelator = std::move(correlator);
  }
  out.v = std::move(granted);
  return out;
}

CommitOutcome ClearanceCenter::debit_commit(const Token& correlator, const DebitAmount& amount,
                                            std::int64_t now) {
  if (amount.raw <= 0) return {false, FailureCode::Malformed};
  std::lock_guard<std::mutex> lock(mu_);
  auto it = correlators_.find(body_bytes(correlator));
  if (it == correlators_.end()) return {false, FailureCode::Malformed};
  if (now - it->second.createdAt > correlatorTimeout_) {
    correlators_.erase(it);
    return {false, FailureCode::Malformed};
  }
  auto ledgerIt = debitLedger_.find(it->second.key);
  if (ledgerIt == debitLedger_.end()) return {false, FailureCode::Malformed};
  if (ledgerIt->second.decimal != amount.decimal) return {false, FailureCode::Malformed};
  if (ledgerIt->second.raw < amount.raw) return {false, FailureCode::DebitExhausted};
  ledgerIt->second.raw -= amount.raw;
  correlators_.erase(it);
  return {true, FailureCode::Malformed};
}

void ClearanceCenter::correlator_gc(std::int64_t now) {
  std::lock_guard<std::mutex> lock(mu_);
  gc_locked(now);
}

void ClearanceCenter::gc_locked(std::int64_t now) {
  for (auto it = correlators_.begin(); it != correlators_.end();) {
    it = now - it->second.createdAt > correlatorTimeout_ ? correlators_.erase(it) : std::next(it);
  }
}

Bytes ClearanceCenter::save_state() const {
  std::lock_guard<std::mutex> lock(mu_);
  ClearanceStateFile f;
  f.selfId = selfId_;
  f.selfKeys = selfKeys_;
  f.orgRegistry = orgRegistry_;
  f.serverRegistry = serverRegistry_;
  f.agreements.assign(agreements_.begin(), agreements_.end());
  f.ledger.assign(debitLedger_.begin(), debitLedger_.end());
  f.correlators.assign(correlators_.begin(), correlators_.end());
  return canonical_encode(f);
}

Result<std::unique_ptr<ClearanceCenter>> ClearanceCenter::load_state(
    std::span<const std::uint8_t> data, std::uint64_t rngSeed, std::int64_t correlatorTimeout) {
  Result<ClearanceStateFile> file = canonical_decode<ClearanceStateFile>(data);
  if (!file.ok()) return file.failure();
  ClearanceStateFile& f = file.value();
  auto c = std::make_unique<ClearanceCenter>(f.selfId, std::move(f.selfKeys), rngSeed,
                                             correlatorTimeout);
  c->orgRegistry_ = std::move(f.orgRegistry);
  c->serverRegistry_ = std::move(f.serverRegistry);
  for (auto& [org, record] : f.agreements) c->agreements_.emplace(org, std::move(record));
  for (auto& [key, value] : f.ledger) c->debitLedger_.emplace(std::move(key), value);
  for (auto& [token, record] : f.correlators)
    c->correlators_.emplace(std::move(token), std::move(record));
  return c;
}

std::optional<std::int64_t> ClearanceCenter::ledger_remaining(const Enrollment& enrollment,
                                                              const Token& ticket,
                                                              std::uint32_t index) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = debitLedger_.find(LedgerKey{body_bytes(enrollment), body_bytes(ticket), index});
  if (it == debitLedger_.end()) return std::nullopt;
  return it->second.raw;
}

std::size_t ClearanceCenter::correlator_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return correlators_.size();
}

}  // namespace usher
