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

#include "usher/server.hpp"

#include <algorithm>
#include <utility>

#include "usher/simnet.hpp"

namespace usher {

void Acl::load(const std::vector<AclEntry>& entries) {
  // Whole-list replace: duplicate loads converge to the same state.
  entries_.clear();
  for (const AclEntry& entry : entries) {
    Bytes tk = body_bytes(entry.ticketToken);
    auto& slot = entries_[tk];
    slot.first = entry.ticketToken;
    for (const auto& [resource, mods] : entry.privileges) {
      Bytes rk = body_bytes(resource);
      slot.second[rk] = {resource, mods};
    }
  }
}

std::vector<Token> Acl::candidate_tickets(const Token& resource) const {
  Bytes rk = body_bytes(resource);
  std::vector<Token> out;
  for (const auto& [tk, slot] : entries_) {
    if (slot.second.count(rk) != 0) out.push_back(slot.first);
  }
  // entries_ iterates in encoded-byte order, so out is already canonical.
  return out;
}

std::optional<std::vector<Modifier>> Acl::server_modifiers(const Token& ticket,
                                                           const Token& resource) const {
  auto it = entries_.find(body_bytes(ticket));
  if (it == entries_.end()) return std::nullopt;
  auto rit = it->second.second.find(body_bytes(resource));
  if (rit == it->second.second.end()) return std::nullopt;
  return rit->second.second;
}

std::vector<AclEntry> Acl::snapshot() const {
  std::vector<AclEntry> out;
  for (const auto& [tk, slot] : entries_) {
    AclEntry entry;
    entry.ticketToken = slot.first;
    for (const auto& [rk, priv] : slot.second) entry.privileges.push_back(priv);
    out.push_back(std::move(entry));
  }
  return out;
}

bool ReplayCache::check_and_insert(const Tau& tau, std::int64_t now) {
  if (tau.timestamp < now - window_ || tau.timestamp > now + window_) return false;
  std::lock_guard<std::mutex> lock(mu_);
  evict_locked(now);
  Bytes key(tau.nonce.begin(), tau.nonce.end());
  auto [it, inserted] = seen_.emplace(std::move(key), tau.timestamp);
  (void)it;
  return inserted;
}

std::size_t ReplayCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return seen_.size();
}

void ReplayCache::evict_locked(std::int64_t now) {
  for (auto it = seen_.begin(); it != seen_.end();) {
    if (it->second < now - window_) {
      it = seen_.erase(it);
    } else {
      ++it;
    }
  }
}

ResourceServer::ResourceServer(ServerId selfId, KeyPair selfKeys, ServerId clearanceId,
                               PublicKey clearancePub, std::uint64_t rngSeed,
                               std::int64_t replayWindow)
    : selfId_(selfId),
      selfKeys_(std::move(selfKeys)),
      clearanceId_(clearanceId),
      clearancePub_(std::move(clearancePub)),
      rng_(rngSeed),
      replay_(replayWindow) {}

void ResourceServer::load_acl(const std::vector<AclEntry>& entries) {
  std::lock_guard<std::mutex> lock(aclMu_);
  acl_.load(entries);
}

std::vector<AclEntry> ResourceServer::acl_snapshot() const {
  std::lock_guard<std::mutex> lock(aclMu_);
  return acl_.snapshot();
}

void ResourceServer::add_resource(const Token& resource, ResourceHandler handler) {
  std::lock_guard<std::mutex> lock(resourceMu_);
  handlers_[body_bytes(resource)] = {resource, std::move(handler)};
}

void ResourceServer::add_counter_resource(const Token& resource) {
  auto counter = std::make_shared<std::atomic<std::int64_t>>(0);
  {
    std::lock_guard<std::mutex> lock(resourceMu_);
    counters_[body_bytes(resource)] = counter;
  }
  add_resource(resource, [counter](const ParamMap&, std::int64_t) {
    std::int64_t value = counter->fetch_add(1) + 1;
    return to_bytes(std::to_string(value));
  });
}

std::int64_t ResourceServer::counter_value(const Token& resource) const {
  std::lock_guard<std::mutex> lock(resourceMu_);
  auto it = counters_.find(body_bytes(resource));
  if (it == counters_.end()) return 0;
  return it->second->load();
}

void ResourceServer::add_echo_resource(const Token& resource) {
  add_resource(resource, [](const ParamMap& params, std::int64_t) {
    Bytes out;
    for (const auto& [k, v] : params) {
      if (!out.empty()) out.push_back('\n');
      out.insert(out.end(), k.begin(), k.end());
      out.push_back('=');
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  });
}

void ResourceServer::add_document_resource(const Token& resource, Bytes content) {
  add_resource(resource, [content = std::move(content)](const ParamMap&, std::int64_t) {
    return content;
  });
}

Bytes ResourceServer::fail(FailureCode code, const std::string& detail) const {
  return canonical_encode(FailureMessage{code, detail});
}

Bytes ResourceServer::answer_to(const PublicKey& kU, const Bytes& payload) {
  std::lock_guard<std::mutex> lock(rngMu_);
  auto sealed = build_answer(kU, payload, rng_);
  if (!sealed.ok()) return fail(FailureCode::Malformed, "answer could not be sealed");
  return canonical_encode(sealed.value());
}

Bytes ResourceServer::handle_request(const Bytes& wire, Network& net, const Uuid& requester,
                                     std::int64_t now) {
  try {
    auto env = canonical_decode<RequestEnvelope>(wire);
    if (!env.ok()) return fail(env.failure().code, env.failure().detail);

    auto parsed = parse_request(selfKeys_, env.value());
    if (!parsed.ok()) return fail(parsed.failure().code, parsed.failure().detail);
    RequestPayload request = parsed.take();

    // The stamp signature can only be checked once C echoes the user key,
    // so the replay filter runs on the decoded stamp alone. A forged stamp
    // that slips past here still dies at the binding check below.
    auto tau = canonical_decode<Tau>(request.tauSigned.payload);
    if (!tau.ok()) return fail(FailureCode::Malformed, "unreadable request stamp");
    if (!replay_.check_and_insert(tau.value(), now)) {
      return fail(FailureCode::Replay, "request stamp rejected");
    }

    std::vector<Token> candidates;
    {
      std::lock_guard<std::mutex> lock(aclMu_);
      candidates = acl_.candidate_tickets(request.resource);
    }
    // Nothing on the list could authorize this resource, so the clearance
    // center is never consulted.
    if (candidates.empty()) return fail(FailureCode::NotAuthorized, "no ticket covers resource");

    Bytes clearWire;
    {
      std::lock_guard<std::mutex> lock(rngMu_);
      auto clearReq = build_clearance_request(selfKeys_, selfId_, request.clearance,
                                              std::move(candidates), clearancePub_, rng_);
      if (!clearReq.ok()) return fail(clearReq.failure().code, clearReq.failure().detail);
      clearWire = canonical_encode(clearReq.value());
    }

    std::optional<Bytes> clearRespWire = net.call(selfId_, clearanceId_, clearWire);
    if (!clearRespWire) return fail(FailureCode::NotAuthorized, "no clearance decision");

    auto clearResp = canonical_decode<ClearanceResponse>(*clearRespWire);
    if (!clearResp.ok()) {
      // The center answers unsealed only to refuse; surface its code.
      auto refusal = canonical_decode<FailureMessage>(*clearRespWire);
      if (refusal.ok()) return fail(refusal.value().code, refusal.value().detail);
      return fail(FailureCode::Malformed, "unreadable clearance decision");
    }
    auto decision = parse_clearance_response(selfKeys_, clearancePub_, clearResp.value());
    if (!decision.ok()) return fail(decision.failure().code, decision.failure().detail);

    if (const auto* denied = std::get_if<ClearanceDenied>(&decision.value().v)) {
      return fail(denied->code, denied->detail);
    }
    const ClearanceGranted& granted = std::get<ClearanceGranted>(decision.value().v);

    // The stamp must be signed by the key the certificate vouched for.
    if (!crypto_verify(granted.kUEcho, request.tauSigned)) {
      return fail(FailureCode::BadSignature, "stamp not bound to cleared key");
    }

    std::optional<std::vector<Modifier>> serverMods;
    {
      std::lock_guard<std::mutex> lock(aclMu_);
      serverMods = acl_.server_modifiers(granted.ticket.token, request.resource);
    }
    // C picks from the candidate set we sent, so a miss here means the ACL
    // changed mid-flight; deny rather than trust the stale grant.
    if (!serverMods) return fail(FailureCode::NotAuthorized, "ticket no longer covers resource");

    std::vector<Modifier> allMods = granted.effectiveModifiers;
    allMods.insert(allMods.end(), serverMods->begin(), serverMods->end());

    EvalContext ctx{now, request.params, false};
    Verdict verdict = eval_modifier_set(ModifierSet{allMods}, ctx);
    if (verdict == Verdict::Fail) return fail(FailureCode::ModifierDenied, "constraint not met");

    if (verdict == Verdict::NeedsConfirmation) {
      const DebitModifier* pending = nullptr;
      for (const Modifier& m : allMods) {
        if (const DebitModifier* d = m.debit(); d != nullptr && d->requiresConfirmation) {
          pending = d;
          break;
        }
      }
      if (pending == nullptr) return fail(FailureCode::ConfirmRequired, "confirmation unavailable");

      DebitAmount unitCharge{pending->remaining.decimal, pending->remaining.unit_raw()};
      ConfirmAskPayload ask;
      ask.unit = pending->unit;
      ask.amountText = unitCharge.format();
      ask.description = pending->description;
      Bytes askWire;
      {
        std::lock_guard<std::mutex> lock(rngMu_);
        rng_.fill(ask.askId);
        auto askMsg = build_confirm_ask(granted.kUEcho, ask, rng_);
        if (!askMsg.ok()) return fail(askMsg.failure().code, askMsg.failure().detail);
        askWire = canonical_encode(askMsg.value());
      }

      std::optional<Bytes> replyWire = net.call(selfId_, requester, askWire);
      bool approved = false;
      if (replyWire) {
        auto replyMsg = canonical_decode<ConfirmReply>(*replyWire);
        if (replyMsg.ok()) {
          auto reply = open_confirm_reply(selfKeys_, replyMsg.value());
          // The echoed ask id proves the reply came from whoever opened
          // the sealed ask; anything else counts as a decline.
          approved = reply.ok() && reply.value().askId == ask.askId && reply.value().approved;
        }
      }
      if (!approved) return fail(FailureCode::ConfirmRequired, "debit not confirmed");

      ctx.confirmGranted = true;
      if (eval_modifier_set(ModifierSet{allMods}, ctx) != Verdict::Pass) {
        return fail(FailureCode::ModifierDenied, "constraint not met");
      }
    }

    if (granted.debitCorrelator) {
      const DebitModifier* charged = nullptr;
      for (const Modifier& m : granted.effectiveModifiers) {
        if (const DebitModifier* d = m.debit()) {
          charged = d;
          break;
        }
      }
      // A correlator without a matching debit in the grant is a malformed
      // decision; refuse instead of committing blind.
      if (charged == nullptr) return fail(FailureCode::NotAuthorized, "debit shape mismatch");

      DebitCommitPayload charge;
      charge.serverId = selfId_;
      charge.correlator = *granted.debitCorrelator;
      charge.amount = DebitAmount{charged->remaining.decimal, charged->remaining.unit_raw()};
      Bytes commitWire;
      {
        std::lock_guard<std::mutex> lock(rngMu_);
        auto commit = build_debit_commit(selfKeys_, charge, clearancePub_, rng_);
        if (!commit.ok()) return fail(commit.failure().code, commit.failure().detail);
        commitWire = canonical_encode(commit.value());
      }

      std::optional<Bytes> resultWire = net.exchange(selfId_, clearanceId_, commitWire);
      if (!resultWire) return fail(FailureCode::NotAuthorized, "no debit decision");
      auto resultMsg = canonical_decode<DebitResult>(*resultWire);
      if (!resultMsg.ok()) return fail(FailureCode::Malformed, "unreadable debit decision");
      auto result = parse_debit_result(selfKeys_, clearancePub_, resultMsg.value());
      if (!result.ok()) return fail(result.failure().code, result.failure().detail);
      if (!result.value().proceed) return fail(result.value().code, result.value().detail);
    }

    std::pair<Token, ResourceHandler> handler;
    {
      std::lock_guard<std::mutex> lock(resourceMu_);
      auto it = handlers_.find(body_bytes(request.resource));
      if (it == handlers_.end()) {
        return fail(FailureCode::NotAuthorized, "resource has no handler");
      }
      handler = it->second;
    }
    Bytes payload = handler.second(request.params, now);
    return answer_to(granted.kUEcho, payload);
  } catch (const std::exception&) {
    return fail(FailureCode::Malformed, "request processing failed");
  }
}

}  // namespace usher
