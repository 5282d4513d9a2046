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

#include "usher/attacks.hpp"

#include <memory>
#include <stdexcept>
#include <utility>

#include "usher/agents.hpp"
#include "usher/clearance.hpp"
#include "usher/server.hpp"
#include "usher/simnet.hpp"

namespace usher {

namespace {

template <typename T>
T must(Result<T> r, const char* what) {
  if (!r.ok()) throw std::runtime_error(std::string(what) + ": " + r.failure().detail);
  return r.take();
}

// One clearance center, one org with a standing agreement, one server
// with a counter resource, one honest user. Every drill starts here.
struct DrillWorld {
  SimClock clock;
  Network net;
  DetRng rng;
  std::unique_ptr<ClearanceCenter> clearance;
  std::unique_ptr<OrgAdmin> org;
  std::unique_ptr<OrgAdmin> rival;
  std::unique_ptr<ProducerAdmin> producer;
  std::unique_ptr<ResourceServer> server;
  std::unique_ptr<UserAgent> user;
  Token counter;
  Token ticket;

  DrillWorld(std::uint8_t scheme, std::uint64_t seed) : clock(1000000), net(clock), rng(seed) {
    Uuid ccId = rng.uuid();
    clearance = std::make_unique<ClearanceCenter>(
        ccId, must(crypto_gen(scheme, false, rng), "clearance keys"), rng.next_u64());
    producer = std::make_unique<ProducerAdmin>(clearance.get());
    net.register_endpoint(ccId, [this](const Uuid&, const Bytes& wire) {
      return clearance->handle(wire, clock.now());
    });

    org = std::make_unique<OrgAdmin>(rng.uuid(), must(crypto_gen(scheme, false, rng), "org keys"));
    org->add_member("user", {"staff"});
    rival = std::make_unique<OrgAdmin>(rng.uuid(),
                                       must(crypto_gen(scheme, false, rng), "rival keys"));
    rival->add_member("mallory", {"staff"});

    Uuid srvId = rng.uuid();
    KeyPair srvKeys = must(crypto_gen(scheme, false, rng), "server keys");
    server = std::make_unique<ResourceServer>(srvId, srvKeys, ccId, clearance->public_key(),
                                              rng.next_u64());
    counter = Token{srvId, to_bytes("hits"), "hits"};
    ticket = Token{ccId, to_bytes("reader"), "reader"};
    server->add_counter_resource(counter);
    server->load_acl({AclEntry{ticket, {{counter, {}}}}});
    producer->register_server(srvId, server->public_key());
    net.register_endpoint(srvId, [this](const Uuid& caller, const Bytes& wire) {
      return server->handle_request(wire, net, caller, clock.now());
    });

    producer->negotiate_agreement(*org, staff_agreement(*org, ticket));
    // The rival org holds an agreement too, just for a ticket no server
    // honors, so cross-org splices face a live registration, not a 404.
    Token lobby{ccId, to_bytes("lobby"), "lobby"};
    producer->negotiate_agreement(*rival, staff_agreement(*rival, lobby));

    user = std::make_unique<UserAgent>(rng.uuid(), scheme, rng.next_u64());
    user->bind_org(org.get(), "user");
    Status enrolled = user->refresh_enrollments(org->id(), clock.now());
    if (!enrolled.ok()) throw std::runtime_error("drill world enrollment failed");
    user->learn_server(srvId, server->public_key(), ccId, clearance->public_key());
    user->attach(net);
  }

  static ServiceAgreement staff_agreement(const OrgAdmin& owner, const Token& ticketToken) {
    ServiceAgreement agreement;
    agreement.consumerOrg = owner.id();
    Enrollment staff{owner.group_token("staff"), owner.id(), to_bytes("staff")};
    TicketGrant grant;
    grant.ticket.token = ticketToken;
    agreement.grants.push_back({std::move(staff), {std::move(grant)}});
    return agreement;
  }

  bool honest_request() {
    auto r = user->request_service(net, server->id(), counter, {}, clock.now());
    return r.ok();
  }
};

}  // namespace

ReplayDrillReport run_replay_drills(std::uint8_t scheme, std::uint64_t seed, int schedules) {
  ReplayDrillReport report;
  DetRng top(seed);
  for (int s = 0; s < schedules; ++s) {
    DrillWorld w(scheme, top.next_u64());
    int honest = 2 + static_cast<int>(w.rng.below(5));
    bool honestBroke = false;
    for (int i = 0; i < honest; ++i) {
      if (!w.honest_request()) honestBroke = true;
      int burst = static_cast<int>(w.rng.below(4));
      for (int b = 0; b < burst; ++b) {
        w.net.adversary_replay(w.rng.below(w.net.next_seq()));
        ++report.injections;
      }
      if (w.rng.below(3) == 0) {
        // Sometimes jump past the replay window so eviction paths run too.
        w.clock.advance(static_cast<std::int64_t>(w.rng.below(400)));
      }
    }
    int tail = static_cast<int>(w.rng.below(6));
    for (int b = 0; b < tail; ++b) {
      w.net.adversary_replay(w.rng.below(w.net.next_seq()));
      ++report.injections;
    }
    ++report.schedules;
    report.honestRequests += honest;
    if (honestBroke || w.server->counter_value(w.counter) != honest) ++report.violations;
  }
  return report;
}

TamperDrillReport run_tamper_drills(std::uint8_t scheme, std::uint64_t seed, int attempts) {
  TamperDrillReport report;
  DrillWorld w(scheme, seed);
  const int honest = 4;
  for (int i = 0; i < honest; ++i) {
    if (!w.honest_request()) return report;  // zero attempts reads as not harmless
  }
  std::int64_t baseline = w.server->counter_value(w.counter);

  for (int i = 0; i < attempts; ++i) {
    std::uint64_t target = w.rng.below(w.net.next_seq());
    const TranscriptEntry& entry = w.net.transcript()[target];
    if (entry.bytes.empty()) continue;
    std::uint32_t byteIndex = static_cast<std::uint32_t>(w.rng.below(entry.bytes.size()));
    std::uint8_t mutated = static_cast<std::uint8_t>(w.rng.below(256));
    if (mutated == entry.bytes[byteIndex]) mutated ^= 0x01;
    auto reply = w.net.adversary_tamper(target, byteIndex, mutated);
    ++report.attempts;
    if (reply) {
      auto tag = peek_tag(*reply);
      if (tag.ok() && tag.value() == Tag::Answer) ++report.answers;
    }
  }
  report.counterDrift = w.server->counter_value(w.counter) - baseline;
  return report;
}

Result<SignedBlob> forge_claim(const KeyPair& signer, const Uuid& orgId,
                               const EnrollmentCertificate& cert) {
  ClearanceClaimPayload claim{orgId, cert};
  return crypto_sign(signer, canonical_encode(claim));
}

Result<SealedBlob> forge_blob(const PublicKey& outerKey, const SignedBlob& claim,
                              const PublicKey& clearancePub, DetRng& rng) {
  ClearanceBlobPayload payload{outerKey, claim};
  return crypto_seal(clearancePub, canonical_encode(payload), rng);
}

Result<Bytes> forge_request(const SignedBlob& tauSigned, const Token& resource,
                            const SealedBlob& blob, const PublicKey& serverPub, DetRng& rng) {
  RequestPayload payload;
  payload.tauSigned = tauSigned;
  payload.resource = resource;
  payload.clearance = blob;
  auto sealed = crypto_seal(serverPub, canonical_encode(payload), rng);
  if (!sealed.ok()) return sealed.failure();
  return canonical_encode(RequestEnvelope{sealed.take()});
}

namespace {

// Maps a raw server reply onto (outcome text, counts as denial).
TheftAttempt classify_theft(std::string recipe, const std::optional<Bytes>& reply) {
  TheftAttempt a;
  a.recipe = std::move(recipe);
  if (!reply) {
    a.outcome = "none";
    a.denied = true;
    return a;
  }
  auto failure = canonical_decode<FailureMessage>(*reply);
  if (failure.ok()) {
    a.outcome = std::string(failure_code_name(failure.value().code));
    a.denied = true;
    return a;
  }
  auto tag = peek_tag(*reply);
  a.outcome = tag.ok() && tag.value() == Tag::Answer ? "answer" : "reply";
  a.denied = false;
  return a;
}

}  // namespace

TheftDrillReport run_theft_drills(std::uint8_t scheme, std::uint64_t seed, int rounds) {
  TheftDrillReport report;
  DrillWorld w(scheme, seed);
  Uuid serverId = w.server->id();
  PublicKey serverPub = w.server->public_key();
  PublicKey clearancePub = w.clearance->public_key();

  // The victim acts without a UserAgent so the drill holds her raw
  // materials, playing the strongest thief: certificate, clearance blob,
  // and a used request stamp all leak. Only the private key does not.
  w.org->add_member("victim", {"staff"});
  KeyPair victimKey = must(crypto_gen(scheme, true, w.rng), "victim keys");
  auto issued = must(w.org->issue_enrollment("victim", victimKey.pub(), w.clock.now()),
                     "victim certificate");
  KeyPair thiefKey = must(crypto_gen(scheme, true, w.rng), "thief keys");

  Uuid thiefId = w.rng.uuid();
  w.net.register_endpoint(thiefId, [](const Uuid&, const Bytes&) {
    return canonical_encode(FailureMessage{FailureCode::NotAuthorized, "unexpected delivery"});
  });

  auto send = [&](const std::string& recipe, Result<Bytes> wire) {
    if (!wire.ok()) {
      TheftAttempt a;
      a.recipe = recipe;
      a.outcome = "error: " + wire.failure().detail;
      report.attempts.push_back(std::move(a));
      return;
    }
    auto reply = w.net.call(thiefId, serverId, wire.value());
    report.attempts.push_back(classify_theft(recipe, reply));
  };

  // Baseline: the victim's own request must succeed, and its stamp is
  // what recipe three later replays.
  SignedBlob victimClaim =
      must(forge_claim(victimKey, w.org->id(), issued.certificate), "victim claim");
  SealedBlob victimBlob =
      must(forge_blob(victimKey.pub(), victimClaim, clearancePub, w.rng), "victim blob");
  Tau baselineTau = build_tau(w.clock.now(), w.rng);
  SignedBlob baselineStamp =
      must(crypto_sign(victimKey, canonical_encode(baselineTau)), "victim stamp");
  Bytes baselineWire = must(
      forge_request(baselineStamp, w.counter, victimBlob, serverPub, w.rng), "victim request");
  auto baselineReply = w.net.call(thiefId, serverId, baselineWire);
  TheftAttempt baseline = classify_theft("victim-baseline", baselineReply);
  if (baseline.outcome != "answer") {
    // A broken world must fail the drill, not mask it behind denials.
    baseline.denied = false;
    report.attempts.push_back(std::move(baseline));
    return report;
  }

  for (int round = 0; round < rounds; ++round) {
    auto thief_stamp = [&]() {
      Tau tau = build_tau(w.clock.now(), w.rng);
      return must(crypto_sign(thiefKey, canonical_encode(tau)), "thief stamp");
    };

    // Stolen certificate presented under the thief's own ephemeral key.
    {
      RequestInputs in;
      in.ephemeral = &thiefKey;
      in.certificate = &issued.certificate;
      in.org = w.org->id();
      in.serverPub = serverPub;
      in.clearancePub = clearancePub;
      in.resource = w.counter;
      in.now = w.clock.now();
      auto env = build_request(in, w.rng);
      if (env.ok()) {
        send("foreign-ephemeral-signature", canonical_encode(env.value()));
      } else {
        send("foreign-ephemeral-signature", env.failure());
      }
    }

    // Intact stolen blob: clearance succeeds and echoes the victim's
    // key, which the thief's stamp cannot match.
    send("swapped-key-echo",
         forge_request(thief_stamp(), w.counter, victimBlob, serverPub, w.rng));

    // Stolen blob plus the victim's already spent stamp.
    send("stolen-stamp-replay",
         forge_request(baselineStamp, w.counter, victimBlob, serverPub, w.rng));

    // Blob re-sealed around the thief's key with the victim's claim.
    {
      auto blob = forge_blob(thiefKey.pub(), victimClaim, clearancePub, w.rng);
      if (blob.ok()) {
        send("re-sealed-blob",
             forge_request(thief_stamp(), w.counter, blob.take(), serverPub, w.rng));
      } else {
        send("re-sealed-blob", blob.failure());
      }
    }

    // Victim certificate re-claimed under the thief's own org.
    {
      auto claim = forge_claim(thiefKey, w.rival->id(), issued.certificate);
      auto blob = claim.ok()
                      ? forge_blob(thiefKey.pub(), claim.take(), clearancePub, w.rng)
                      : Result<SealedBlob>(claim.failure());
      if (blob.ok()) {
        send("cross-org-splice",
             forge_request(thief_stamp(), w.counter, blob.take(), serverPub, w.rng));
      } else {
        send("cross-org-splice", blob.failure());
      }
    }
  }

  for (const TheftAttempt& a : report.attempts) {
    if (a.denied) ++report.denied;
  }
  return report;
}

}  // namespace usher
