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

// Clearance center decision pipeline: the authentication chain from blob
// to certificate, agreement lookup, modifier walk, the debit ledger, and
// state persistence. Each refusal code is produced by one minimal
// mutation of a known-good request.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/clearance.hpp"
#include "usher/crypto.hpp"
#include "usher/messages.hpp"
#include "usher/tokens.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace usher;

namespace {

// A complete one-org, one-server deployment around a center, with knobs
// for the parts each test mutates.
struct Rig {
  DetRng rng;
  std::uint8_t scheme;
  Uuid orgId;
  Uuid serverId;
  KeyPair orgKeys;
  KeyPair serverKeys;
  KeyPair userKeys;
  ClearanceCenter center;
  Enrollment staff;
  Token ticketToken;

  explicit Rig(std::uint8_t scheme_, std::uint64_t seed,
               std::vector<Modifier> grantMods = {},
               std::vector<Modifier> ticketMods = {})
      : rng(seed),
        scheme(scheme_),
        orgId(rng.uuid()),
        serverId(rng.uuid()),
        orgKeys(crypto_gen(scheme_, false, rng).take()),
        serverKeys(crypto_gen(scheme_, false, rng).take()),
        userKeys(crypto_gen(scheme_, true, rng).take()),
        center(rng.uuid(), crypto_gen(scheme_, false, rng).take(), seed ^ 1) {
    Bytes g = to_bytes("staff");
    staff = Enrollment{Token{orgId, g, ""}, orgId, g};
    ticketToken = Token{center.id(), to_bytes("reader"), ""};

    ServiceAgreement ag;
    ag.consumerOrg = orgId;
    ag.grants = {{staff,
                  {TicketGrant{Ticket{ticketToken, std::move(ticketMods)},
                               std::move(grantMods)}}}};
    ag.normalize();
    center.register_agreement(orgId, orgKeys.pub(), ImplicationMap{}, ag);
    center.register_server(serverId, serverKeys.pub());
  }

  EnrollmentCertificate certificate(std::int64_t expiry,
                                    const KeyPair* signer = nullptr,
                                    const PublicKey* kU = nullptr) {
    auto cert = build_certificate(signer ? *signer : orgKeys,
                                  kU ? *kU : userKeys.pub(), {staff}, expiry);
    REQUIRE(cert.ok());
    return cert.take();
  }

  SignedBlob claim(const EnrollmentCertificate& cert, const Uuid& org,
                   const KeyPair* signer = nullptr) {
    ClearanceClaimPayload payload{org, cert};
    auto sig = crypto_sign(signer ? *signer : userKeys, canonical_encode(payload));
    REQUIRE(sig.ok());
    return sig.take();
  }

  SealedBlob blob(const SignedBlob& claimSig, const PublicKey* kU = nullptr) {
    ClearanceBlobPayload payload{kU ? *kU : userKeys.pub(), claimSig};
    auto sealed = crypto_seal(center.public_key(), canonical_encode(payload), rng);
    REQUIRE(sealed.ok());
    return sealed.take();
  }

  ClearanceRequestPayload request(std::int64_t expiry = 1000000) {
    ClearanceRequestPayload req;
    req.serverId = serverId;
    req.blob = blob(claim(certificate(expiry), orgId));
    req.candidates = {ticketToken};
    return req;
  }
};

ClearanceDenied denial(const ClearanceDecisionPayload& d) {
  const auto* den = std::get_if<ClearanceDenied>(&d.v);
  REQUIRE(den != nullptr);
  return *den;
}

ClearanceGranted grant(const ClearanceDecisionPayload& d) {
  const auto* g = std::get_if<ClearanceGranted>(&d.v);
  REQUIRE(g != nullptr);
  return *g;
}

const std::uint8_t kSchemes[] = {kSchemeReal, kSchemeMarker};

}  // namespace

TEST_CASE("a well-formed request is granted with the composed modifiers") {
  for (std::uint8_t scheme : kSchemes) {
    CAPTURE(scheme);
    Rig rig(scheme, 10 + scheme, {time_window(0, 2000000)},
            {time_of_day(0, 1439)});
    auto decision = rig.center.decide(rig.request(), 500);
    const ClearanceGranted& g = grant(decision);
    CHECK(g.ticket.token == rig.ticketToken);
    CHECK(g.kUEcho == rig.userKeys.pub());
    CHECK(!g.debitCorrelator.has_value());
    // Grant-edge layer first, ticket layer second.
    REQUIRE(g.effectiveModifiers.size() == 2);
    CHECK(canonical_encode(g.effectiveModifiers[0]) ==
          canonical_encode(time_window(0, 2000000)));
    CHECK(canonical_encode(g.effectiveModifiers[1]) ==
          canonical_encode(time_of_day(0, 1439)));
  }
}

TEST_CASE("each refusal code has a single witnessing mutation") {
  Rig rig(kSchemeMarker, 20);

  SUBCASE("baseline grants") {
    CHECK(grant(rig.center.decide(rig.request(), 100)).kUEcho ==
          rig.userKeys.pub());
  }

  SUBCASE("garbage blob") {
    ClearanceRequestPayload req = rig.request();
    req.blob = SealedBlob{to_bytes("not a seal"), std::nullopt};
    auto d = rig.center.decide(req, 100);
    CHECK(denial(d).code == FailureCode::Malformed);
    CHECK(denial(d).detail == "clearance blob did not open");
  }

  SUBCASE("blob sealed to someone else") {
    ClearanceRequestPayload req = rig.request();
    auto sealed = crypto_seal(rig.serverKeys.pub(),
                              to_bytes("wrong recipient"), rig.rng);
    REQUIRE(sealed.ok());
    req.blob = sealed.take();
    CHECK(denial(rig.center.decide(req, 100)).code == FailureCode::Malformed);
  }

  SUBCASE("claim signed by a key other than the blob's") {
    KeyPair otherUser = crypto_gen(kSchemeMarker, true, rig.rng).take();
    ClearanceRequestPayload req = rig.request();
    // Certificate still names the honest user; only the claim signer lies.
    req.blob = rig.blob(rig.claim(rig.certificate(1000000), rig.orgId, &otherUser));
    auto d = rig.center.decide(req, 100);
    CHECK(denial(d).code == FailureCode::BadSignature);
    CHECK(denial(d).detail == "ephemeral signature");
  }

  SUBCASE("unknown org") {
    Uuid stranger = rig.rng.uuid();
    ClearanceRequestPayload req = rig.request();
    req.blob = rig.blob(rig.claim(rig.certificate(1000000), stranger));
    CHECK(denial(rig.center.decide(req, 100)).code == FailureCode::UnknownOrg);
  }

  SUBCASE("certificate signed by an impostor org key") {
    KeyPair impostor = crypto_gen(kSchemeMarker, false, rig.rng).take();
    ClearanceRequestPayload req = rig.request();
    req.blob = rig.blob(
        rig.claim(rig.certificate(1000000, &impostor), rig.orgId));
    CHECK(denial(rig.center.decide(req, 100)).code == FailureCode::BadSignature);
  }

  SUBCASE("certificate bound to a different ephemeral key") {
    KeyPair otherUser = crypto_gen(kSchemeMarker, true, rig.rng).take();
    PublicKey otherPub = otherUser.pub();
    ClearanceRequestPayload req = rig.request();
    // Blob and claim belong to the honest user, but the org certified the
    // other key: the cert-to-blob key binding must catch it.
    EnrollmentCertificate cert = rig.certificate(1000000, nullptr, &otherPub);
    req.blob = rig.blob(rig.claim(cert, rig.orgId));
    auto d = rig.center.decide(req, 100);
    CHECK(denial(d).code == FailureCode::BadSignature);
    CHECK(denial(d).detail == "ephemeral key binding");
  }

  SUBCASE("expiry is inclusive") {
    CHECK(grant(rig.center.decide(rig.request(500), 500)).kUEcho ==
          rig.userKeys.pub());
    CHECK(denial(rig.center.decide(rig.request(500), 501)).code ==
          FailureCode::Expired);
  }

  SUBCASE("no grant covers the candidates") {
    ClearanceRequestPayload req = rig.request();
    req.candidates = {Token{rig.center.id(), to_bytes("other"), ""}};
    auto d = rig.center.decide(req, 100);
    CHECK(denial(d).code == FailureCode::NotAuthorized);
    CHECK(denial(d).detail == "no grant covers the candidates");
  }

  SUBCASE("empty candidate list") {
    ClearanceRequestPayload req = rig.request();
    req.candidates.clear();
    CHECK(denial(rig.center.decide(req, 100)).code == FailureCode::NotAuthorized);
  }
}

TEST_CASE("time modifiers refuse at the center with ModifierDenied") {
  Rig rig(kSchemeMarker, 30, {time_window(1000, 2000)});
  CHECK(grant(rig.center.decide(rig.request(), 1500)).kUEcho ==
        rig.userKeys.pub());
  auto d = rig.center.decide(rig.request(), 2500);
  CHECK(denial(d).code == FailureCode::ModifierDenied);
}

TEST_CASE("param constraints are not judged at the center") {
  // The center never sees request parameters, so a parameter constraint
  // alone cannot refuse clearance; it rides through for the server.
  Rig rig(kSchemeMarker, 40, {param_constraint("mode", {to_bytes("read")})});
  const ClearanceGranted& g = grant(rig.center.decide(rig.request(), 100));
  REQUIRE(g.effectiveModifiers.size() == 1);
  CHECK(canonical_encode(g.effectiveModifiers[0]) ==
        canonical_encode(param_constraint("mode", {to_bytes("read")})));
}

TEST_CASE("debit grants carry a correlator and report the live balance") {
  Rig rig(kSchemeMarker, 50,
          {debit(DebitAmount::integer(3), "uses", false, "metered")});

  const ClearanceGranted& g1 = grant(rig.center.decide(rig.request(), 100));
  REQUIRE(g1.debitCorrelator.has_value());
  CHECK(g1.debitCorrelator->creator == rig.center.id());
  REQUIRE(g1.effectiveModifiers.size() == 1);
  CHECK(g1.effectiveModifiers[0].debit()->remaining.raw == 3);
  CHECK(rig.center.correlator_count() == 1);

  auto commit = rig.center.debit_commit(*g1.debitCorrelator,
                                        DebitAmount::integer(1), 110);
  CHECK(commit.proceed);
  CHECK(rig.center.correlator_count() == 0);
  CHECK(rig.center.ledger_remaining(rig.staff, rig.ticketToken, 0) == 2);

  // The next clearance reports the decremented balance, not the
  // agreement's starting value.
  const ClearanceGranted& g2 = grant(rig.center.decide(rig.request(), 120));
  CHECK(g2.effectiveModifiers[0].debit()->remaining.raw == 2);
  REQUIRE(g2.debitCorrelator.has_value());
  CHECK(body_bytes(*g2.debitCorrelator) != body_bytes(*g1.debitCorrelator));
}

TEST_CASE("commit edge cases") {
  Rig rig(kSchemeMarker, 60,
          {debit(DebitAmount::integer(1), "uses", false, "")});
  Token corr = *grant(rig.center.decide(rig.request(), 100)).debitCorrelator;

  SUBCASE("zero and negative amounts are malformed") {
    CHECK(rig.center.debit_commit(corr, DebitAmount::integer(0), 101).code ==
          FailureCode::Malformed);
    CHECK(!rig.center.debit_commit(corr, DebitAmount::integer(0), 101).proceed);
    CHECK(rig.center.debit_commit(corr, DebitAmount{false, -5}, 101).code ==
          FailureCode::Malformed);
    // The failed attempts consumed nothing.
    CHECK(rig.center.correlator_count() == 1);
    CHECK(rig.center.debit_commit(corr, DebitAmount::integer(1), 102).proceed);
  }

  SUBCASE("a correlator works exactly once") {
    CHECK(rig.center.debit_commit(corr, DebitAmount::integer(1), 101).proceed);
    auto again = rig.center.debit_commit(corr, DebitAmount::integer(1), 102);
    CHECK(!again.proceed);
    CHECK(again.code == FailureCode::Malformed);
  }

  SUBCASE("unknown correlator") {
    Token fake{rig.center.id(), to_bytes("fabricated"), ""};
    CHECK(rig.center.debit_commit(fake, DebitAmount::integer(1), 101).code ==
          FailureCode::Malformed);
  }

  SUBCASE("insufficient funds decline but keep the correlator") {
    auto big = rig.center.debit_commit(corr, DebitAmount::integer(5), 101);
    CHECK(!big.proceed);
    CHECK(big.code == FailureCode::DebitExhausted);
    CHECK(rig.center.ledger_remaining(rig.staff, rig.ticketToken, 0) == 1);
    CHECK(rig.center.correlator_count() == 1);
    // A later, affordable commit on the same correlator still works.
    CHECK(rig.center.debit_commit(corr, DebitAmount::integer(1), 102).proceed);
  }

  SUBCASE("decimal and integer budgets do not mix") {
    CHECK(rig.center.debit_commit(corr, DebitAmount::fixed(10000), 101).code ==
          FailureCode::Malformed);
    CHECK(rig.center.ledger_remaining(rig.staff, rig.ticketToken, 0) == 1);
  }
}

TEST_CASE("exhausted budgets refuse at decision time") {
  Rig rig(kSchemeMarker, 70,
          {debit(DebitAmount::integer(1), "uses", false, "")});
  Token corr = *grant(rig.center.decide(rig.request(), 100)).debitCorrelator;
  CHECK(rig.center.debit_commit(corr, DebitAmount::integer(1), 101).proceed);
  CHECK(rig.center.ledger_remaining(rig.staff, rig.ticketToken, 0) == 0);

  auto d = rig.center.decide(rig.request(), 102);
  CHECK(denial(d).code == FailureCode::DebitExhausted);
  CHECK(denial(d).detail == "budget exhausted");
}

TEST_CASE("correlators expire after the timeout") {
  Rig rig(kSchemeMarker, 80,
          {debit(DebitAmount::integer(5), "uses", false, "")});
  Token corr = *grant(rig.center.decide(rig.request(), 100)).debitCorrelator;

  SUBCASE("commit just inside the window proceeds") {
    CHECK(rig.center.debit_commit(corr, DebitAmount::integer(1), 220).proceed);
  }

  SUBCASE("commit past the window is refused and the correlator dies") {
    auto late = rig.center.debit_commit(corr, DebitAmount::integer(1), 221);
    CHECK(!late.proceed);
    CHECK(late.code == FailureCode::Malformed);
    CHECK(rig.center.correlator_count() == 0);
    CHECK(rig.center.ledger_remaining(rig.staff, rig.ticketToken, 0) == 5);
  }

  SUBCASE("gc sweeps stale correlators") {
    rig.center.correlator_gc(220);
    CHECK(rig.center.correlator_count() == 1);
    rig.center.correlator_gc(221);
    CHECK(rig.center.correlator_count() == 0);
  }
}

TEST_CASE("budgets key on enrollment, so rotation does not refill them") {
  Rig rig(kSchemeMarker, 90,
          {debit(DebitAmount::integer(2), "uses", false, "")});
  Token corr = *grant(rig.center.decide(rig.request(), 100)).debitCorrelator;
  CHECK(rig.center.debit_commit(corr, DebitAmount::integer(1), 101).proceed);

  // A fresh ephemeral key for the same enrollment sees the same budget.
  rig.userKeys = crypto_gen(kSchemeMarker, true, rig.rng).take();
  const ClearanceGranted& g = grant(rig.center.decide(rig.request(), 102));
  CHECK(g.effectiveModifiers[0].debit()->remaining.raw == 1);
}

TEST_CASE("re-registering an agreement resets that org's budgets") {
  Rig rig(kSchemeMarker, 100,
          {debit(DebitAmount::integer(2), "uses", false, "")});
  Token corr = *grant(rig.center.decide(rig.request(), 100)).debitCorrelator;
  CHECK(rig.center.debit_commit(corr, DebitAmount::integer(2), 101).proceed);
  CHECK(denial(rig.center.decide(rig.request(), 102)).code ==
        FailureCode::DebitExhausted);

  ServiceAgreement ag;
  ag.consumerOrg = rig.orgId;
  ag.grants = {{rig.staff,
                {TicketGrant{Ticket{rig.ticketToken, {}},
                             {debit(DebitAmount::integer(2), "uses", false, "")}}}}};
  ag.normalize();
  rig.center.register_agreement(rig.orgId, rig.orgKeys.pub(), ImplicationMap{}, ag);

  const ClearanceGranted& g = grant(rig.center.decide(rig.request(), 103));
  CHECK(g.effectiveModifiers[0].debit()->remaining.raw == 2);
}

TEST_CASE("removing the grant or the agreement revokes immediately") {
  Rig rig(kSchemeMarker, 110);
  CHECK(grant(rig.center.decide(rig.request(), 100)).kUEcho ==
        rig.userKeys.pub());

  SUBCASE("empty agreement") {
    ServiceAgreement bare;
    bare.consumerOrg = rig.orgId;
    rig.center.register_agreement(rig.orgId, rig.orgKeys.pub(),
                                  ImplicationMap{}, bare);
    CHECK(denial(rig.center.decide(rig.request(), 101)).code ==
          FailureCode::NotAuthorized);
  }

  SUBCASE("agreement re-keyed to a different enrollment") {
    Bytes other = to_bytes("contractors");
    Enrollment contractors{Token{rig.orgId, other, ""}, rig.orgId, other};
    ServiceAgreement ag;
    ag.consumerOrg = rig.orgId;
    ag.grants = {{contractors, {TicketGrant{Ticket{rig.ticketToken, {}}, {}}}}};
    ag.normalize();
    rig.center.register_agreement(rig.orgId, rig.orgKeys.pub(),
                                  ImplicationMap{}, ag);
    CHECK(denial(rig.center.decide(rig.request(), 101)).code ==
          FailureCode::NotAuthorized);
  }
}

TEST_CASE("orgs are isolated from each other") {
  // Two orgs, same group name, one shared center. Org B never gets an
  // agreement, so its certificates fail even though the bytes of its
  // group name match org A's.
  DetRng rng(120);
  Rig rigA(kSchemeMarker, 121);

  Uuid orgB = rng.uuid();
  KeyPair orgBKeys = crypto_gen(kSchemeMarker, false, rng).take();
  KeyPair userB = crypto_gen(kSchemeMarker, true, rng).take();
  Bytes g = to_bytes("staff");
  Enrollment staffB{Token{orgB, g, ""}, orgB, g};

  auto certB = build_certificate(orgBKeys, userB.pub(), {staffB}, 1000000);
  REQUIRE(certB.ok());
  ClearanceClaimPayload claimPayload{orgB, certB.value()};
  auto claimSig = crypto_sign(userB, canonical_encode(claimPayload));
  REQUIRE(claimSig.ok());
  ClearanceBlobPayload blobPayload{userB.pub(), claimSig.take()};
  auto blob = crypto_seal(rigA.center.public_key(),
                          canonical_encode(blobPayload), rng);
  REQUIRE(blob.ok());

  ClearanceRequestPayload req;
  req.serverId = rigA.serverId;
  req.blob = blob.take();
  req.candidates = {rigA.ticketToken};
  CHECK(denial(rigA.center.decide(req, 100)).code == FailureCode::UnknownOrg);
}

TEST_CASE("state survives a save/load round trip") {
  Rig rig(kSchemeMarker, 130,
          {debit(DebitAmount::integer(4), "uses", false, "")});
  Token corr = *grant(rig.center.decide(rig.request(), 100)).debitCorrelator;
  CHECK(rig.center.debit_commit(corr, DebitAmount::integer(1), 101).proceed);
  Token pending = *grant(rig.center.decide(rig.request(), 102)).debitCorrelator;

  Bytes saved = rig.center.save_state();
  auto loaded = ClearanceCenter::load_state(saved, 999);
  REQUIRE(loaded.ok());
  ClearanceCenter& c2 = *loaded.value();

  CHECK(c2.id() == rig.center.id());
  CHECK(c2.public_key() == rig.center.public_key());
  CHECK(c2.ledger_remaining(rig.staff, rig.ticketToken, 0) == 3);
  CHECK(c2.correlator_count() == 1);

  // The outstanding correlator commits against the reloaded ledger.
  CHECK(c2.debit_commit(pending, DebitAmount::integer(1), 103).proceed);
  CHECK(c2.ledger_remaining(rig.staff, rig.ticketToken, 0) == 2);

  // And decisions still work.
  const ClearanceGranted& g = grant(c2.decide(rig.request(), 104));
  CHECK(g.effectiveModifiers[0].debit()->remaining.raw == 2);

  CHECK(!ClearanceCenter::load_state(to_bytes("junk"), 1).ok());
}

TEST_CASE("wire handler seals answers for registered servers only") {
  Rig rig(kSchemeMarker, 140);

  SealedBlob blob = rig.request().blob;
  auto req = build_clearance_request(rig.serverKeys, rig.serverId, blob,
                                     {rig.ticketToken},
                                     rig.center.public_key(), rig.rng);
  REQUIRE(req.ok());

  Bytes answer = rig.center.handle(canonical_encode(req.value()), 100);
  auto tag = peek_tag(answer);
  REQUIRE(tag.ok());
  REQUIRE(tag.value() == Tag::ClearanceResponse);
  auto resp = canonical_decode<ClearanceResponse>(answer);
  REQUIRE(resp.ok());
  auto decision = parse_clearance_response(rig.serverKeys,
                                           rig.center.public_key(), resp.value());
  REQUIRE(decision.ok());
  CHECK(grant(decision.value()).kUEcho == rig.userKeys.pub());

  // A request signed by an unregistered server comes back as a cleartext
  // failure, since C has no key to seal toward.
  KeyPair rogue = crypto_gen(kSchemeMarker, false, rig.rng).take();
  auto rogueReq = build_clearance_request(rogue, rig.rng.uuid(), blob,
                                          {rig.ticketToken},
                                          rig.center.public_key(), rig.rng);
  REQUIRE(rogueReq.ok());
  Bytes refusal = rig.center.handle(canonical_encode(rogueReq.value()), 100);
  auto failure = canonical_decode<FailureMessage>(refusal);
  REQUIRE(failure.ok());
  CHECK(failure.value().code == FailureCode::BadSignature);

  // Undecodable traffic gets the same cleartext form.
  Bytes noise = to_bytes("????");
  auto junk = canonical_decode<FailureMessage>(rig.center.handle(noise, 100));
  REQUIRE(junk.ok());
  CHECK(junk.value().code == FailureCode::Malformed);
}

TEST_CASE("decisions match the brute-force prediction on random policies") {
  // A smaller in-suite twin of the acceptance drill: random instances,
  // real center, naive oracle.
  DetRng rng(77010);
  int granted = 0;
  int denied = 0;
  for (int i = 0; i < 150; ++i) {
    gen::PolicyInstance inst = gen::policy_instance(rng);

    DetRng crypt(1000 + i);
    KeyPair orgKeys = crypto_gen(kSchemeMarker, false, crypt).take();
    KeyPair userKeys = crypto_gen(kSchemeMarker, true, crypt).take();
    ClearanceCenter center(inst.clearance, crypto_gen(kSchemeMarker, false, crypt).take(),
                           2000 + i);
    center.register_agreement(inst.org, orgKeys.pub(), inst.implications,
                              inst.agreement);

    auto cert = build_certificate(orgKeys, userKeys.pub(), inst.held, inst.now + 100);
    REQUIRE(cert.ok());
    ClearanceClaimPayload claimPayload{inst.org, cert.take()};
    auto claimSig = crypto_sign(userKeys, canonical_encode(claimPayload));
    REQUIRE(claimSig.ok());
    ClearanceBlobPayload blobPayload{userKeys.pub(), claimSig.take()};
    auto blob = crypto_seal(center.public_key(), canonical_encode(blobPayload), crypt);
    REQUIRE(blob.ok());

    ClearanceRequestPayload req;
    req.serverId = crypt.uuid();
    req.blob = blob.take();
    req.candidates = inst.candidates;

    auto decision = center.decide(req, inst.now);
    oracle::ClearancePrediction want = oracle::predict_clearance(
        inst.agreement, inst.implications, inst.held, inst.candidates, inst.now);

    if (want.granted) {
      ++granted;
      const ClearanceGranted& g = grant(decision);
      CHECK(canonical_encode(g.ticket.token) == want.ticketToken);
    } else {
      ++denied;
      CHECK(denial(decision).code == want.code);
    }
  }
  CHECK(granted > 20);
  CHECK(denied > 20);
}
