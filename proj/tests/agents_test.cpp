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

// Agent behavior: the org admin's membership ledger, the user agent's key
// rotation and certificate selection, wire-message economy per request
// shape, and what revocation looks like from the user's side.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "usher/agents.hpp"
#include "usher/bytes.hpp"
#include "usher/crypto.hpp"
#include "usher/tokens.hpp"

#include "support/world.hpp"

using namespace usher;
using usher::test::World;
using usher::test::WorldConfig;

namespace {

bool contains(const Bytes& haystack, const Bytes& needle) {
  return !needle.empty() &&
         std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

}  // namespace

TEST_CASE("org admin tracks members and their groups") {
  DetRng rng(1);
  Uuid orgId = rng.uuid();
  KeyPair keys = crypto_gen(kSchemeMarker, false, rng).take();
  OrgAdmin org(orgId, keys, 3600);

  CHECK(!org.is_member("ruth"));
  org.add_member("ruth", {"staff", "research"});
  CHECK(org.is_member("ruth"));

  auto enrollments = org.enrollments_of("ruth");
  REQUIRE(enrollments.size() == 2);
  for (const Enrollment& e : enrollments) {
    CHECK(e.org == orgId);
    CHECK(e.token.creator == orgId);
    CHECK(e.token.value == e.group);
  }
  // Alphabetical by group name, not insertion order.
  CHECK(enrollments[0].group == to_bytes("research"));
  CHECK(enrollments[1].group == to_bytes("staff"));

  CHECK(org.group_token("staff").creator == orgId);
  CHECK(org.group_token("staff").value == to_bytes("staff"));

  org.remove_member("ruth");
  CHECK(!org.is_member("ruth"));
  CHECK(org.enrollments_of("ruth").empty());
}

TEST_CASE("enrollment certificates bind the presented key and expiry") {
  DetRng rng(2);
  Uuid orgId = rng.uuid();
  KeyPair keys = crypto_gen(kSchemeMarker, false, rng).take();
  OrgAdmin org(orgId, keys, 3600);
  org.add_member("ruth", {"staff"});
  KeyPair userKeys = crypto_gen(kSchemeMarker, true, rng).take();

  auto issued = org.issue_enrollment("ruth", userKeys.pub(), 5000);
  REQUIRE(issued.ok());
  CHECK(issued.value().expiry == 5000 + 3600);

  auto payload = verify_certificate(org.public_key(), issued.value().certificate);
  REQUIRE(payload.ok());
  CHECK(payload.value().kU == userKeys.pub());
  CHECK(payload.value().expiry == 5000 + 3600);
  REQUIRE(payload.value().enrollments.size() == 1);
  CHECK(payload.value().enrollments[0].group == to_bytes("staff"));

  auto stranger = org.issue_enrollment("nobody", userKeys.pub(), 5000);
  REQUIRE(!stranger.ok());
  CHECK(stranger.code() == FailureCode::NotAuthorized);
}

TEST_CASE("deleting a group strips members and implication edges") {
  DetRng rng(3);
  Uuid orgId = rng.uuid();
  KeyPair keys = crypto_gen(kSchemeMarker, false, rng).take();
  OrgAdmin org(orgId, keys);
  org.add_member("ruth", {"purchasing", "staff"});

  auto enr = [&](const char* g) {
    Bytes b = to_bytes(g);
    return Enrollment{Token{orgId, b, ""}, orgId, b};
  };
  ImplicationMap map;
  map.edges = {{enr("purchasing"), enr("adminDivision")},
               {enr("staff"), enr("employee")}};
  map.normalize();
  org.set_implications(map);
  CHECK(org.implications().edges.size() == 2);

  org.delete_group("purchasing");

  auto left = org.enrollments_of("ruth");
  REQUIRE(left.size() == 1);
  CHECK(left[0].group == to_bytes("staff"));
  REQUIRE(org.implications().edges.size() == 1);
  CHECK(org.implications().edges[0].first.group == to_bytes("staff"));
}

TEST_CASE("each request shape costs its fixed number of wire messages") {
  SUBCASE("plain grant takes four") {
    WorldConfig cfg;
    cfg.seed = 10;
    World w(cfg);
    std::size_t before = w.net.transcript().size();
    REQUIRE(w.request(w.document).ok());
    CHECK(w.net.transcript().size() - before == 4);
  }

  SUBCASE("unconfirmed debit takes five") {
    WorldConfig cfg;
    cfg.seed = 11;
    cfg.grantModifiers = {debit(DebitAmount::integer(5), "uses", false, "")};
    World w(cfg);
    std::size_t before = w.net.transcript().size();
    REQUIRE(w.request(w.document).ok());
    CHECK(w.net.transcript().size() - before == 5);
  }

  SUBCASE("declined confirmation takes six") {
    WorldConfig cfg;
    cfg.seed = 12;
    cfg.grantModifiers = {debit(DebitAmount::integer(5), "uses", true, "why")};
    World w(cfg);
    std::size_t before = w.net.transcript().size();
    auto got = w.request(w.document, {},
                         [](const std::string&, const std::string&,
                            const std::string&) { return false; });
    REQUIRE(!got.ok());
    CHECK(w.net.transcript().size() - before == 6);
  }

  SUBCASE("confirmed debit takes seven") {
    WorldConfig cfg;
    cfg.seed = 13;
    cfg.grantModifiers = {debit(DebitAmount::integer(5), "uses", true, "why")};
    World w(cfg);
    std::size_t before = w.net.transcript().size();
    auto got = w.request(w.document, {},
                         [](const std::string&, const std::string&,
                            const std::string&) { return true; });
    REQUIRE(got.ok());
    CHECK(w.net.transcript().size() - before == 7);
  }
}

TEST_CASE("refresh rotates the key unless the policy says never") {
  WorldConfig cfg;
  cfg.seed = 20;
  World w(cfg);

  PublicKey before = w.user->ephemeral_public();
  REQUIRE(w.user->refresh_enrollments(w.org->id(), w.clock.now()).ok());
  CHECK(w.user->ephemeral_public() != before);
  REQUIRE(w.request(w.document).ok());

  w.user->set_rotation_policy(RotationPolicy::Never);
  PublicKey fixed = w.user->ephemeral_public();
  REQUIRE(w.user->refresh_enrollments(w.org->id(), w.clock.now()).ok());
  CHECK(w.user->ephemeral_public() == fixed);
  REQUIRE(w.request(w.document).ok());
}

TEST_CASE("a refused refresh leaves the working key and certificate") {
  WorldConfig cfg;
  cfg.seed = 21;
  World w(cfg);
  REQUIRE(w.request(w.document).ok());

  w.org->remove_member("member");
  PublicKey before = w.user->ephemeral_public();
  Status refused = w.user->refresh_enrollments(w.org->id(), w.clock.now());
  REQUIRE(!refused.ok());
  CHECK(refused.code() == FailureCode::NotAuthorized);
  CHECK(w.user->ephemeral_public() == before);

  // The certificate already in hand keeps working until it expires;
  // membership removal alone is not revocation.
  REQUIRE(w.request(w.document).ok());
}

TEST_CASE("manual rotation orphans the certificate until a refresh") {
  WorldConfig cfg;
  cfg.seed = 22;
  World w(cfg);
  REQUIRE(w.request(w.document).ok());

  w.user->rotate_key();
  auto broken = w.request(w.document);
  REQUIRE(!broken.ok());
  CHECK(broken.code() == FailureCode::BadSignature);

  REQUIRE(w.user->refresh_enrollments(w.org->id(), w.clock.now()).ok());
  REQUIRE(w.request(w.document).ok());
}

TEST_CASE("expired certificates are refused until refreshed") {
  WorldConfig cfg;
  cfg.seed = 23;
  World w(cfg);
  REQUIRE(w.request(w.document).ok());

  w.clock.set(cfg.certExpiry + 1);
  auto expired = w.request(w.document);
  REQUIRE(!expired.ok());
  CHECK(expired.code() == FailureCode::Expired);

  REQUIRE(w.user->refresh_enrollments(w.org->id(), w.clock.now()).ok());
  REQUIRE(w.request(w.document).ok());
}

TEST_CASE("per-request rotation keeps consecutive requests unlinkable") {
  WorldConfig cfg;
  cfg.seed = 24;
  World w(cfg);
  w.user->set_rotation_policy(RotationPolicy::EveryRequest);

  auto wireOfNextRequest = [&w] {
    std::size_t start = w.net.transcript().size();
    REQUIRE(w.request(w.document).ok());
    Bytes all;
    for (std::size_t i = start; i < w.net.transcript().size(); ++i) {
      const TranscriptEntry& e = w.net.transcript()[i];
      all.insert(all.end(), e.bytes.begin(), e.bytes.end());
      if (e.responseBytes)
        all.insert(all.end(), e.responseBytes->begin(), e.responseBytes->end());
    }
    return all;
  };

  Bytes wire1 = wireOfNextRequest();
  PublicKey key1 = w.user->ephemeral_public();
  Bytes wire2 = wireOfNextRequest();
  PublicKey key2 = w.user->ephemeral_public();

  CHECK(key1 != key2);

  // With marker instrumentation the traffic is readable, so the check is
  // direct: each conversation carries its own key and no trace of the
  // other one's.
  CHECK(contains(wire1, key1.bytes));
  CHECK(!contains(wire1, key2.bytes));
  CHECK(contains(wire2, key2.bytes));
  CHECK(!contains(wire2, key1.bytes));
}

TEST_CASE("request failures before the wire are reported locally") {
  WorldConfig cfg;
  cfg.seed = 25;
  World w(cfg);

  DetRng rng(250);
  auto lost = w.user->request_service(w.net, rng.uuid(), w.document, {},
                                      w.clock.now());
  REQUIRE(!lost.ok());
  CHECK(lost.code() == FailureCode::NotAuthorized);
  CHECK(lost.failure().detail == "unknown server");

  UserAgent fresh(rng.uuid(), kSchemeMarker, 99);
  fresh.learn_server(w.server->id(), w.server->public_key(),
                     w.clearance->id(), w.clearance->public_key());
  auto bare = fresh.request_service(w.net, w.server->id(), w.document, {},
                                    w.clock.now());
  REQUIRE(!bare.ok());
  CHECK(bare.failure().detail == "no certificate held");

  Status unbound = fresh.refresh_enrollments(w.org->id(), w.clock.now());
  REQUIRE(!unbound.ok());
  CHECK(unbound.code() == FailureCode::UnknownOrg);
}

TEST_CASE("the lowest org id holding a live certificate is presented") {
  WorldConfig cfg;
  cfg.seed = 26;
  World w(cfg);

  // A second org, unknown to the clearance center, with a much longer
  // certificate life. Pinning the key lets both certificates stay bound
  // to the same ephemeral pair.
  w.user->set_rotation_policy(RotationPolicy::Never);
  DetRng rng(260);
  Uuid otherId = rng.uuid();
  KeyPair otherKeys = crypto_gen(kSchemeMarker, false, rng).take();
  OrgAdmin other(otherId, otherKeys, 100 * 86400);
  other.add_member("member", {"staff"});
  w.user->bind_org(&other, "member");
  REQUIRE(w.user->refresh_enrollments(otherId, w.clock.now()).ok());
  REQUIRE(w.user->has_certificate(w.org->id()));
  REQUIRE(w.user->has_certificate(otherId));

  bool worldOrgIsLower = w.org->id() < otherId;
  auto got = w.request(w.document);
  if (worldOrgIsLower) {
    // The known org wins the tie and the request succeeds.
    REQUIRE(got.ok());
  } else {
    // The stranger org is presented; C has no agreement for it.
    REQUIRE(!got.ok());
    CHECK(got.code() == FailureCode::UnknownOrg);
  }

  // The world org's certificate expires first; from then on only the
  // stranger org is live, so it is presented regardless of id order.
  std::int64_t worldExpiry = *w.user->certificate_expiry(w.org->id());
  REQUIRE(worldExpiry < *w.user->certificate_expiry(otherId));
  w.clock.set(worldExpiry + 1);
  auto later = w.request(w.document);
  REQUIRE(!later.ok());
  CHECK(later.code() == FailureCode::UnknownOrg);
}

TEST_CASE("revocation through the producer bites immediately") {
  SUBCASE("acl removal") {
    WorldConfig cfg;
    cfg.seed = 27;
    World w(cfg);
    REQUIRE(w.request(w.document).ok());
    w.server->load_acl({});
    auto got = w.request(w.document);
    REQUIRE(!got.ok());
    CHECK(got.code() == FailureCode::NotAuthorized);
  }

  SUBCASE("grant removal at the clearance center") {
    WorldConfig cfg;
    cfg.seed = 28;
    World w(cfg);
    REQUIRE(w.request(w.document).ok());
    ServiceAgreement empty;
    empty.consumerOrg = w.org->id();
    w.producer->negotiate_agreement(*w.org, empty);
    auto got = w.request(w.document);
    REQUIRE(!got.ok());
    CHECK(got.code() == FailureCode::NotAuthorized);
  }
}
