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

#ifndef USHER_TESTS_WORLD_HPP
#define USHER_TESTS_WORLD_HPP

// One fully wired deployment on a simulated network: a clearance center,
// one org with one enrolled user, and one server with a document and a
// counter resource. Tests mutate the returned handles to carve out the
// situation they need.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "usher/agents.hpp"
#include "usher/clearance.hpp"
#include "usher/server.hpp"
#include "usher/simnet.hpp"

namespace usher::test {

struct WorldConfig {
  std::uint8_t scheme = kSchemeMarker;
  std::uint64_t seed = 1;
  std::int64_t startTime = 1000000;
  std::int64_t certExpiry = 1000000 + 86400;
  std::string group = "staff";
  std::vector<Modifier> grantModifiers;
  std::vector<Modifier> ticketModifiers;
  std::vector<Modifier> serverModifiers;
  std::int64_t replayWindow = 300;
  std::int64_t correlatorTimeout = 120;
};

struct World {
  WorldConfig cfg;
  SimClock clock{0};
  Network net{clock};
  DetRng rng{0};

  std::unique_ptr<ClearanceCenter> clearance;
  std::unique_ptr<ProducerAdmin> producer;
  std::unique_ptr<OrgAdmin> org;
  std::unique_ptr<ResourceServer> server;
  std::unique_ptr<UserAgent> user;

  Token document;
  Token counter;
  Token ticket;

  explicit World(WorldConfig c) : cfg(c), clock(c.startTime), rng(c.seed) {
    Uuid ccId = rng.uuid();
    auto ccKeys = must(crypto_gen(cfg.scheme, false, rng));
    clearance = std::make_unique<ClearanceCenter>(ccId, ccKeys, rng.next_u64(),
                                                  cfg.correlatorTimeout);
    producer = std::make_unique<ProducerAdmin>(clearance.get());
    net.register_endpoint(ccId, [this](const Uuid&, const Bytes& wire) {
      return clearance->handle(wire, clock.now());
    });

    Uuid orgId = rng.uuid();
    auto orgKeys = must(crypto_gen(cfg.scheme, false, rng));
    org = std::make_unique<OrgAdmin>(orgId, orgKeys, cfg.certExpiry - cfg.startTime);
    org->add_member("member", {cfg.group});

    Uuid srvId = rng.uuid();
    auto srvKeys = must(crypto_gen(cfg.scheme, false, rng));
    server = std::make_unique<ResourceServer>(srvId, srvKeys, ccId, ccKeys.pub(),
                                              rng.next_u64(), cfg.replayWindow);
    document = Token{srvId, to_bytes("doc"), "doc"};
    counter = Token{srvId, to_bytes("hits"), "hits"};
    server->add_document_resource(document, to_bytes("hello world"));
    server->add_counter_resource(counter);
    ticket = Token{ccId, to_bytes("reader"), "reader"};
    server->load_acl({AclEntry{ticket,
                               {{document, cfg.serverModifiers}, {counter, cfg.serverModifiers}}}});
    producer->register_server(srvId, srvKeys.pub());
    net.register_endpoint(srvId, [this](const Uuid& caller, const Bytes& wire) {
      return server->handle_request(wire, net, caller, clock.now());
    });

    producer->negotiate_agreement(*org, agreement());

    user = std::make_unique<UserAgent>(rng.uuid(), cfg.scheme, rng.next_u64());
    user->bind_org(org.get(), "member");
    Status fresh = user->refresh_enrollments(orgId, clock.now());
    if (!fresh.ok()) throw std::runtime_error("world: refresh failed: " + fresh.failure().detail);
    user->learn_server(srvId, srvKeys.pub(), ccId, ccKeys.pub());
    user->attach(net);
  }

  // The single-edge agreement this world starts with; tests renegotiate
  // variations of it through the producer admin.
  ServiceAgreement agreement() const {
    TicketGrant grant;
    grant.ticket.token = ticket;
    grant.ticket.modifiers = cfg.ticketModifiers;
    grant.grantModifiers = cfg.grantModifiers;
    ServiceAgreement a;
    a.consumerOrg = org->id();
    a.grants.push_back({org->enrollments_of("member").at(0), {grant}});
    a.normalize();
    return a;
  }

  Result<Bytes> request(const Token& resource, ParamMap params = {},
                        ConfirmDecision confirm = nullptr) {
    return user->request_service(net, server->id(), resource, std::move(params), clock.now(),
                                 std::move(confirm));
  }

  template <typename T>
  static T must(Result<T> r) {
    if (!r.ok()) throw std::runtime_error("world: " + r.failure().detail);
    return r.take();
  }
};

}  // namespace usher::test

#endif  // USHER_TESTS_WORLD_HPP
