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

#ifndef USHER_SCENARIO_HPP
#define USHER_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "usher/agents.hpp"
#include "usher/bytes.hpp"
#include "usher/clearance.hpp"
#include "usher/result.hpp"
#include "usher/server.hpp"
#include "usher/simnet.hpp"
#include "usher/tokens.hpp"

namespace usher {

// A scenario is a JSON document declaring a world (orgs, users, clearance
// centers, servers, agreements) and a step list with expected outcomes.
// Parsing is strict: unknown keys, dangling references and malformed
// values are all rejected before anything runs.

struct AclResourceDecl {
  std::string resource;
  std::vector<Modifier> modifiers;
};

struct AclDecl {
  std::string ticket;
  std::vector<AclResourceDecl> resources;
};

struct TicketGrantDecl {
  std::string ticket;
  std::vector<Modifier> ticketModifiers;
  std::vector<Modifier> grantModifiers;
};

struct GrantDecl {
  std::string group;
  std::vector<TicketGrantDecl> tickets;
};

struct ScenarioStep {
  std::string op;
  // Referenced entities by declared name; which ones apply depends on op.
  std::string user, org, server, clearance, group, resource, ticket;
  std::int64_t by = 0;  // advance
  ParamMap params;
  // Tri-state: absent means no confirmation hook, so any ask is declined.
  std::optional<bool> confirm;
  std::uint64_t seq = 0;        // replay, tamper, drop
  std::uint32_t byteIndex = 0;  // tamper
  std::uint8_t newByte = 0;     // tamper
  std::vector<AclDecl> acl;     // aclLoad
  std::vector<GrantDecl> grants;  // agree
  std::optional<std::string> expect;        // "answer", "ok" or a failure code name
  std::optional<std::string> expectAnswer;  // UTF-8 compare against the answer
  std::optional<std::uint64_t> expectMessages;
};

struct Scenario {
  std::uint8_t backend = kSchemeReal;
  std::uint64_t seed = 1;
  std::int64_t startTime = 0;

  struct OrgDecl {
    std::string name;
    std::int64_t defaultExpiry = 86400;
    // Pairs of group names; holding the first implies the second.
    std::vector<std::pair<std::string, std::string>> implications;
    std::optional<std::string> keyFile;
  };
  struct UserDecl {
    std::string name;
    std::string org;
    std::vector<std::string> groups;
    RotationPolicy rotation = RotationPolicy::OnRefresh;
    std::optional<std::string> keyFile;
    std::optional<std::string> certFile;
  };
  struct ClearanceDecl {
    std::string name;
    std::int64_t correlatorTimeout = 120;
    std::optional<std::string> keyFile;
    std::optional<std::string> stateFile;
  };
  struct ResourceDecl {
    std::string name;
    std::string kind;  // "document", "counter" or "echo"
    Bytes content;     // document only
  };
  struct ServerDecl {
    std::string name;
    std::string clearance;
    std::int64_t replayWindow = 300;
    std::vector<ResourceDecl> resources;
    std::vector<AclDecl> acl;
    std::optional<std::string> keyFile;
    std::optional<std::string> aclFile;
  };
  struct AgreementDecl {
    std::string org;
    std::string clearance;
    std::vector<GrantDecl> grants;
  };

  std::vector<OrgDecl> orgs;
  std::vector<UserDecl> users;
  std::vector<ClearanceDecl> clearances;
  std::vector<ServerDecl> servers;
  std::vector<AgreementDecl> agreements;
  std::vector<ScenarioStep> steps;
};

// Parses and validates scenario JSON. The failure detail names the
// offending path when validation rejects the document.
Result<Scenario> parse_scenario(const std::string& jsonText);

struct StepReport {
  std::size_t index = 0;
  std::string op;
  std::string outcome;  // "ok", "answer", a failure code name, ...
  std::string note;     // answer text or failure detail
  std::uint64_t messages = 0;
  bool matched = true;  // expectations held (vacuously true without any)
};

struct ScenarioReport {
  bool allMatched = true;
  std::vector<StepReport> steps;
  std::uint64_t totalMessages = 0;
  std::string transcriptHashHex;

  std::string render_text() const;
  std::string render_json() const;
};

// Executes a parsed scenario. seedOverride replaces the document seed;
// baseDir anchors relative file references. The transcript of the run is
// returned alongside the report so callers can save or inspect it.
struct ScenarioOutcome {
  ScenarioReport report;
  std::vector<TranscriptEntry> transcript;
};

Result<ScenarioOutcome> run_scenario(const Scenario& scenario,
                                     std::optional<std::uint64_t> seedOverride = std::nullopt,
                                     const std::string& baseDir = ".");

// Adversary recipe appended to a scenario: the base world runs first,
// then every recorded exchange is attacked. A breach is any injected
// delivery that comes back a service answer; counters moving under
// attack is a breach as well.
struct AttackOutcome {
  std::string recipe;
  int attempts = 0;
  int breaches = 0;
  bool countersMoved = false;
  std::vector<std::string> notes;

  bool denied() const { return attempts > 0 && breaches == 0 && !countersMoved; }

  std::string render_text() const;
  std::string render_json() const;
};

// recipe is one of "replay", "tamper", "steal-cert". steal-cert first
// probes which (user, server, resource) targets the world would grant,
// then runs the certificate theft splices against each; a scenario that
// grants nothing yields zero attempts, which callers should treat as a
// fixture problem rather than a pass.
Result<AttackOutcome> run_scenario_attack(const Scenario& scenario, const std::string& recipe,
                                          std::optional<std::uint64_t> seedOverride = std::nullopt,
                                          const std::string& baseDir = ".");

// Standalone JSON specs reusing the scenario grammar, for commands that
// materialize one artifact instead of running a world.

struct AgreementSpec {
  std::vector<std::pair<std::string, std::string>> implications;
  std::vector<GrantDecl> grants;
};

Result<AgreementSpec> parse_agreement_spec(const std::string& jsonText);

struct MaterializedAgreement {
  ImplicationMap implications;
  ServiceAgreement agreement;
};

// Group tokens take the org as creator, ticket tokens the clearance
// center, mirroring what a scenario run would register.
MaterializedAgreement materialize_agreement(const OrgId& orgId, const Uuid& clearanceId,
                                            const AgreementSpec& spec);

Result<std::vector<AclDecl>> parse_acl_spec(const std::string& jsonText);

std::vector<AclEntry> materialize_acl(const Uuid& clearanceId, const Uuid& serverId,
                                      const std::vector<AclDecl>& decls);

}  // namespace usher

#endif  // USHER_SCENARIO_HPP
