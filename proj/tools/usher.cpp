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

// Command line front end. Keys, certificates, agreements, ACLs and
// transcripts are canonical files on disk; scenario worlds run entirely
// in process. Every random choice draws from the given seed, so a rerun
// with the same inputs rewrites byte-identical outputs.
//
// Exit codes: 0 success, 2 validation failure, 3 IO failure, 4 expected
// outcome mismatch.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "usher/files.hpp"
#include "usher/privacy.hpp"
#include "usher/scenario.hpp"

namespace {

using namespace usher;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kIo = 3;
constexpr int kMismatch = 4;

struct Global {
  std::string stateDir = ".";
  std::string format = "text";
  bool unsafeMarker = false;

  bool json_out() const { return format == "json"; }
};

int fail_validation(const Failure& f) {
  std::string_view name = failure_code_name(f.code);
  std::fprintf(stderr, "%.*s: %s\n", static_cast<int>(name.size()), name.data(),
               f.detail.c_str());
  return kValidation;
}

int fail_validation(const std::string& detail) {
  return fail_validation(Failure{FailureCode::Malformed, detail});
}

int fail_io(const std::string& detail) {
  std::fprintf(stderr, "IoError: %s\n", detail.c_str());
  return kIo;
}

std::string resolve(const Global& g, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || g.stateDir == ".") return path;
  return (std::filesystem::path(g.stateDir) / p).string();
}

// Reads and decodes one artifact; on failure stores the exit code in rc.
// A missing or unreadable file is IO, undecodable content is validation.
template <typename T>
std::optional<T> load_artifact(const Global& g, const std::string& path, const char* what,
                               int& rc) {
  auto raw = read_file(resolve(g, path));
  if (!raw.ok()) {
    rc = fail_io(raw.failure().detail);
    return std::nullopt;
  }
  auto decoded = canonical_decode<T>(raw.value());
  if (!decoded.ok()) {
    rc = fail_validation(path + " is not a valid " + what);
    return std::nullopt;
  }
  return decoded.take();
}

std::optional<std::string> slurp_text(const Global& g, const std::string& path, int& rc) {
  auto raw = read_file(resolve(g, path));
  if (!raw.ok()) {
    rc = fail_io(raw.failure().detail);
    return std::nullopt;
  }
  return std::string(raw.value().begin(), raw.value().end());
}

bool check_role(const std::string& path, const std::string& got, const char* want, int& rc) {
  if (got == want) return true;
  rc = fail_validation(path + " holds a " + got + " key, expected " + want);
  return false;
}

int finish_writes(const Global& g, const std::vector<std::string>& wrote) {
  if (g.json_out()) {
    json doc = {{"wrote", wrote}};
    std::fputs((doc.dump(2) + "\n").c_str(), stdout);
  } else {
    for (const std::string& p : wrote) std::printf("wrote %s\n", p.c_str());
  }
  return kOk;
}

bool refuse_marker(const Global& g, int& rc) {
  if (g.unsafeMarker) return false;
  rc = fail_validation(
      Failure{FailureCode::NotAuthorized,
              "marker crypto is transparent test instrumentation; pass --unsafe-marker"});
  return true;
}

int cmd_keygen(const Global& g, std::uint64_t seed, const std::string& role,
               const std::string& outPath, const std::string& backend,
               const std::string& idHex) {
  int rc = kOk;
  std::uint8_t scheme = backend == "marker" ? kSchemeMarker : kSchemeReal;
  if (scheme == kSchemeMarker && refuse_marker(g, rc)) return rc;

  DetRng rng(seed);
  Uuid id = rng.uuid();
  if (!idHex.empty()) {
    Bytes decoded;
    if (!hex_decode(idHex, decoded) || decoded.size() != id.data.size()) {
      return fail_validation("--id must be " + std::to_string(2 * id.data.size()) +
                             " hex characters");
    }
    std::copy(decoded.begin(), decoded.end(), id.data.begin());
  }
  auto keys = crypto_gen(scheme, role == "user", rng);
  if (!keys.ok()) return fail_validation(keys.failure());

  std::string out = resolve(g, outPath);
  KeyFile secret{role, id, keys.value()};
  PublicKeyFile pub{role, id, keys.value().pub()};
  if (Status w = write_file(out, canonical_encode(secret)); !w.ok()) {
    return fail_io(w.failure().detail);
  }
  if (Status w = write_file(out + ".pub", canonical_encode(pub)); !w.ok()) {
    return fail_io(w.failure().detail);
  }
  return finish_writes(g, {out, out + ".pub"});
}

// Roster files are JSON objects mapping member references to group name
// arrays. The reference never appears in any produced artifact.
Result<std::map<std::string, std::vector<std::string>>> parse_roster(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) return Failure{FailureCode::Malformed, "members file: invalid JSON"};
  if (!doc.is_object()) {
    return Failure{FailureCode::Malformed, "members file: $: expected an object"};
  }
  std::map<std::string, std::vector<std::string>> roster;
  for (const auto& [name, groups] : doc.items()) {
    std::string path = "members file: $." + name;
    if (!groups.is_array() || groups.empty()) {
      return Failure{FailureCode::Malformed, path + ": expected a non-empty group array"};
    }
    std::vector<std::string> parsed;
    for (const auto& gname : groups) {
      if (!gname.is_string() || gname.get<std::string>().empty()) {
        return Failure{FailureCode::Malformed, path + ": group names must be non-empty strings"};
      }
      parsed.push_back(gname.get<std::string>());
    }
    roster[name] = std::move(parsed);
  }
  return roster;
}

int cmd_enroll(const Global& g, const std::string& orgPath, const std::string& membersPath,
               const std::string& userRef, const std::string& userKeyPath,
               const std::string& outPath, std::int64_t now, std::int64_t expiry) {
  int rc = kOk;
  auto org = load_artifact<KeyFile>(g, orgPath, "key file", rc);
  if (!org) return rc;
  if (!check_role(orgPath, org->role, "org", rc)) return rc;
  auto userKey = load_artifact<PublicKeyFile>(g, userKeyPath, "public key file", rc);
  if (!userKey) return rc;
  if (!check_role(userKeyPath, userKey->role, "user", rc)) return rc;
  auto rosterText = slurp_text(g, membersPath, rc);
  if (!rosterText) return rc;
  auto roster = parse_roster(*rosterText);
  if (!roster.ok()) return fail_validation(roster.failure());

  OrgAdmin admin(org->id, org->keys, expiry);
  for (const auto& [name, groups] : roster.value()) admin.add_member(name, groups);
  auto issued = admin.issue_enrollment(userRef, userKey->publicKey, now);
  if (!issued.ok()) return fail_validation(issued.failure());

  CertificateFile cert{org->id, issued.value().certificate, issued.value().expiry};
  std::string out = resolve(g, outPath);
  if (Status w = write_file(out, canonical_encode(cert)); !w.ok()) {
    return fail_io(w.failure().detail);
  }
  return finish_writes(g, {out});
}

int cmd_agree(const Global& g, std::uint64_t seed, const std::string& clearancePath,
              const std::string& orgPubPath, const std::string& grantsPath,
              const std::string& statePath, const std::string& outPath, std::int64_t timeout) {
  int rc = kOk;
  auto cc = load_artifact<KeyFile>(g, clearancePath, "key file", rc);
  if (!cc) return rc;
  if (!check_role(clearancePath, cc->role, "clearance", rc)) return rc;
  auto orgPub = load_artifact<PublicKeyFile>(g, orgPubPath, "public key file", rc);
  if (!orgPub) return rc;
  if (!check_role(orgPubPath, orgPub->role, "org", rc)) return rc;
  auto grantsText = slurp_text(g, grantsPath, rc);
  if (!grantsText) return rc;
  auto spec = parse_agreement_spec(*grantsText);
  if (!spec.ok()) return fail_validation(spec.failure());

  std::unique_ptr<ClearanceCenter> center;
  if (!statePath.empty()) {
    auto raw = read_file(resolve(g, statePath));
    if (!raw.ok()) return fail_io(raw.failure().detail);
    auto loaded = ClearanceCenter::load_state(raw.value(), seed, timeout);
    if (!loaded.ok()) return fail_validation(statePath + ": " + loaded.failure().detail);
    center = loaded.take();
  } else {
    center = std::make_unique<ClearanceCenter>(cc->id, cc->keys, seed, timeout);
  }

  MaterializedAgreement mat = materialize_agreement(orgPub->id, center->id(), spec.value());
  center->register_agreement(orgPub->id, orgPub->publicKey, std::move(mat.implications),
                             std::move(mat.agreement));
  std::string out = resolve(g, outPath);
  if (Status w = write_file(out, center->save_state()); !w.ok()) {
    return fail_io(w.failure().detail);
  }
  return finish_writes(g, {out});
}

int cmd_acl(const Global& g, const std::string& serverPubPath, const std::string& clearancePubPath,
            const std::string& entriesPath, const std::string& outPath) {
  int rc = kOk;
  auto server = load_artifact<PublicKeyFile>(g, serverPubPath, "public key file", rc);
  if (!server) return rc;
  if (!check_role(serverPubPath, server->role, "server", rc)) return rc;
  auto cc = load_artifact<PublicKeyFile>(g, clearancePubPath, "public key file", rc);
  if (!cc) return rc;
  if (!check_role(clearancePubPath, cc->role, "clearance", rc)) return rc;
  auto entriesText = slurp_text(g, entriesPath, rc);
  if (!entriesText) return rc;
  auto decls = parse_acl_spec(*entriesText);
  if (!decls.ok()) return fail_validation(decls.failure());

  AclFile file{materialize_acl(cc->id, server->id, decls.value())};
  std::string out = resolve(g, outPath);
  if (Status w = write_file(out, canonical_encode(file)); !w.ok()) {
    return fail_io(w.failure().detail);
  }
  return finish_writes(g, {out});
}

// Relative file references inside a scenario resolve against the
// scenario's own directory, not the state directory.
std::string scenario_base(const std::string& resolvedPath) {
  std::string dir = std::filesystem::path(resolvedPath).parent_path().string();
  return dir.empty() ? std::string(".") : dir;
}

std::optional<Scenario> load_scenario(const Global& g, const std::string& path,
                                      std::string& baseDir, int& rc) {
  auto text = slurp_text(g, path, rc);
  if (!text) return std::nullopt;
  auto parsed = parse_scenario(*text);
  if (!parsed.ok()) {
    rc = fail_validation(parsed.failure());
    return std::nullopt;
  }
  if (parsed.value().backend == kSchemeMarker && refuse_marker(g, rc)) return std::nullopt;
  baseDir = scenario_base(resolve(g, path));
  return parsed.take();
}

int write_report(const Global& g, const std::string& reportPath, const std::string& rendered) {
  if (reportPath.empty()) return kOk;
  Status w = write_file(resolve(g, reportPath), to_bytes(rendered));
  return w.ok() ? kOk : fail_io(w.failure().detail);
}

int cmd_run(const Global& g, const std::string& scenarioPath,
            std::optional<std::uint64_t> seedOverride, const std::string& reportPath,
            const std::string& transcriptPath) {
  int rc = kOk;
  std::string baseDir;
  auto scenario = load_scenario(g, scenarioPath, baseDir, rc);
  if (!scenario) return rc;
  auto ran = run_scenario(*scenario, seedOverride, baseDir);
  if (!ran.ok()) return fail_validation(ran.failure());

  const ScenarioReport& report = ran.value().report;
  std::string rendered = g.json_out() ? report.render_json() : report.render_text();
  std::fputs(rendered.c_str(), stdout);
  if (int wrc = write_report(g, reportPath, rendered); wrc != kOk) return wrc;
  if (!transcriptPath.empty()) {
    TranscriptFile file{ran.value().transcript};
    Status w = write_file(resolve(g, transcriptPath), canonical_encode(file));
    if (!w.ok()) return fail_io(w.failure().detail);
  }
  return report.allMatched ? kOk : kMismatch;
}

int cmd_attack(const Global& g, const std::string& scenarioPath, const std::string& recipe,
               std::optional<std::uint64_t> seedOverride, const std::string& reportPath) {
  int rc = kOk;
  std::string baseDir;
  auto scenario = load_scenario(g, scenarioPath, baseDir, rc);
  if (!scenario) return rc;
  auto ran = run_scenario_attack(*scenario, recipe, seedOverride, baseDir);
  if (!ran.ok()) return fail_validation(ran.failure());

  const AttackOutcome& outcome = ran.value();
  std::string rendered = g.json_out() ? outcome.render_json() : outcome.render_text();
  std::fputs(rendered.c_str(), stdout);
  if (int wrc = write_report(g, reportPath, rendered); wrc != kOk) return wrc;
  if (outcome.denied()) return kOk;
  // Nothing attempted means the scenario offers no foothold to attack,
  // which is a fixture problem rather than a survived drill.
  return outcome.attempts == 0 ? kValidation : kMismatch;
}

const char* tag_name(Tag tag) {
  switch (tag) {
    case Tag::Token: return "Token";
    case Tag::Enrollment: return "Enrollment";
    case Tag::Ticket: return "Ticket";
    case Tag::Modifier: return "Modifier";
    case Tag::ImplicationMap: return "ImplicationMap";
    case Tag::ServiceAgreement: return "ServiceAgreement";
    case Tag::TicketGrant: return "TicketGrant";
    case Tag::PublicKey: return "PublicKey";
    case Tag::PrivateKey: return "PrivateKey";
    case Tag::KeyPair: return "KeyPair";
    case Tag::SignedBlob: return "SignedBlob";
    case Tag::SealedBlob: return "SealedBlob";
    case Tag::Tau: return "Tau";
    case Tag::CertificatePayload: return "CertificatePayload";
    case Tag::EnrollmentCertificate: return "EnrollmentCertificate";
    case Tag::ClearanceClaimPayload: return "ClearanceClaimPayload";
    case Tag::ClearanceBlobPayload: return "ClearanceBlobPayload";
    case Tag::RequestPayload: return "RequestPayload";
    case Tag::RequestEnvelope: return "RequestEnvelope";
    case Tag::ClearanceRequestPayload: return "ClearanceRequestPayload";
    case Tag::ClearanceRequest: return "ClearanceRequest";
    case Tag::ClearanceDecisionPayload: return "ClearanceDecisionPayload";
    case Tag::ClearanceResponse: return "ClearanceResponse";
    case Tag::ConfirmAskPayload: return "ConfirmAskPayload";
    case Tag::ConfirmAsk: return "ConfirmAsk";
    case Tag::ConfirmReplyPayload: return "ConfirmReplyPayload";
    case Tag::ConfirmReply: return "ConfirmReply";
    case Tag::DebitCommitPayload: return "DebitCommitPayload";
    case Tag::DebitCommit: return "DebitCommit";
    case Tag::DebitResultPayload: return "DebitResultPayload";
    case Tag::DebitResult: return "DebitResult";
    case Tag::Answer: return "Answer";
    case Tag::FailureMessage: return "FailureMessage";
    case Tag::AdminMessage: return "AdminMessage";
    case Tag::AclEntry: return "AclEntry";
    case Tag::AclFile: return "AclFile";
    case Tag::ClearanceStateFile: return "ClearanceStateFile";
    case Tag::TranscriptFile: return "TranscriptFile";
    case Tag::KeyFile: return "KeyFile";
    case Tag::PublicKeyFile: return "PublicKeyFile";
    case Tag::CertificateFile: return "CertificateFile";
  }
  return "unknown";
}

std::string message_type(const Bytes& bytes) {
  auto tag = peek_tag(bytes);
  return tag.ok() ? tag_name(tag.value()) : "unknown";
}

json sealed_regions(const Bytes& bytes) {
  json regions = json::array();
  for (const SealedSpan& span : scan_sealed_spans(bytes)) {
    regions.push_back({{"begin", span.payloadBegin},
                       {"end", span.payloadEnd},
                       {"recipient", hex_encode(span.recipient).substr(0, 8)}});
  }
  return regions;
}

int cmd_inspect(const Global& g, const std::string& path, bool jsonFlag) {
  int rc = kOk;
  auto file = load_artifact<TranscriptFile>(g, path, "transcript file", rc);
  if (!file) return rc;

  if (jsonFlag || g.json_out()) {
    json out = json::array();
    for (const TranscriptEntry& e : file->entries) {
      json record = {{"seq", e.seq},
                     {"from", e.from.hex()},
                     {"to", e.to.hex()},
                     {"size", e.bytes.size()},
                     {"type", message_type(e.bytes)},
                     {"time", e.simTime},
                     {"injected", e.injected},
                     {"dropped", e.dropped},
                     {"sealed", sealed_regions(e.bytes)}};
      if (e.responseBytes) {
        record["responseType"] = message_type(*e.responseBytes);
        record["responseSize"] = e.responseBytes->size();
      }
      out.push_back(std::move(record));
    }
    std::fputs((out.dump(2) + "\n").c_str(), stdout);
    return kOk;
  }

  std::printf("%-5s %-13s %-13s %6s  %-24s %s\n", "seq", "from", "to", "size", "type", "flags");
  for (const TranscriptEntry& e : file->entries) {
    std::string flags;
    if (e.injected) flags += " injected";
    if (e.dropped) flags += " dropped";
    if (e.responseBytes) flags += " +reply:" + message_type(*e.responseBytes);
    std::printf("%-5llu %-13s %-13s %6zu  %-24s%s\n", static_cast<unsigned long long>(e.seq),
                e.from.hex().substr(0, 12).c_str(), e.to.hex().substr(0, 12).c_str(),
                e.bytes.size(), message_type(e.bytes).c_str(), flags.c_str());
    for (const SealedSpan& span : scan_sealed_spans(e.bytes)) {
      std::printf("      sealed %zu..%zu for %s\n", span.payloadBegin, span.payloadEnd,
                  hex_encode(span.recipient).substr(0, 8).c_str());
    }
  }
  std::printf("%zu message%s\n", file->entries.size(), file->entries.size() == 1 ? "" : "s");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"enrollment and ticket authorization toolkit"};
  app.require_subcommand(1);

  Global g;
  app.add_option("--state", g.stateDir, "directory for relative file paths")
      ->capture_default_str();
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_flag("--unsafe-marker", g.unsafeMarker,
               "permit the transparent marker crypto backend");

  int rc = kOk;

  struct {
    std::string role, out, backend = "real", id;
    std::uint64_t seed = 1;
  } kg;
  auto* keygen = app.add_subcommand("keygen", "generate a key pair for a role");
  keygen->fallthrough();
  keygen->add_option("--role", kg.role, "org, server, clearance or user")
      ->required()
      ->check(CLI::IsMember({"org", "server", "clearance", "user"}));
  keygen->add_option("--out", kg.out, "key file path; the public half gets .pub appended")
      ->required();
  keygen->add_option("--backend", kg.backend, "crypto backend")
      ->check(CLI::IsMember({"real", "marker"}))
      ->capture_default_str();
  keygen->add_option("--id", kg.id, "principal id as 32 hex characters");
  keygen->add_option("--seed", kg.seed, "deterministic generation seed")->capture_default_str();
  keygen->callback([&] { rc = cmd_keygen(g, kg.seed, kg.role, kg.out, kg.backend, kg.id); });

  struct {
    std::string org, members, user, userKey, out;
    std::int64_t now = 0, expiry = 86400;
  } en;
  auto* enroll = app.add_subcommand("enroll", "issue an enrollment certificate to a member");
  enroll->fallthrough();
  enroll->add_option("--org", en.org, "org key file")->required();
  enroll->add_option("--members", en.members, "JSON roster mapping member names to groups")
      ->required();
  enroll->add_option("--user", en.user, "member name to enroll")->required();
  enroll->add_option("--user-key", en.userKey, "the member's public key file")->required();
  enroll->add_option("--out", en.out, "certificate file path")->required();
  enroll->add_option("--now", en.now, "issue time, seconds")->capture_default_str();
  enroll->add_option("--expiry", en.expiry, "certificate lifetime, seconds")
      ->capture_default_str();
  enroll->callback(
      [&] { rc = cmd_enroll(g, en.org, en.members, en.user, en.userKey, en.out, en.now, en.expiry); });

  struct {
    std::string clearance, orgPub, grants, state, out;
    std::int64_t timeout = 120;
    std::uint64_t seed = 1;
  } ag;
  auto* agree = app.add_subcommand("agree", "register a service agreement at a clearance center");
  agree->fallthrough();
  agree->add_option("--clearance", ag.clearance, "clearance center key file")->required();
  agree->add_option("--org", ag.orgPub, "consumer org public key file")->required();
  agree->add_option("--grants", ag.grants, "JSON agreement with implications and grants")
      ->required();
  agree->add_option("--in", ag.state, "existing clearance state file to extend");
  agree->add_option("--out", ag.out, "clearance state file to write")->required();
  agree->add_option("--timeout", ag.timeout, "correlator lifetime, seconds")
      ->capture_default_str();
  agree->add_option("--seed", ag.seed, "clearance center rng seed")->capture_default_str();
  agree->callback([&] {
    rc = cmd_agree(g, ag.seed, ag.clearance, ag.orgPub, ag.grants, ag.state, ag.out, ag.timeout);
  });

  struct {
    std::string server, clearance, entries, out;
  } ac;
  auto* acl = app.add_subcommand("acl", "materialize a server access control list");
  acl->fallthrough();
  acl->add_option("--server", ac.server, "server public key file")->required();
  acl->add_option("--clearance", ac.clearance, "clearance center public key file")->required();
  acl->add_option("--entries", ac.entries, "JSON ticket to resource entries")->required();
  acl->add_option("--out", ac.out, "acl file path")->required();
  acl->callback([&] { rc = cmd_acl(g, ac.server, ac.clearance, ac.entries, ac.out); });

  struct {
    std::string scenario, report, transcript;
    std::uint64_t seed = 0;
    CLI::Option* seedOpt = nullptr;
  } rn;
  auto* run = app.add_subcommand("run", "execute a scenario and check its expectations");
  run->fallthrough();
  run->add_option("scenario", rn.scenario, "scenario JSON file")->required();
  rn.seedOpt = run->add_option("--seed", rn.seed, "override the scenario seed");
  run->add_option("--report", rn.report, "also write the report to this path");
  run->add_option("--transcript", rn.transcript, "write the wire transcript to this path");
  run->callback([&] {
    std::optional<std::uint64_t> seed;
    if (rn.seedOpt->count() > 0) seed = rn.seed;
    rc = cmd_run(g, rn.scenario, seed, rn.report, rn.transcript);
  });

  struct {
    std::string scenario, recipe, report;
    std::uint64_t seed = 0;
    CLI::Option* seedOpt = nullptr;
  } at;
  auto* attack = app.add_subcommand("attack", "rerun a scenario with an adversary recipe");
  attack->fallthrough();
  attack->add_option("scenario", at.scenario, "scenario JSON file")->required();
  attack->add_option("--attack", at.recipe, "adversary recipe")
      ->required()
      ->check(CLI::IsMember({"replay", "tamper", "steal-cert"}));
  at.seedOpt = attack->add_option("--seed", at.seed, "override the scenario seed");
  attack->add_option("--report", at.report, "also write the report to this path");
  attack->callback([&] {
    std::optional<std::uint64_t> seed;
    if (at.seedOpt->count() > 0) seed = at.seed;
    rc = cmd_attack(g, at.scenario, at.recipe, seed, at.report);
  });

  struct {
    std::string transcript;
    bool json = false;
  } in;
  auto* inspect = app.add_subcommand("inspect", "dump a recorded wire transcript");
  inspect->fallthrough();
  inspect->add_option("transcript", in.transcript, "transcript file")->required();
  inspect->add_flag("--json", in.json, "emit machine-parseable records");
  inspect->callback([&] { rc = cmd_inspect(g, in.transcript, in.json); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }
  return rc;
}
