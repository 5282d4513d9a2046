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

#include "usher/agents.hpp"

#include <algorithm>
#include <utility>

#include "usher/simnet.hpp"

namespace usher {

OrgAdmin::OrgAdmin(OrgId orgId, KeyPair orgKeys, std::int64_t defaultExpiry)
    : orgId_(orgId), orgKeys_(std::move(orgKeys)), defaultExpiry_(defaultExpiry) {}

void OrgAdmin::set_implications(ImplicationMap map) {
  map.normalize();
  implications_ = std::move(map);
}

void OrgAdmin::add_member(const std::string& userRef, const std::vector<std::string>& groups) {
  auto& slot = memberGroups_[userRef];
  slot.insert(groups.begin(), groups.end());
}

void OrgAdmin::remove_member(const std::string& userRef) { memberGroups_.erase(userRef); }

void OrgAdmin::delete_group(const std::string& group) {
  for (auto& [ref, groups] : memberGroups_) groups.erase(group);
  Token gone = group_token(group);
  auto& edges = implications_.edges;
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [&](const auto& edge) {
                               return edge.first.token == gone || edge.second.token == gone;
                             }),
              edges.end());
}

bool OrgAdmin::is_member(const std::string& userRef) const {
  return memberGroups_.count(userRef) != 0;
}

Token OrgAdmin::group_token(const std::string& group) const {
  return Token{orgId_, Bytes(group.begin(), group.end()), group};
}

std::vector<Enrollment> OrgAdmin::enrollments_of(const std::string& userRef) const {
  std::vector<Enrollment> out;
  auto it = memberGroups_.find(userRef);
  if (it == memberGroups_.end()) return out;
  for (const std::string& group : it->second) {
    out.push_back(Enrollment{group_token(group), orgId_, Bytes(group.begin(), group.end())});
  }
  return out;
}

Result<OrgAdmin::Issued> OrgAdmin::issue_enrollment(const std::string& userRef,
                                                    const PublicKey& kU, std::int64_t now) const {
  auto it = memberGroups_.find(userRef);
  if (it == memberGroups_.end()) {
    return Failure{FailureCode::NotAuthorized, "not an enrolled member"};
  }
  std::int64_t expiry = now + defaultExpiry_;
  auto cert = build_certificate(orgKeys_, kU, enrollments_of(userRef), expiry);
  if (!cert.ok()) return cert.failure();
  return Issued{cert.take(), expiry};
}

ProducerAdmin::ClearanceRef ProducerAdmin::negotiate_agreement(const OrgAdmin& org,
                                                               const ServiceAgreement& agreement) {
  clearance_->register_agreement(org.id(), org.public_key(), org.implications(), agreement);
  return {clearance_->id(), clearance_->public_key()};
}

void ProducerAdmin::register_server(const ServerId& serverId, const PublicKey& serverPub) {
  clearance_->register_server(serverId, serverPub);
}

namespace {

KeyPair must_gen(std::uint8_t scheme, DetRng& rng) {
  auto pair = crypto_gen(scheme, true, rng);
  // Generation fails only on an unknown scheme byte, which is a
  // construction-time programming error, not a runtime condition.
  if (!pair.ok()) throw std::invalid_argument("unsupported key scheme");
  return pair.take();
}

}  // namespace

UserAgent::UserAgent(Uuid selfId, std::uint8_t scheme, std::uint64_t rngSeed,
                     RotationPolicy policy)
    : selfId_(selfId), scheme_(scheme), rng_(rngSeed), rotation_(policy),
      ephemeral_(must_gen(scheme_, rng_)) {}

void UserAgent::rotate_key() { ephemeral_ = must_gen(scheme_, rng_); }

void UserAgent::bind_org(OrgAdmin* admin, const std::string& userRef) {
  orgBindings_[admin->id()] = Binding{admin, userRef};
}

Status UserAgent::refresh_enrollments(const OrgId& org, std::int64_t now) {
  auto it = orgBindings_.find(org);
  if (it == orgBindings_.end()) {
    return Failure{FailureCode::UnknownOrg, "no admin binding for org"};
  }
  // The candidate key is generated up front so the new certificate binds
  // it, but nothing is swapped in until the org actually issues: a
  // refused refresh must leave the old key and certificate usable.
  KeyPair next = rotation_ != RotationPolicy::Never ? must_gen(scheme_, rng_) : ephemeral_;
  auto issued = it->second.admin->issue_enrollment(it->second.userRef, next.pub(), now);
  if (!issued.ok()) return issued.failure();
  ephemeral_ = std::move(next);
  certificates_[org] = CertRecord{issued.value().certificate, issued.value().expiry};
  return Status{};
}

void UserAgent::install_certificate(const OrgId& org, EnrollmentCertificate cert,
                                    std::int64_t expiry) {
  certificates_[org] = CertRecord{std::move(cert), expiry};
}

bool UserAgent::has_certificate(const OrgId& org) const {
  return certificates_.count(org) != 0;
}

std::optional<std::int64_t> UserAgent::certificate_expiry(const OrgId& org) const {
  auto it = certificates_.find(org);
  if (it == certificates_.end()) return std::nullopt;
  return it->second.expiry;
}

void UserAgent::learn_server(const ServerId& serverId, PublicKey serverPub, Uuid clearanceId,
                             PublicKey clearancePub) {
  knownServers_[serverId] = ServerRef{std::move(serverPub), clearanceId, std::move(clearancePub)};
}

void UserAgent::attach(Network& net) {
  net.register_endpoint(selfId_,
                        [this](const Uuid& caller, const Bytes& wire) {
                          return confirm_endpoint(caller, wire);
                        });
}

Bytes UserAgent::confirm_endpoint(const Uuid& caller, const Bytes& wire) {
  auto askMsg = canonical_decode<ConfirmAsk>(wire);
  if (!askMsg.ok()) {
    return canonical_encode(FailureMessage{askMsg.failure().code, askMsg.failure().detail});
  }
  auto ask = open_confirm_ask(ephemeral_, askMsg.value());
  if (!ask.ok()) {
    return canonical_encode(FailureMessage{ask.failure().code, ask.failure().detail});
  }
  ++confirmAsksSeen_;

  auto server = knownServers_.find(caller);
  if (server == knownServers_.end()) {
    return canonical_encode(FailureMessage{FailureCode::NotAuthorized, "unknown asking server"});
  }

  // No decision hook active means no request of ours is in flight, so
  // whatever prompted this ask is declined.
  bool approved = false;
  if (activeConfirm_) {
    approved = activeConfirm_(ask.value().unit, ask.value().amountText, ask.value().description);
  }

  ConfirmReplyPayload reply;
  reply.askId = ask.value().askId;
  reply.approved = approved;
  auto sealed = build_confirm_reply(server->second.serverPub, reply, rng_);
  if (!sealed.ok()) {
    return canonical_encode(FailureMessage{sealed.failure().code, sealed.failure().detail});
  }
  return canonical_encode(sealed.value());
}

Result<Bytes> UserAgent::request_service(Network& net, const ServerId& serverId,
                                         const Token& resource, ParamMap params, std::int64_t now,
                                         ConfirmDecision confirm) {
  auto server = knownServers_.find(serverId);
  if (server == knownServers_.end()) {
    return Failure{FailureCode::NotAuthorized, "unknown server"};
  }

  if (rotation_ == RotationPolicy::EveryRequest) {
    // Fresh key per request; every bound org re-certifies the new key.
    // A refused refresh is not fatal here: the old certificate stays in
    // play until it expires.
    for (const auto& [org, binding] : orgBindings_) {
      (void)binding;
      (void)refresh_enrollments(org, now);
    }
  }

  // Lowest org id with an unexpired certificate wins; deterministic and
  // independent of insertion order. The local expiry hint is advisory:
  // with nothing fresh the best expired certificate is still presented,
  // and the clearance center gives the authoritative Expired verdict.
  const CertRecord* chosen = nullptr;
  OrgId chosenOrg;
  for (const auto& [org, record] : certificates_) {
    if (record.expiry < now) continue;
    chosen = &record;
    chosenOrg = org;
    break;
  }
  if (chosen == nullptr) {
    for (const auto& [org, record] : certificates_) {
      if (chosen == nullptr || record.expiry > chosen->expiry) {
        chosen = &record;
        chosenOrg = org;
      }
    }
  }
  if (chosen == nullptr) {
    return Failure{FailureCode::NotAuthorized, "no certificate held"};
  }

  RequestInputs in;
  in.ephemeral = &ephemeral_;
  in.certificate = &chosen->certificate;
  in.org = chosenOrg;
  in.serverPub = server->second.serverPub;
  in.clearancePub = server->second.clearancePub;
  in.resource = resource;
  in.params = std::move(params);
  in.now = now;

  auto envelope = build_request(in, rng_);
  if (!envelope.ok()) return envelope.failure();

  activeConfirm_ = std::move(confirm);
  std::optional<Bytes> replyWire = net.call(selfId_, serverId, canonical_encode(envelope.value()));
  activeConfirm_ = nullptr;

  if (!replyWire) return Failure{FailureCode::NotAuthorized, "no reply from server"};

  auto answer = canonical_decode<Answer>(*replyWire);
  if (answer.ok()) return open_answer(ephemeral_, answer.value());

  auto failure = canonical_decode<FailureMessage>(*replyWire);
  if (failure.ok()) return Failure{failure.value().code, failure.value().detail};
  return Failure{FailureCode::Malformed, "unreadable reply"};
}

}  // namespace usher
