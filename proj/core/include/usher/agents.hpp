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

#ifndef USHER_AGENTS_HPP
#define USHER_AGENTS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/clearance.hpp"
#include "usher/crypto.hpp"
#include "usher/messages.hpp"
#include "usher/result.hpp"
#include "usher/tokens.hpp"

namespace usher {

class Network;

// Consumer-org administrator. Defines who belongs to which membership
// groups and signs enrollment certificates over a user-presented key.
class OrgAdmin {
public:
  OrgAdmin(OrgId orgId, KeyPair orgKeys, std::int64_t defaultExpiry = 86400);

  const OrgId& id() const { return orgId_; }
  PublicKey public_key() const { return orgKeys_.pub(); }
  const ImplicationMap& implications() const { return implications_; }
  std::int64_t default_expiry() const { return defaultExpiry_; }

  void set_implications(ImplicationMap map);

  // Group membership is admin-local bookkeeping; userRef never leaves
  // this object, which is what keeps user identity off the wire.
  void add_member(const std::string& userRef, const std::vector<std::string>& groups);
  void remove_member(const std::string& userRef);
  // Removes one group from every member and drops implication edges that
  // mention it. Already issued certificates keep working until expiry.
  void delete_group(const std::string& group);

  bool is_member(const std::string& userRef) const;
  std::vector<Enrollment> enrollments_of(const std::string& userRef) const;

  struct Issued {
    EnrollmentCertificate certificate;
    std::int64_t expiry = 0;  // cleartext copy of what the signature covers
  };

  // Binds the certificate to exactly the key presented now, not to any
  // key this admin saw before.
  Result<Issued> issue_enrollment(const std::string& userRef, const PublicKey& kU,
                                  std::int64_t now) const;

  // Group token for this org: creator is the org id, value the group name.
  Token group_token(const std::string& group) const;

private:
  OrgId orgId_;
  KeyPair orgKeys_;
  std::int64_t defaultExpiry_;
  ImplicationMap implications_;
  std::map<std::string, std::set<std::string>> memberGroups_;
};

// Producer-side administrator. The only principal allowed to change what
// the clearance center will grant.
class ProducerAdmin {
public:
  explicit ProducerAdmin(ClearanceCenter* clearance) : clearance_(clearance) {}

  struct ClearanceRef {
    Uuid id;
    PublicKey publicKey;
  };

  // Registers the org's enrollment vocabulary and grants at C and hands
  // back C's identity for the org to distribute to its users.
  ClearanceRef negotiate_agreement(const OrgAdmin& org, const ServiceAgreement& agreement);

  void register_server(const ServerId& serverId, const PublicKey& serverPub);

private:
  ClearanceCenter* clearance_;
};

enum class RotationPolicy : std::uint8_t { Never, OnRefresh, EveryRequest };

// Decides a pending debit confirmation. Receives the unit-of-measure
// text, the formatted amount, and the transaction description.
using ConfirmDecision = std::function<bool(const std::string& unit, const std::string& amount,
                                           const std::string& description)>;

// The end user U. Holds the ephemeral key pair, certificates from its
// orgs, and references to servers it may call.
class UserAgent {
public:
  UserAgent(Uuid selfId, std::uint8_t scheme, std::uint64_t rngSeed,
            RotationPolicy policy = RotationPolicy::OnRefresh);

  const Uuid& id() const { return selfId_; }
  PublicKey ephemeral_public() const { return ephemeral_.pub(); }
  RotationPolicy rotation_policy() const { return rotation_; }
  void set_rotation_policy(RotationPolicy policy) { rotation_ = policy; }

  // Discards the ephemeral pair. Certificates bound to the old key stay
  // stored but will fail the key-binding check until refreshed.
  void rotate_key();

  // Associates this agent with its admin-side record so refreshes can be
  // requested later. A local trust relationship, not a wire exchange.
  void bind_org(OrgAdmin* admin, const std::string& userRef);

  // Asks the org for a fresh certificate, rotating first unless the
  // policy is Never.
  Status refresh_enrollments(const OrgId& org, std::int64_t now);

  // Replaces the ephemeral pair with one loaded from a key file, so a
  // stored certificate bound to that key keeps verifying.
  void load_ephemeral(KeyPair pair) { ephemeral_ = std::move(pair); }

  void install_certificate(const OrgId& org, EnrollmentCertificate cert, std::int64_t expiry);
  bool has_certificate(const OrgId& org) const;
  std::optional<std::int64_t> certificate_expiry(const OrgId& org) const;

  // Out-of-band server directory entry: the server's key plus the
  // clearance center that vouches for it.
  void learn_server(const ServerId& serverId, PublicKey serverPub, Uuid clearanceId,
                    PublicKey clearancePub);

  // Registers the confirmation endpoint under this agent's id.
  void attach(Network& net);

  // Drives one full request. Picks the lowest-id org holding a live
  // certificate, builds the envelope, sends it, and opens the answer.
  // confirm decides any debit confirmation that arrives mid-call; absent
  // means decline.
  Result<Bytes> request_service(Network& net, const ServerId& serverId, const Token& resource,
                                ParamMap params, std::int64_t now,
                                ConfirmDecision confirm = nullptr);

  std::size_t confirm_asks_seen() const { return confirmAsksSeen_; }

private:
  struct CertRecord {
    EnrollmentCertificate certificate;
    std::int64_t expiry = 0;
  };
  struct ServerRef {
    PublicKey serverPub;
    Uuid clearanceId;
    PublicKey clearancePub;
  };

  Bytes confirm_endpoint(const Uuid& caller, const Bytes& wire);

  Uuid selfId_;
  std::uint8_t scheme_;
  DetRng rng_;
  RotationPolicy rotation_;
  KeyPair ephemeral_;
  std::map<OrgId, CertRecord> certificates_;
  std::map<ServerId, ServerRef> knownServers_;
  struct Binding {
    OrgAdmin* admin = nullptr;
    std::string userRef;
  };
  std::map<OrgId, Binding> orgBindings_;
  ConfirmDecision activeConfirm_;
  std::size_t confirmAsksSeen_ = 0;
};

}  // namespace usher

#endif  // USHER_AGENTS_HPP
