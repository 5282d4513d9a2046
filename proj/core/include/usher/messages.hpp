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

#ifndef USHER_MESSAGES_HPP
#define USHER_MESSAGES_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/codec.hpp"
#include "usher/crypto.hpp"
#include "usher/result.hpp"
#include "usher/tokens.hpp"

namespace usher {

// The full request a user sends nests four layers:
//
//   certificate      sign(org)       over (k_U, enrollments, expiry)
//   claim            sign(ephemeral) over (org id, certificate)
//   clearance blob   seal(C)         over (k_U, claim)
//   envelope         seal(S)         over (sign(ephemeral) over tau,
//                                          resource, params, clearance blob)
//
// The server opens only the outer layer; the clearance blob rides through
// to C opaque, which is what keeps enrollments away from S.

struct Tau {
  std::int64_t timestamp = 0;
  std::array<std::uint8_t, 16> nonce{};

  static constexpr Tag kTag = Tag::Tau;
  void encode_body(Encoder& e) const;
  static Tau decode_body(Decoder& d);

  friend bool operator==(const Tau&, const Tau&) = default;
};

Tau build_tau(std::int64_t now, DetRng& rng);

struct CertificatePayload {
  PublicKey kU;
  std::vector<Enrollment> enrollments;  // canonical set order
  std::int64_t expiry = 0;

  static constexpr Tag kTag = Tag::CertificatePayload;
  void encode_body(Encoder& e) const;
  static CertificatePayload decode_body(Decoder& d);

  friend bool operator==(const CertificatePayload&, const CertificatePayload&) = default;
};

struct EnrollmentCertificate {
  SignedBlob sig;  // payload: canonical CertificatePayload

  static constexpr Tag kTag = Tag::EnrollmentCertificate;
  void encode_body(Encoder& e) const { sig.encode_body(e); }
  static EnrollmentCertificate decode_body(Decoder& d) { return {SignedBlob::decode_body(d)}; }

  friend bool operator==(const EnrollmentCertificate&, const EnrollmentCertificate&) = default;
};

Result<EnrollmentCertificate> build_certificate(const KeyPair& orgKeys, const PublicKey& kU,
                                                std::vector<Enrollment> enrollments,
                                                std::int64_t expiry);
// Signature and structure only; expiry is the caller's check.
Result<CertificatePayload> verify_certificate(const PublicKey& orgPub,
                                              const EnrollmentCertificate& cert);

struct ClearanceClaimPayload {
  Uuid org;
  EnrollmentCertificate certificate;

  static constexpr Tag kTag = Tag::ClearanceClaimPayload;
  void encode_body(Encoder& e) const;
  static ClearanceClaimPayload decode_body(Decoder& d);
};

struct ClearanceBlobPayload {
  PublicKey kU;
  SignedBlob claim;  // ephemeral-signed canonical ClearanceClaimPayload

  static constexpr Tag kTag = Tag::ClearanceBlobPayload;
  void encode_body(Encoder& e) const;
  static ClearanceBlobPayload decode_body(Decoder& d);
};

using ParamMap = std::map<Bytes, Bytes, LenLexLess>;

struct RequestPayload {
  SignedBlob tauSigned;  // ephemeral-signed canonical Tau
  Token resource;
  ParamMap params;
  SealedBlob clearance;  // sealed to C: canonical ClearanceBlobPayload

  static constexpr Tag kTag = Tag::RequestPayload;
  void encode_body(Encoder& e) const;
  static RequestPayload decode_body(Decoder& d);
};

struct RequestEnvelope {
  SealedBlob body;  // sealed to S: canonical RequestPayload

  static constexpr Tag kTag = Tag::RequestEnvelope;
  void encode_body(Encoder& e) const { body.encode_body(e); }
  static RequestEnvelope decode_body(Decoder& d) { return {SealedBlob::decode_body(d)}; }
};

struct RequestInputs {
  const KeyPair* ephemeral = nullptr;
  const EnrollmentCertificate* certificate = nullptr;
  Uuid org;
  PublicKey serverPub;
  PublicKey clearancePub;
  Token resource;
  ParamMap params;
  std::int64_t now = 0;
};

Result<RequestEnvelope> build_request(const RequestInputs& in, DetRng& rng);

Result<RequestPayload> parse_request(const KeyPair& serverKeys, const RequestEnvelope& env);

struct ClearanceRequestPayload {
  Uuid serverId;
  SealedBlob blob;               // the clearance blob, forwarded untouched
  std::vector<Token> candidates;  // canonical set order

  static constexpr Tag kTag = Tag::ClearanceRequestPayload;
  void encode_body(Encoder& e) const;
  static ClearanceRequestPayload decode_body(Decoder& d);
};

struct ClearanceRequest {
  SealedBlob body;  // sealed to C: canonical SignedBlob (server key) over payload

  static constexpr Tag kTag = Tag::ClearanceRequest;
  void encode_body(Encoder& e) const { body.encode_body(e); }
  static ClearanceRequest decode_body(Decoder& d) { return {SealedBlob::decode_body(d)}; }
};

Result<ClearanceRequest> build_clearance_request(const KeyPair& serverKeys, const Uuid& serverId,
                                                 SealedBlob blob, std::vector<Token> candidates,
                                                 const PublicKey& clearancePub, DetRng& rng);

// Verifies the server signature against the registry. Unknown server ids
// and signature mismatches both come back BadSignature.
Result<ClearanceRequestPayload> parse_clearance_request(
    const KeyPair& clearanceKeys, const std::map<Uuid, PublicKey>& serverRegistry,
    const ClearanceRequest& msg);

struct ClearanceGranted {
  Ticket ticket;
  std::vector<Modifier> effectiveModifiers;  // grant-edge then ticket layer, live debit values
  PublicKey kUEcho;
  std::optional<Token> debitCorrelator;
};

struct ClearanceDenied {
  FailureCode code = FailureCode::NotAuthorized;
  std::string detail;
};

struct ClearanceDecisionPayload {
  std::variant<ClearanceGranted, ClearanceDenied> v;

  static constexpr Tag kTag = Tag::ClearanceDecisionPayload;
  void encode_body(Encoder& e) const;
  static ClearanceDecisionPayload decode_body(Decoder& d);
};

struct ClearanceResponse {
  SealedBlob body;  // sealed to S: canonical SignedBlob (C key) over decision

  static constexpr Tag kTag = Tag::ClearanceResponse;
  void encode_body(Encoder& e) const { body.encode_body(e); }
  static ClearanceResponse decode_body(Decoder& d) { return {SealedBlob::decode_body(d)}; }
};

Result<ClearanceResponse> build_clearance_response(const KeyPair& clearanceKeys,
                                                   const PublicKey& serverPub,
                                                   const ClearanceDecisionPayload& decision,
                                                   DetRng& rng);

Result<ClearanceDecisionPayload> parse_clearance_response(const KeyPair& serverKeys,
                                                          const PublicKey& clearancePub,
                                                          const ClearanceResponse& msg);

struct ConfirmAskPayload {
  std::array<std::uint8_t, 16> askId{};
  std::string unit;
  std::string amountText;
  std::string description;

  static constexpr Tag kTag = Tag::ConfirmAskPayload;
  void encode_body(Encoder& e) const;
  static ConfirmAskPayload decode_body(Decoder& d);
};

struct ConfirmAsk {
  SealedBlob body;  // sealed to k_U

  static constexpr Tag kTag = Tag::ConfirmAsk;
  void encode_body(Encoder& e) const { body.encode_body(e); }
  static ConfirmAsk decode_body(Decoder& d) { return {SealedBlob::decode_body(d)}; }
};

struct ConfirmReplyPayload {
  std::array<std::uint8_t, 16> askId{};  // proves the ask was opened
  bool approved = false;

  static constexpr Tag kTag = Tag::ConfirmReplyPayload;
  void encode_body(Encoder& e) const;
  static ConfirmReplyPayload decode_body(Decoder& d);
};

struct ConfirmReply {
  SealedBlob body;  // sealed to S

  static constexpr Tag kTag = Tag::ConfirmReply;
  void encode_body(Encoder& e) const { body.encode_body(e); }
  static ConfirmReply decode_body(Decoder& d) { return {SealedBlob::decode_body(d)}; }
};

Result<ConfirmAsk> build_confirm_ask(const PublicKey& kU, const ConfirmAskPayload& payload,
                                     DetRng& rng);
Result<ConfirmAskPayload> open_confirm_ask(const KeyPair& ephemeral, const ConfirmAsk& msg);
Result<ConfirmReply> build_confirm_reply(const PublicKey& serverPub,
                                         const ConfirmReplyPayload& payload, DetRng& rng);
Result<ConfirmReplyPayload> open_confirm_reply(const KeyPair& serverKeys, const ConfirmReply& msg);

struct DebitCommitPayload {
  Uuid serverId;
  Token correlator;
  DebitAmount amount;

  static constexpr Tag kTag = Tag::DebitCommitPayload;
  void encode_body(Encoder& e) const;
  static DebitCommitPayload decode_body(Decoder& d);
};

struct DebitCommit {
  SealedBlob body;  // sealed to C: canonical SignedBlob (server key) over payload

  static constexpr Tag kTag = Tag::DebitCommit;
  void encode_body(Encoder& e) const { body.encode_body(e); }
  static DebitCommit decode_body(Decoder& d) { return {SealedBlob::decode_body(d)}; }
};

struct DebitResultPayload {
  Token correlator;
  bool proceed = false;
  // Meaningful only when proceed is false.
  FailureCode code = FailureCode::Malformed;
  std::string detail;

  static constexpr Tag kTag = Tag::DebitResultPayload;
  void encode_body(Encoder& e) const;
  static DebitResultPayload decode_body(Decoder& d);
};

struct DebitResult {
  SealedBlob body;  // sealed to S: canonical SignedBlob (C key) over payload

  static constexpr Tag kTag = Tag::DebitResult;
  void encode_body(Encoder& e) const { body.encode_body(e); }
  static DebitResult decode_body(Decoder& d) { return {SealedBlob::decode_body(d)}; }
};

Result<DebitCommit> build_debit_commit(const KeyPair& serverKeys, const DebitCommitPayload& payload,
                                       const PublicKey& clearancePub, DetRng& rng);
Result<DebitCommitPayload> parse_debit_commit(const KeyPair& clearanceKeys,
                                              const std::map<Uuid, PublicKey>& serverRegistry,
                                              const DebitCommit& msg);
Result<DebitResult> build_debit_result(const KeyPair& clearanceKeys, const PublicKey& serverPub,
                                       const DebitResultPayload& payload, DetRng& rng);
Result<DebitResultPayload> parse_debit_result(const KeyPair& serverKeys,
                                              const PublicKey& clearancePub,
                                              const DebitResult& msg);

struct Answer {
  SealedBlob body;  // sealed to k_U; plaintext is the raw answer bytes

  static constexpr Tag kTag = Tag::Answer;
  void encode_body(Encoder& e) const { body.encode_body(e); }
  static Answer decode_body(Decoder& d) { return {SealedBlob::decode_body(d)}; }
};

Result<Answer> build_answer(const PublicKey& kU, std::span<const std::uint8_t> answerBytes,
                            DetRng& rng);
Result<Bytes> open_answer(const KeyPair& ephemeral, const Answer& msg);

// Downstream failure report. Travels in the clear: before clearance the
// server has no key to seal to, and a uniform form avoids an oracle that
// distinguishes pre- from post-clearance denials.
struct FailureMessage {
  FailureCode code = FailureCode::Malformed;
  std::string detail;

  static constexpr Tag kTag = Tag::FailureMessage;
  void encode_body(Encoder& e) const;
  static FailureMessage decode_body(Decoder& d);
};

struct AclEntry {
  Token ticketToken;
  // resource -> server-layer modifiers, canonical key order
  std::vector<std::pair<Token, std::vector<Modifier>>> privileges;

  static constexpr Tag kTag = Tag::AclEntry;
  void encode_body(Encoder& e) const;
  static AclEntry decode_body(Decoder& d);

  friend bool operator==(const AclEntry&, const AclEntry&) = default;
};

struct LoadAcl {
  std::vector<AclEntry> entries;  // canonical set order
};
struct RegisterAgreement {
  Uuid orgId;
  PublicKey orgPub;
  ImplicationMap implications;
  ServiceAgreement agreement;
};
struct RegisterServer {
  Uuid serverId;
  PublicKey serverPub;
};
struct IssueEnrollment {
  EnrollmentCertificate certificate;
  std::int64_t expiry = 0;  // cleartext copy of the certificate's expiry
};

struct AdminMessage {
  std::variant<LoadAcl, RegisterAgreement, RegisterServer, IssueEnrollment> v;

  static constexpr Tag kTag = Tag::AdminMessage;
  void encode_body(Encoder& e) const;
  static AdminMessage decode_body(Decoder& d);
};

// Wire-legal failure codes (1..9). DecryptFailure stays local.
void encode_failure_code(Encoder& e, FailureCode code);
FailureCode decode_failure_code(Decoder& d);

}  // namespace usher

#endif  // USHER_MESSAGES_HPP
