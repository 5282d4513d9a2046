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

#include "usher/messages.hpp"

#include <algorithm>

namespace usher {

namespace {

void encode_raw16(Encoder& e, const std::array<std::uint8_t, 16>& a) {
  e.raw(std::span<const std::uint8_t>(a.data(), a.size()));
}

std::array<std::uint8_t, 16> decode_raw16(Decoder& d) {
  d.need(16);
  std::array<std::uint8_t, 16> a;
  for (auto& b : a) b = d.u8();
  return a;
}

void encode_modifier_list(Encoder& e, const std::vector<Modifier>& mods) {
  e.u32(static_cast<std::uint32_t>(mods.size()));
  for (const Modifier& m : mods) m.encode_body(e);
}

std::vector<Modifier> decode_modifier_list(Decoder& d) {
  std::uint32_t n = d.u32();
  std::vector<Modifier> mods;
  for (std::uint32_t i = 0; i < n; ++i) mods.push_back(Modifier::decode_body(d));
  return mods;
}

// Seal canonical bytes of `payload` to `recipient`.
template <typename T>
Result<SealedBlob> seal_value(const PublicKey& recipient, const T& payload, DetRng& rng) {
  return crypto_seal(recipient, canonical_encode(payload), rng);
}

// Open a seal and decode the expected type. DecryptFailure maps to
// Malformed: a message this principal cannot open is, to it, garbage.
template <typename T>
Result<T> open_value(const KeyPair& recipient, const SealedBlob& blob) {
  Result<Bytes> plain = crypto_open(recipient, blob);
  if (!plain.ok()) return Failure(FailureCode::Malformed, "seal did not open");
  return canonical_decode<T>(plain.value());
}

// Sign canonical bytes of `payload`, then seal the whole SignedBlob.
template <typename T>
Result<SealedBlob> sign_then_seal(const KeyPair& signer, const PublicKey& recipient,
                                  const T& payload, DetRng& rng) {
  Result<SignedBlob> signedBlob = crypto_sign(signer, canonical_encode(payload));
  if (!signedBlob.ok()) return signedBlob.failure();
  return seal_value(recipient, signedBlob.value(), rng);
}

// Open, check the signature under `signer`, decode the payload.
template <typename T>
Result<T> open_verify(const KeyPair& recipient, const PublicKey& signer, const SealedBlob& blob) {
  Result<SignedBlob> inner = open_value<SignedBlob>(recipient, blob);
  if (!inner.ok()) return inner.failure();
  if (!crypto_verify(signer, inner.value()))
    return Failure(FailureCode::BadSignature, "signature check failed");
  return canonical_decode<T>(inner.value().payload);
}

}  // namespace

void encode_failure_code(Encoder& e, FailureCode code) {
  e.u8(static_cast<std::uint8_t>(code));
}

FailureCode decode_failure_code(Decoder& d) {
  std::uint8_t b = d.u8();
  if (b < 1 || b > 9) throw CodecError("bad failure code");
  return static_cast<FailureCode>(b);
}

void Tau::encode_body(Encoder& e) const {
  e.i64(timestamp);
  encode_raw16(e, nonce);
}

Tau Tau::decode_body(Decoder& d) {
  Tau t;
  t.timestamp = d.i64();
  t.nonce = decode_raw16(d);
  return t;
}

Tau build_tau(std::int64_t now, DetRng& rng) {
  Tau t;
  t.timestamp = now;
  Bytes n = rng.bytes(t.nonce.size());
  std::copy(n.begin(), n.end(), t.nonce.begin());
  return t;
}

void CertificatePayload::encode_body(Encoder& e) const {
  kU.encode_body(e);
  e.sorted_set(enrollments.begin(), enrollments.end(),
               [](Encoder& sub, const Enrollment& en) { en.encode_body(sub); });
  e.i64(expiry);
}

CertificatePayload CertificatePayload::decode_body(Decoder& d) {
  CertificatePayload p;
  p.kU = PublicKey::decode_body(d);
  d.sorted_set([&p](Decoder& sub) { p.enrollments.push_back(Enrollment::decode_body(sub)); });
  p.expiry = d.i64();
  return p;
}

Result<EnrollmentCertificate> build_certificate(const KeyPair& orgKeys, const PublicKey& kU,
                                                std::vector<Enrollment> enrollments,
                                                std::int64_t expiry) {
  CertificatePayload payload;
  payload.kU = kU;
  payload.enrollments = std::move(enrollments);
  payload.expiry = expiry;
  Result<SignedBlob> sig = crypto_sign(orgKeys, canonical_encode(payload));
  if (!sig.ok()) return sig.failure();
  return EnrollmentCertificate{sig.take()};
}

Result<CertificatePayload> verify_certificate(const PublicKey& orgPub,
                                              const EnrollmentCertificate& cert) {
  if (!crypto_verify(orgPub, cert.sig))
    return Failure(FailureCode::BadSignature, "certificate signature");
  return canonical_decode<CertificatePayload>(cert.sig.payload);
}

void ClearanceClaimPayload::encode_body(Encoder& e) const {
  e.uuid(org);
  certificate.encode_body(e);
}

ClearanceClaimPayload ClearanceClaimPayload::decode_body(Decoder& d) {
  ClearanceClaimPayload p;
  p.org = d.uuid();
  p.certificate = EnrollmentCertificate::decode_body(d);
  return p;
}

void ClearanceBlobPayload::encode_body(Encoder& e) const {
  kU.encode_body(e);
  claim.encode_body(e);
}

ClearanceBlobPayload ClearanceBlobPayload::decode_body(Decoder& d) {
  ClearanceBlobPayload p;
  p.kU = PublicKey::decode_body(d);
  p.claim = SignedBlob::decode_body(d);
  return p;
}

void RequestPayload::encode_body(Encoder& e) const {
  tauSigned.encode_body(e);
  resource.encode_body(e);
  e.sorted_set(params.begin(), params.end(), [](Encoder& sub, const auto& kv) {
    sub.bytes(kv.first);
    sub.bytes(kv.second);
  });
  clearance.encode_body(e);
}

RequestPayload RequestPayload::decode_body(Decoder& d) {
  RequestPayload p;
  p.tauSigned = SignedBlob::decode_body(d);
  p.resource = Token::decode_body(d);
  Bytes key;
  d.sorted_map([&](Decoder& sub) { key = sub.bytes(); },
               [&](Decoder& sub) { p.params[key] = sub.bytes(); });
  p.clearance = SealedBlob::decode_body(d);
  return p;
}

Result<RequestEnvelope> build_request(const RequestInputs& in, DetRng& rng) {
  if (!in.ephemeral || !in.certificate)
    return Failure(FailureCode::Malformed, "no certificate held");

  Tau tau = build_tau(in.now, rng);
  Result<SignedBlob> tauSigned = crypto_sign(*in.ephemeral, canonical_encode(tau));
  if (!tauSigned.ok()) return tauSigned.failure();

  ClearanceClaimPayload claim{in.org, *in.certificate};
  Result<SignedBlob> claimSigned = crypto_sign(*in.ephemeral, canonical_encode(claim));
  if (!claimSigned.ok()) return claimSigned.failure();

  ClearanceBlobPayload blobPayload{in.ephemeral->pub(), claimSigned.take()};
  Result<SealedBlob> clearance = seal_value(in.clearancePub, blobPayload, rng);
  if (!clearance.ok()) return clearance.failure();

  RequestPayload payload;
  payload.tauSigned = tauSigned.take();
  payload.resource = in.resource;
  payload.params = in.params;
  payload.clearance = clearance.take();

  Result<SealedBlob> sealed = seal_value(in.serverPub, payload, rng);
  if (!sealed.ok()) return sealed.failure();
  return RequestEnvelope{sealed.take()};
}

Result<RequestPayload> parse_request(const KeyPair& serverKeys, const RequestEnvelope& env) {
  return open_value<RequestPayload>(serverKeys, env.body);
}

void ClearanceRequestPayload::encode_body(Encoder& e) const {
  e.uuid(serverId);
  blob.encode_body(e);
  e.sorted_set(candidates.begin(), candidates.end(),
               [](Encoder& sub, const Token& t) { t.encode_body(sub); });
}

ClearanceRequestPayload ClearanceRequestPayload::decode_body(Decoder& d) {
  ClearanceRequestPayload p;
  p.serverId = d.uuid();
  p.blob = SealedBlob::decode_body(d);
  d.sorted_set([&p](Decoder& sub) { p.candidates.push_back(Token::decode_body(sub)); });
  return p;
}

Result<ClearanceRequest> build_clearance_request(const KeyPair& serverKeys, const Uuid& serverId,
                                                 SealedBlob blob, std::vector<Token> candidates,
                                                 const PublicKey& clearancePub, DetRng& rng) {
  ClearanceRequestPayload payload;
  payload.serverId = serverId;
  payload.blob = std::move(blob);
  payload.candidates = std::move(candidates);
  Result<SealedBlob> sealed = sign_then_seal(serverKeys, clearancePub, payload, rng);
  if (!sealed.ok()) return sealed.failure();
  return ClearanceRequest{sealed.take()};
}

Result<ClearanceRequestPayload> parse_clearance_request(
    const KeyPair& clearanceKeys, const std::map<Uuid, PublicKey>& serverRegistry,
    const ClearanceRequest& msg) {
  Result<SignedBlob> inner = open_value<SignedBlob>(clearanceKeys, msg.body);
  if (!inner.ok()) return inner.failure();
  Result<ClearanceRequestPayload> payload =
      canonical_decode<ClearanceRequestPayload>(inner.value().payload);
  if (!payload.ok()) return payload.failure();
  auto it = serverRegistry.find(payload.value().serverId);
  if (it == serverRegistry.end())
    return Failure(FailureCode::BadSignature, "server not registered");
  if (!crypto_verify(it->second, inner.value()))
    return Failure(FailureCode::BadSignature, "server signature");
  return payload;
}

namespace {
constexpr std::uint8_t kDecisionGranted = 0x01;
constexpr std::uint8_t kDecisionDenied = 0x02;
}  // namespace

void ClearanceDecisionPayload::encode_body(Encoder& e) const {
  if (const auto* g = std::get_if<ClearanceGranted>(&v)) {
    e.u8(kDecisionGranted);
    g->ticket.encode_body(e);
    encode_modifier_list(e, g->effectiveModifiers);
    g->kUEcho.encode_body(e);
    if (g->debitCorrelator) {
      e.u8(0x01);
      g->debitCorrelator->encode_body(e);
    } else {
      e.u8(0x00);
    }
  } else {
    const auto& den = std::get<ClearanceDenied>(v);
    e.u8(kDecisionDenied);
    encode_failure_code(e, den.code);
    e.str(den.detail);
  }
}

ClearanceDecisionPayload ClearanceDecisionPayload::decode_body(Decoder& d) {
  ClearanceDecisionPayload p;
  switch (d.u8()) {
    case kDecisionGranted: {
      ClearanceGranted g;
      g.ticket = Ticket::decode_body(d);
      g.effectiveModifiers = decode_modifier_list(d);
      g.kUEcho = PublicKey::decode_body(d);
      switch (d.u8()) {
        case 0x00:
          break;
        case 0x01:
          g.debitCorrelator = Token::decode_body(d);
          break;
        default:
          throw CodecError("bad presence byte");
      }
      p.v = std::move(g);
      break;
    }
    case kDecisionDenied: {
      ClearanceDenied den;
      den.code = decode_failure_code(d);
      den.detail = d.str();
      p.v = std::move(den);
      break;
    }
    default:
      throw CodecError("bad decision kind");
  }
  return p;
}

Result<ClearanceResponse> build_clearance_response(const KeyPair& clearanceKeys,
                                                   const PublicKey& serverPub,
                                                   const ClearanceDecisionPayload& decision,
                                                   DetRng& rng) {
  Result<SealedBlob> sealed = sign_then_seal(clearanceKeys, serverPub, decision, rng);
  if (!sealed.ok()) return sealed.failure();
  return ClearanceResponse{sealed.take()};
}

Result<ClearanceDecisionPayload> parse_clearance_response(const KeyPair& serverKeys,
                                                          const PublicKey& clearancePub,
                                                          const ClearanceResponse& msg) {
  return open_verify<ClearanceDecisionPayload>(serverKeys, clearancePub, msg.body);
}

void ConfirmAskPayload::encode_body(Encoder& e) const {
  encode_raw16(e, askId);
  e.str(unit);
  e.str(amountText);
  e.str(description);
}

ConfirmAskPayload ConfirmAskPayload::decode_body(Decoder& d) {
  ConfirmAskPayload p;
  p.askId = decode_raw16(d);
  p.unit = d.str();
  p.amountText = d.str();
  p.description = d.str();
  return p;
}

void ConfirmReplyPayload::encode_body(Encoder& e) const {
  encode_raw16(e, askId);
  e.boolean(approved);
}

ConfirmReplyPayload ConfirmReplyPayload::decode_body(Decoder& d) {
  ConfirmReplyPayload p;
  p.askId = decode_raw16(d);
  p.approved = d.boolean();
  return p;
}

Result<ConfirmAsk> build_confirm_ask(const PublicKey& kU, const ConfirmAskPayload& payload,
                                     DetRng& rng) {
  Result<SealedBlob> sealed = seal_value(kU, payload, rng);
  if (!sealed.ok()) return sealed.failure();
  return ConfirmAsk{sealed.take()};
}

Result<ConfirmAskPayload> open_confirm_ask(const KeyPair& ephemeral, const ConfirmAsk& msg) {
  return open_value<ConfirmAskPayload>(ephemeral, msg.body);
}

Result<ConfirmReply> build_confirm_reply(const PublicKey& serverPub,
                                         const ConfirmReplyPayload& payload, DetRng& rng) {
  Result<SealedBlob> sealed = seal_value(serverPub, payload, rng);
  if (!sealed.ok()) return sealed.failure();
  return ConfirmReply{sealed.take()};
}

Result<ConfirmReplyPayload> open_confirm_reply(const KeyPair& serverKeys, const ConfirmReply& msg) {
  return open_value<ConfirmReplyPayload>(serverKeys, msg.body);
}

void DebitCommitPayload::encode_body(Encoder& e) const {
  e.uuid(serverId);
  correlator.encode_body(e);
  e.boolean(amount.decimal);
  e.i64(amount.raw);
}

DebitCommitPayload DebitCommitPayload::decode_body(Decoder& d) {
  DebitCommitPayload p;
  p.serverId = d.uuid();
  p.correlator = Token::decode_body(d);
  p.amount.decimal = d.boolean();
  p.amount.raw = d.i64();
  if (p.amount.raw <= 0) throw CodecError("commit amount");
  return p;
}

Result<DebitCommit> build_debit_commit(const KeyPair& serverKeys, const DebitCommitPayload& payload,
                                       const PublicKey& clearancePub, DetRng& rng) {
  Result<SealedBlob> sealed = sign_then_seal(serverKeys, clearancePub, payload, rng);
  if (!sealed.ok()) return sealed.failure();
  return DebitCommit{sealed.take()};
}

Result<DebitCommitPayload> parse_debit_commit(const KeyPair& clearanceKeys,
                                              const std::map<Uuid, PublicKey>& serverRegistry,
                                              const DebitCommit& msg) {
  Result<SignedBlob> inner = open_value<SignedBlob>(clearanceKeys, msg.body);
  if (!inner.ok()) return inner.failure();
  Result<DebitCommitPayload> payload = canonical_decode<DebitCommitPayload>(inner.value().payload);
  if (!payload.ok()) return payload.failure();
  auto it = serverRegistry.find(payload.value().serverId);
  if (it == serverRegistry.end())
    return Failure(FailureCode::BadSignature, "server not registered");
  if (!crypto_verify(it->second, inner.value()))
    return Failure(FailureCode::BadSignature, "server signature");
  return payload;
}

void DebitResultPayload::encode_body(Encoder& e) const {
  correlator.encode_body(e);
  e.boolean(proceed);
  if (!proceed) {
    encode_failure_code(e, code);
    e.str(detail);
  }
}

DebitResultPayload DebitResultPayload::decode_body(Decoder& d) {
  DebitResultPayload p;
  p.correlator = Token::decode_body(d);
  p.proceed = d.boolean();
  if (!p.proceed) {
    p.code = decode_failure_code(d);
    p.detail = d.str();
  }
  return p;
}

Result<DebitResult> build_debit_result(const KeyPair& clearanceKeys, const PublicKey& serverPub,
                                       const DebitResultPayload& payload, DetRng& rng) {
  Result<SealedBlob> sealed = sign_then_seal(clearanceKeys, serverPub, payload, rng);
  if (!sealed.ok()) return sealed.failure();
  return DebitResult{sealed.take()};
}

Result<DebitResultPayload> parse_debit_result(const KeyPair& serverKeys,
                                              const PublicKey& clearancePub,
                                              const DebitResult& msg) {
  return open_verify<DebitResultPayload>(serverKeys, clearancePub, msg.body);
}

Result<Answer> build_answer(const PublicKey& kU, std::span<const std::uint8_t> answerBytes,
                            DetRng& rng) {
  Result<SealedBlob> sealed = crypto_seal(kU, answerBytes, rng);
  if (!sealed.ok()) return sealed.failure();
  return Answer{sealed.take()};
}

Result<Bytes> open_answer(const KeyPair& ephemeral, const Answer& msg) {
  return crypto_open(ephemeral, msg.body);
}

void FailureMessage::encode_body(Encoder& e) const {
  encode_failure_code(e, code);
  e.str(detail);
}

FailureMessage FailureMessage::decode_body(Decoder& d) {
  FailureMessage f;
  f.code = decode_failure_code(d);
  f.detail = d.str();
  return f;
}

void AclEntry::encode_body(Encoder& e) const {
  ticketToken.encode_body(e);
  e.sorted_set(privileges.begin(), privileges.end(), [](Encoder& sub, const auto& kv) {
    kv.first.encode_body(sub);
    encode_modifier_list(sub, kv.second);
  });
}

AclEntry AclEntry::decode_body(Decoder& d) {
  AclEntry a;
  a.ticketToken = Token::decode_body(d);
  d.sorted_map(
      [&a](Decoder& sub) { a.privileges.emplace_back(Token::decode_body(sub), std::vector<Modifier>{}); },
      [&a](Decoder& sub) { a.privileges.back().second = decode_modifier_list(sub); });
  return a;
}

namespace {
constexpr std::uint8_t kAdminLoadAcl = 0x01;
constexpr std::uint8_t kAdminRegisterAgreement = 0x02;
constexpr std::uint8_t kAdminRegisterServer = 0x03;
constexpr std::uint8_t kAdminIssueEnrollment = 0x04;
}  // namespace

void AdminMessage::encode_body(Encoder& e) const {
  if (const auto* acl = std::get_if<LoadAcl>(&v)) {
    e.u8(kAdminLoadAcl);
    e.sorted_set(acl->entries.begin(), acl->entries.end(),
                 [](Encoder& sub, const AclEntry& entry) { entry.encode_body(sub); });
  } else if (const auto* ra = std::get_if<RegisterAgreement>(&v)) {
    e.u8(kAdminRegisterAgreement);
    e.uuid(ra->orgId);
    ra->orgPub.encode_body(e);
    ra->implications.encode_body(e);
    ra->agreement.encode_body(e);
  } else if (const auto* rs = std::get_if<RegisterServer>(&v)) {
    e.u8(kAdminRegisterServer);
    e.uuid(rs->serverId);
    rs->serverPub.encode_body(e);
  } else {
    const auto& ie = std::get<IssueEnrollment>(v);
    e.u8(kAdminIssueEnrollment);
    ie.certificate.encode_body(e);
    e.i64(ie.expiry);
  }
}

AdminMessage AdminMessage::decode_body(Decoder& d) {
  AdminMessage m;
  switch (d.u8()) {
    case kAdminLoadAcl: {
      LoadAcl acl;
      d.sorted_set([&acl](Decoder& sub) { acl.entries.push_back(AclEntry::decode_body(sub)); });
      m.v = std::move(acl);
      break;
    }
    case kAdminRegisterAgreement: {
      RegisterAgreement ra;
      ra.orgId = d.uuid();
      ra.orgPub = PublicKey::decode_body(d);
      ra.implications = ImplicationMap::decode_body(d);
      ra.agreement = ServiceAgreement::decode_body(d);
      m.v = std::move(ra);
      break;
    }
    case kAdminRegisterServer: {
      RegisterServer rs;
      rs.serverId = d.uuid();
      rs.serverPub = PublicKey::decode_body(d);
      m.v = std::move(rs);
      break;
    }
    case kAdminIssueEnrollment: {
      IssueEnrollment ie;
      ie.certificate = EnrollmentCertificate::decode_body(d);
      ie.expiry = d.i64();
      m.v = std::move(ie);
      break;
    }
    default:
      throw CodecError("bad admin kind");
  }
  return m;
}

}  // namespace usher
