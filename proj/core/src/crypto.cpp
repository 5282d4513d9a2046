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

#include "usher/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

namespace usher {

namespace {

void ensure_sodium() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (sodium_init() < 0) std::abort();
  });
}

void encode_opt_token(Encoder& e, const std::optional<Token>& t) {
  if (t) {
    e.u8(0x01);
    t->encode_body(e);
  } else {
    e.u8(0x00);
  }
}

std::optional<Token> decode_opt_token(Decoder& d) {
  switch (d.u8()) {
    case 0x00:
      return std::nullopt;
    case 0x01:
      return Token::decode_body(d);
    default:
      throw CodecError("bad presence byte");
  }
}

Bytes blake2b(std::span<const std::uint8_t> in, std::size_t outLen) {
  Bytes out(outLen);
  crypto_generichash(out.data(), outLen, in.data(), in.size(), nullptr, 0);
  return out;
}

bool valid_key_lengths(const KeyPair& kp) {
  if (kp.scheme == kSchemeReal)
    return kp.publicKey.size() == crypto_sign_PUBLICKEYBYTES &&
           kp.privateKey.size() == crypto_sign_SECRETKEYBYTES;
  if (kp.scheme == kSchemeMarker)
    return kp.publicKey.size() == kMarkerKeyLen && kp.privateKey.size() == kMarkerKeyLen;
  return false;
}

bool valid_pub_length(const PublicKey& pk) {
  if (pk.scheme == kSchemeReal) return pk.bytes.size() == crypto_sign_PUBLICKEYBYTES;
  if (pk.scheme == kSchemeMarker) return pk.bytes.size() == kMarkerKeyLen;
  return false;
}

// Marker signature: "MS" + signer public key + 32-byte keyed-less hash of
// (key || payload). Cryptographically worthless on purpose; the frame
// exposes who "signed" so scanners can attribute regions.
Bytes marker_sig(const Bytes& pub, std::span<const std::uint8_t> payload) {
  Bytes sig;
  sig.push_back(kMarkerSig0);
  sig.push_back(kMarkerSig1);
  sig.insert(sig.end(), pub.begin(), pub.end());
  Bytes material(pub);
  material.insert(material.end(), payload.begin(), payload.end());
  Bytes digest = blake2b(material, 32);
  sig.insert(sig.end(), digest.begin(), digest.end());
  return sig;
}

}  // namespace

void PublicKey::encode_body(Encoder& e) const {
  e.u8(scheme);
  e.bytes(bytes);
}

PublicKey PublicKey::decode_body(Decoder& d) {
  PublicKey pk;
  pk.scheme = d.u8();
  pk.bytes = d.bytes();
  if (!valid_pub_length(pk)) throw CodecError("bad public key");
  return pk;
}

void KeyPair::encode_body(Encoder& e) const {
  e.bytes(publicKey);
  e.bytes(privateKey);
  e.u8(scheme);
  e.boolean(ephemeral);
}

KeyPair KeyPair::decode_body(Decoder& d) {
  KeyPair kp;
  kp.publicKey = d.bytes();
  kp.privateKey = d.bytes();
  kp.scheme = d.u8();
  kp.ephemeral = d.boolean();
  if (!valid_key_lengths(kp)) throw CodecError("bad key pair");
  return kp;
}

void SignedBlob::encode_body(Encoder& e) const {
  e.bytes(payload);
  e.bytes(signature);
  encode_opt_token(e, signerHint);
}

SignedBlob SignedBlob::decode_body(Decoder& d) {
  SignedBlob b;
  b.payload = d.bytes();
  b.signature = d.bytes();
  b.signerHint = decode_opt_token(d);
  return b;
}

void SealedBlob::encode_body(Encoder& e) const {
  e.bytes(ciphertext);
  encode_opt_token(e, recipientHint);
}

SealedBlob SealedBlob::decode_body(Decoder& d) {
  SealedBlob b;
  b.ciphertext = d.bytes();
  b.recipientHint = decode_opt_token(d);
  return b;
}

Result<KeyPair> crypto_gen(std::uint8_t scheme, bool ephemeral, DetRng& rng) {
  ensure_sodium();
  KeyPair kp;
  kp.scheme = scheme;
  kp.ephemeral = ephemeral;
  if (scheme == kSchemeReal) {
    Bytes seed = rng.bytes(crypto_sign_SEEDBYTES);
    kp.publicKey.resize(crypto_sign_PUBLICKEYBYTES);
    kp.privateKey.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.publicKey.data(), kp.privateKey.data(), seed.data());
    return kp;
  }
  if (scheme == kSchemeMarker) {
    // Public equals private: the scanner learns every principal's "key"
    // from public material alone.
    kp.privateKey = rng.bytes(kMarkerKeyLen);
    kp.publicKey = kp.privateKey;
    return kp;
  }
  return Failure(FailureCode::Malformed, "unknown crypto scheme");
}

Result<SignedBlob> crypto_sign(const KeyPair& signer, Bytes payload) {
  ensure_sodium();
  if (!valid_key_lengths(signer)) return Failure(FailureCode::Malformed, "bad signing key");
  SignedBlob blob;
  if (signer.scheme == kSchemeReal) {
    blob.signature.resize(crypto_sign_BYTES);
    unsigned long long sigLen = 0;
    crypto_sign_detached(blob.signature.data(), &sigLen, payload.data(), payload.size(),
                         signer.privateKey.data());
    blob.signature.resize(sigLen);
  } else {
    blob.signature = marker_sig(signer.publicKey, payload);
  }
  blob.payload = std::move(payload);
  return blob;
}

bool crypto_verify(const PublicKey& signer, const SignedBlob& blob) {
  ensure_sodium();
  if (!valid_pub_length(signer)) return false;
  if (signer.scheme == kSchemeReal) {
    if (blob.signature.size() != crypto_sign_BYTES) return false;
    return crypto_sign_verify_detached(blob.signature.data(), blob.payload.data(),
                                       blob.payload.size(), signer.bytes.data()) == 0;
  }
  return blob.signature == marker_sig(signer.bytes, blob.payload);
}

Result<SealedBlob> crypto_seal(const PublicKey& recipient, std::span<const std::uint8_t> payload,
                               DetRng& rng) {
  ensure_sodium();
  if (!valid_pub_length(recipient)) return Failure(FailureCode::Malformed, "bad recipient key");
  SealedBlob blob;
  if (recipient.scheme == kSchemeMarker) {
    // Nonce keeps the "same plaintext seals differently" property even in
    // marker mode; the explicit length lets the scanner walk nested frames.
    Bytes nonce = rng.bytes(kMarkerSealNonceLen);
    Encoder ct;
    ct.u8(kMarkerSeal0);
    ct.u8(kMarkerSeal1);
    ct.raw(recipient.bytes);
    ct.raw(nonce);
    ct.u32(static_cast<std::uint32_t>(payload.size()));
    ct.raw(payload);
    blob.ciphertext = ct.take();
    return blob;
  }

  std::uint8_t curvePk[crypto_scalarmult_curve25519_BYTES];
  if (crypto_sign_ed25519_pk_to_curve25519(curvePk, recipient.bytes.data()) != 0)
    return Failure(FailureCode::Malformed, "unsealable recipient key");

  Bytes esk = rng.bytes(crypto_scalarmult_curve25519_SCALARBYTES);
  std::uint8_t epk[crypto_scalarmult_curve25519_BYTES];
  crypto_scalarmult_base(epk, esk.data());

  // Nonce from (ephemeral pub, recipient pub): unique per seal because the
  // ephemeral key is fresh each time.
  Bytes nonceMaterial(epk, epk + sizeof epk);
  nonceMaterial.insert(nonceMaterial.end(), curvePk, curvePk + sizeof curvePk);
  Bytes nonce = blake2b(nonceMaterial, crypto_box_NONCEBYTES);

  blob.ciphertext.assign(epk, epk + sizeof epk);
  std::size_t boxStart = blob.ciphertext.size();
  blob.ciphertext.resize(boxStart + payload.size() + crypto_box_MACBYTES);
  if (crypto_box_easy(blob.ciphertext.data() + boxStart, payload.data(), payload.size(),
                      nonce.data(), curvePk, esk.data()) != 0)
    return Failure(FailureCode::Malformed, "seal failed");
  return blob;
}

Result<Bytes> crypto_open(const KeyPair& recipient, const SealedBlob& blob) {
  ensure_sodium();
  if (!valid_key_lengths(recipient)) return Failure(FailureCode::Malformed, "bad recipient key");
  const Bytes& ct = blob.ciphertext;

  if (recipient.scheme == kSchemeMarker) {
    if (ct.size() < kMarkerSealHeaderLen) return Failure(FailureCode::Malformed, "short seal");
    if (ct[0] != kMarkerSeal0 || ct[1] != kMarkerSeal1)
      return Failure(FailureCode::Malformed, "bad seal frame");
    if (!std::equal(recipient.publicKey.begin(), recipient.publicKey.end(), ct.begin() + 2))
      return Failure(FailureCode::DecryptFailure, "sealed to another key");
    std::uint32_t len = 0;
    std::size_t lenAt = 2 + kMarkerKeyLen + kMarkerSealNonceLen;
    for (int i = 0; i < 4; ++i) len = (len << 8) | ct[lenAt + i];
    if (ct.size() != kMarkerSealHeaderLen + len)
      return Failure(FailureCode::Malformed, "seal length mismatch");
    return Bytes(ct.begin() + kMarkerSealHeaderLen, ct.end());
  }

  if (ct.size() < crypto_scalarmult_curve25519_BYTES + crypto_box_MACBYTES)
    return Failure(FailureCode::Malformed, "short seal");

  std::uint8_t curveSk[crypto_scalarmult_curve25519_SCALARBYTES];
  if (crypto_sign_ed25519_sk_to_curve25519(curveSk, recipient.privateKey.data()) != 0)
    return Failure(FailureCode::Malformed, "bad private key");
  std::uint8_t edPk[crypto_sign_PUBLICKEYBYTES];
  if (crypto_sign_ed25519_sk_to_pk(edPk, recipient.privateKey.data()) != 0)
    return Failure(FailureCode::Malformed, "bad private key");
  std::uint8_t curvePk[crypto_scalarmult_curve25519_BYTES];
  if (crypto_sign_ed25519_pk_to_curve25519(curvePk, edPk) != 0)
    return Failure(FailureCode::Malformed, "bad private key");

  const std::uint8_t* epk = ct.data();
  Bytes nonceMaterial(epk, epk + crypto_scalarmult_curve25519_BYTES);
  nonceMaterial.insert(nonceMaterial.end(), curvePk, curvePk + sizeof curvePk);
  Bytes nonce = blake2b(nonceMaterial, crypto_box_NONCEBYTES);

  std::size_t boxLen = ct.size() - crypto_scalarmult_curve25519_BYTES;
  Bytes plain(boxLen - crypto_box_MACBYTES);
  if (crypto_box_open_easy(plain.data(), ct.data() + crypto_scalarmult_curve25519_BYTES, boxLen,
                           nonce.data(), epk, curveSk) != 0)
    return Failure(FailureCode::DecryptFailure, "seal did not open");
  return plain;
}

}  // namespace usher
