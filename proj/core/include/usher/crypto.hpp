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

#ifndef USHER_CRYPTO_HPP
#define USHER_CRYPTO_HPP

#include <cstdint>
#include <optional>

#include "usher/bytes.hpp"
#include "usher/codec.hpp"
#include "usher/result.hpp"
#include "usher/tokens.hpp"

namespace usher {

// Two interchangeable backends behind one scheme byte.
//
// kSchemeReal: Ed25519 signatures; sealing is a sealed-box construction
// (ephemeral X25519 key against the recipient's converted Ed25519 key,
// nonce derived from both public keys, authenticated so wrong-key opens
// fail detectably).
//
// kSchemeMarker: transparent test instrumentation. Signatures and seals
// keep the payload readable and delimit it with framed headers carrying
// the principal's public key, so structural privacy scans can decide
// which sealed region every byte landed in. Provides no secrecy; the CLI
// refuses it without an explicit unsafe flag.
inline constexpr std::uint8_t kSchemeReal = 0x01;
inline constexpr std::uint8_t kSchemeMarker = 0x02;

struct PublicKey {
  std::uint8_t scheme = 0;
  Bytes bytes;

  static constexpr Tag kTag = Tag::PublicKey;
  void encode_body(Encoder& e) const;
  static PublicKey decode_body(Decoder& d);

  friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

struct KeyPair {
  Bytes publicKey;
  Bytes privateKey;
  std::uint8_t scheme = 0;
  bool ephemeral = false;

  PublicKey pub() const { return PublicKey{scheme, publicKey}; }

  static constexpr Tag kTag = Tag::KeyPair;
  void encode_body(Encoder& e) const;
  static KeyPair decode_body(Decoder& d);

  friend bool operator==(const KeyPair&, const KeyPair&) = default;
};

// Only long-term pairs go into registries; the ephemeral flag exists so
// that misuse is visible, not to change any algorithm.
using EphemeralKeyPair = KeyPair;

struct SignedBlob {
  Bytes payload;  // exact bytes the signature covers
  Bytes signature;
  std::optional<Token> signerHint;

  static constexpr Tag kTag = Tag::SignedBlob;
  void encode_body(Encoder& e) const;
  static SignedBlob decode_body(Decoder& d);

  friend bool operator==(const SignedBlob&, const SignedBlob&) = default;
};

struct SealedBlob {
  Bytes ciphertext;
  std::optional<Token> recipientHint;

  static constexpr Tag kTag = Tag::SealedBlob;
  void encode_body(Encoder& e) const;
  static SealedBlob decode_body(Decoder& d);

  friend bool operator==(const SealedBlob&, const SealedBlob&) = default;
};

// Deterministic under the rng seed, so simulation runs reproduce keys.
Result<KeyPair> crypto_gen(std::uint8_t scheme, bool ephemeral, DetRng& rng);

Result<SignedBlob> crypto_sign(const KeyPair& signer, Bytes payload);
bool crypto_verify(const PublicKey& signer, const SignedBlob& blob);

// Sealing is randomized: equal plaintexts to the same recipient yield
// different ciphertexts, so repeated enrollments are not linkable.
Result<SealedBlob> crypto_seal(const PublicKey& recipient, std::span<const std::uint8_t> payload,
                               DetRng& rng);
// Wrong key or damaged ciphertext fails with DecryptFailure (local code,
// mapped to Malformed wherever a wire answer is owed).
Result<Bytes> crypto_open(const KeyPair& recipient, const SealedBlob& blob);

// Marker frame layout, shared with the privacy scanner.
inline constexpr std::uint8_t kMarkerSig0 = 'M';
inline constexpr std::uint8_t kMarkerSig1 = 'S';
inline constexpr std::uint8_t kMarkerSeal0 = 'M';
inline constexpr std::uint8_t kMarkerSeal1 = 'E';
inline constexpr std::size_t kMarkerKeyLen = 32;
inline constexpr std::size_t kMarkerSealNonceLen = 16;
// "ME" + recipient key + nonce + u32 payload length, then the payload.
inline constexpr std::size_t kMarkerSealHeaderLen = 2 + kMarkerKeyLen + kMarkerSealNonceLen + 4;

}  // namespace usher

#endif  // USHER_CRYPTO_HPP
