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

#ifndef USHER_CODEC_HPP
#define USHER_CODEC_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>

#include "usher/bytes.hpp"
#include "usher/result.hpp"

namespace usher {

// Canonical wire form, normative for every persisted or transmitted value:
//
//   message     := version(0x01) tag(1 byte) body
//   integer     := 8 bytes big-endian (signed values two's-complement)
//   bytestring  := u32 big-endian length, raw bytes   (strings are UTF-8)
//   collection  := u32 big-endian count, elements; set/map elements must
//                  appear in strictly increasing order of their encoded
//                  bytes (rejected otherwise)
//   uuid        := 16 raw bytes
//   optional    := 0x00 | 0x01 value
//   bool        := 0x00 | 0x01
//
// Fields follow in declaration order. Equal values encode to identical
// bytes; decoding rejects trailing bytes, unknown tags, out-of-order set
// elements, and any length that overruns the buffer.

inline constexpr std::uint8_t kWireVersion = 0x01;

enum class Tag : std::uint8_t {
  Token = 0x01,
  Enrollment = 0x02,
  Ticket = 0x03,
  Modifier = 0x04,
  ImplicationMap = 0x05,
  ServiceAgreement = 0x06,
  TicketGrant = 0x07,
  PublicKey = 0x08,
  PrivateKey = 0x09,
  KeyPair = 0x0a,
  SignedBlob = 0x0b,
  SealedBlob = 0x0c,
  Tau = 0x0d,
  CertificatePayload = 0x0e,
  EnrollmentCertificate = 0x0f,
  ClearanceClaimPayload = 0x10,
  ClearanceBlobPayload = 0x11,
  RequestPayload = 0x12,
  RequestEnvelope = 0x13,
  ClearanceRequestPayload = 0x14,
  ClearanceRequest = 0x15,
  ClearanceDecisionPayload = 0x16,
  ClearanceResponse = 0x17,
  ConfirmAskPayload = 0x18,
  ConfirmAsk = 0x19,
  ConfirmReplyPayload = 0x1a,
  ConfirmReply = 0x1b,
  DebitCommitPayload = 0x1c,
  DebitCommit = 0x1d,
  DebitResultPayload = 0x1e,
  DebitResult = 0x1f,
  Answer = 0x21,
  FailureMessage = 0x22,
  AdminMessage = 0x23,
  AclEntry = 0x24,
  AclFile = 0x25,
  ClearanceStateFile = 0x26,
  TranscriptFile = 0x27,
  KeyFile = 0x28,
  PublicKeyFile = 0x29,
  CertificateFile = 0x2a,
};

// Thrown by Decoder on any structural violation; canonical_decode converts
// it to FailureCode::Malformed at the boundary. Never escapes the codec.
class CodecError : public std::runtime_error {
 public:
  explicit CodecError(const char* what) : std::runtime_error(what) {}
};

class Encoder {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 0x01 : 0x00); }
  void uuid(const Uuid& u) { out_.insert(out_.end(), u.data.begin(), u.data.end()); }
  void bytes(std::span<const std::uint8_t> b) {
    u32(static_cast<std::uint32_t>(b.size()));
    out_.insert(out_.end(), b.begin(), b.end());
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void raw(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  // Set/map layout: encodes each element with `fn`, then emits them in
  // strictly increasing lexicographic order of their encoded bytes.
  // Length prefixes inside the element encodings make this order agree
  // with shortlex on contents and with key order for map entries.
  // Duplicates collapse.
  template <typename Iter, typename Fn>
  void sorted_set(Iter first, Iter last, Fn fn) {
    std::vector<Bytes> encoded;
    for (Iter it = first; it != last; ++it) {
      Encoder sub;
      fn(sub, *it);
      encoded.push_back(std::move(sub.out_));
    }
    std::sort(encoded.begin(), encoded.end());
    encoded.erase(std::unique(encoded.begin(), encoded.end()), encoded.end());
    u32(static_cast<std::uint32_t>(encoded.size()));
    for (const Bytes& e : encoded) raw(e);
  }

  const Bytes& data() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Decoder {
 public:
  explicit Decoder(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  bool boolean() {
    std::uint8_t b = u8();
    if (b > 1) throw CodecError("bad boolean");
    return b == 1;
  }
  Uuid uuid() {
    need(16);
    Uuid u;
    std::copy_n(data_.begin() + pos_, 16, u.data.begin());
    pos_ += 16;
    return u;
  }
  Bytes bytes() {
    std::uint32_t n = u32();
    need(n);
    Bytes b(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return b;
  }
  std::string str() {
    Bytes b = bytes();
    return std::string(b.begin(), b.end());
  }

  // Decodes the count prefix plus that many elements via `fn`, checking
  // that their raw encodings appear in strictly increasing byte order.
  template <typename Fn>
  void sorted_set(Fn fn) {
    std::uint32_t count = u32();
    Bytes prev;
    for (std::uint32_t i = 0; i < count; ++i) {
      std::size_t start = pos_;
      fn(*this);
      if (pos_ == start) throw CodecError("empty element");
      Bytes enc(data_.begin() + start, data_.begin() + pos_);
      if (i > 0 && !(prev < enc)) throw CodecError("set order");
      prev = std::move(enc);
    }
  }

  // Map layout: strict ordering (and so uniqueness) is enforced on the
  // key encodings alone; values follow their keys.
  template <typename KeyFn, typename ValFn>
  void sorted_map(KeyFn kf, ValFn vf) {
    std::uint32_t count = u32();
    Bytes prev;
    for (std::uint32_t i = 0; i < count; ++i) {
      std::size_t start = pos_;
      kf(*this);
      if (pos_ == start) throw CodecError("empty key");
      Bytes key(data_.begin() + start, data_.begin() + pos_);
      if (i > 0 && !(prev < key)) throw CodecError("map order");
      prev = std::move(key);
      vf(*this);
    }
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  std::size_t position() const { return pos_; }

  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw CodecError("truncated");
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

template <typename T>
Bytes canonical_encode(const T& v) {
  Encoder e;
  e.u8(kWireVersion);
  e.u8(static_cast<std::uint8_t>(T::kTag));
  v.encode_body(e);
  return e.take();
}

template <typename T>
Result<T> canonical_decode(std::span<const std::uint8_t> data) {
  try {
    Decoder d(data);
    if (d.u8() != kWireVersion) return Failure(FailureCode::Malformed, "bad version");
    if (d.u8() != static_cast<std::uint8_t>(T::kTag))
      return Failure(FailureCode::Malformed, "bad tag");
    T v = T::decode_body(d);
    if (!d.done()) return Failure(FailureCode::Malformed, "trailing bytes");
    return v;
  } catch (const CodecError& e) {
    return Failure(FailureCode::Malformed, e.what());
  }
}

// Tag of a wire message without decoding it. Malformed if too short or
// from a different format version.
Result<Tag> peek_tag(std::span<const std::uint8_t> data);

// Bare field encoding of a value, without the version/tag header. This is
// the byte string that determines canonical ordering inside collections.
template <typename T>
Bytes body_bytes(const T& v) {
  Encoder e;
  v.encode_body(e);
  return e.take();
}

}  // namespace usher

#endif  // USHER_CODEC_HPP
