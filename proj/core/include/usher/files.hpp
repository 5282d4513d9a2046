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

#ifndef USHER_FILES_HPP
#define USHER_FILES_HPP

#include <string>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/codec.hpp"
#include "usher/crypto.hpp"
#include "usher/messages.hpp"
#include "usher/result.hpp"
#include "usher/simnet.hpp"

namespace usher {

// On-disk artifacts produced and consumed by the command line tools.
// All of them are canonical encodings, so byte-identical inputs and seeds
// reproduce byte-identical files.

struct KeyFile {
  std::string role;  // "org", "server", "clearance" or "user"
  Uuid id;
  KeyPair keys;

  static constexpr Tag kTag = Tag::KeyFile;
  void encode_body(Encoder& e) const;
  static KeyFile decode_body(Decoder& d);
};

struct PublicKeyFile {
  std::string role;
  Uuid id;
  PublicKey publicKey;

  static constexpr Tag kTag = Tag::PublicKeyFile;
  void encode_body(Encoder& e) const;
  static PublicKeyFile decode_body(Decoder& d);
};

struct CertificateFile {
  Uuid org;
  EnrollmentCertificate certificate;
  std::int64_t expiry = 0;  // cleartext copy, matches the signed payload

  static constexpr Tag kTag = Tag::CertificateFile;
  void encode_body(Encoder& e) const;
  static CertificateFile decode_body(Decoder& d);
};

struct AclFile {
  std::vector<AclEntry> entries;  // canonical set order

  static constexpr Tag kTag = Tag::AclFile;
  void encode_body(Encoder& e) const;
  static AclFile decode_body(Decoder& d);
};

struct TranscriptFile {
  std::vector<TranscriptEntry> entries;  // send order, not sorted

  static constexpr Tag kTag = Tag::TranscriptFile;
  void encode_body(Encoder& e) const;
  static TranscriptFile decode_body(Decoder& d);
};

// Filesystem helpers shared by the tools. Read failures carry the path.
Result<Bytes> read_file(const std::string& path);
Status write_file(const std::string& path, const Bytes& data);

}  // namespace usher

#endif  // USHER_FILES_HPP
