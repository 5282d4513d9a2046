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

#include "usher/files.hpp"

#include <cstdio>

namespace usher {

void KeyFile::encode_body(Encoder& e) const {
  e.str(role);
  e.uuid(id);
  keys.encode_body(e);
}

KeyFile KeyFile::decode_body(Decoder& d) {
  KeyFile f;
  f.role = d.str();
  f.id = d.uuid();
  f.keys = KeyPair::decode_body(d);
  return f;
}

void PublicKeyFile::encode_body(Encoder& e) const {
  e.str(role);
  e.uuid(id);
  publicKey.encode_body(e);
}

PublicKeyFile PublicKeyFile::decode_body(Decoder& d) {
  PublicKeyFile f;
  f.role = d.str();
  f.id = d.uuid();
  f.publicKey = PublicKey::decode_body(d);
  return f;
}

void CertificateFile::encode_body(Encoder& e) const {
  e.uuid(org);
  certificate.encode_body(e);
  e.i64(expiry);
}

CertificateFile CertificateFile::decode_body(Decoder& d) {
  CertificateFile f;
  f.org = d.uuid();
  f.certificate = EnrollmentCertificate::decode_body(d);
  f.expiry = d.i64();
  return f;
}

void AclFile::encode_body(Encoder& e) const {
  e.sorted_set(entries.begin(), entries.end(),
               [](Encoder& sub, const AclEntry& entry) { entry.encode_body(sub); });
}

AclFile AclFile::decode_body(Decoder& d) {
  AclFile f;
  d.sorted_set([&](Decoder& sub) { f.entries.push_back(AclEntry::decode_body(sub)); });
  return f;
}

namespace {

void encode_transcript_entry(Encoder& e, const TranscriptEntry& entry) {
  e.u64(entry.seq);
  e.uuid(entry.from);
  e.uuid(entry.to);
  e.bytes(entry.bytes);
  e.boolean(entry.responseBytes.has_value());
  if (entry.responseBytes) e.bytes(*entry.responseBytes);
  e.i64(entry.simTime);
  e.boolean(entry.injected);
  e.boolean(entry.dropped);
}

TranscriptEntry decode_transcript_entry(Decoder& d) {
  TranscriptEntry entry;
  entry.seq = d.u64();
  entry.from = d.uuid();
  entry.to = d.uuid();
  entry.bytes = d.bytes();
  if (d.boolean()) entry.responseBytes = d.bytes();
  entry.simTime = d.i64();
  entry.injected = d.boolean();
  entry.dropped = d.boolean();
  return entry;
}

}  // namespace

void TranscriptFile::encode_body(Encoder& e) const {
  e.u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& entry : entries) encode_transcript_entry(e, entry);
}

TranscriptFile TranscriptFile::decode_body(Decoder& d) {
  TranscriptFile f;
  std::uint32_t count = d.u32();
  f.entries.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) f.entries.push_back(decode_transcript_entry(d));
  return f;
}

Result<Bytes> read_file(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp == nullptr) return Failure{FailureCode::Malformed, "cannot open " + path};
  Bytes out;
  std::uint8_t buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof(buf), fp)) > 0) out.insert(out.end(), buf, buf + n);
  bool bad = std::ferror(fp) != 0;
  std::fclose(fp);
  if (bad) return Failure{FailureCode::Malformed, "read error on " + path};
  return out;
}

Status write_file(const std::string& path, const Bytes& data) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) return Failure{FailureCode::Malformed, "cannot create " + path};
  std::size_t written = data.empty() ? 0 : std::fwrite(data.data(), 1, data.size(), fp);
  bool bad = written != data.size() || std::fclose(fp) != 0;
  if (bad) return Failure{FailureCode::Malformed, "write error on " + path};
  return Status{};
}

}  // namespace usher
