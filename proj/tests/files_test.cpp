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

// On-disk artifact formats used by the command line tools, plus the
// filesystem helpers behind them.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "usher/bytes.hpp"
#include "usher/crypto.hpp"
#include "usher/files.hpp"
#include "usher/messages.hpp"
#include "usher/simnet.hpp"
#include "usher/tokens.hpp"

using namespace usher;

namespace {

// Unique per-process scratch names keep parallel ctest runs apart.
std::string scratch(const char* stem) {
  return std::string("files_test_") + stem + "_" + std::to_string(::getpid()) + ".bin";
}

}  // namespace

TEST_CASE("key files round-trip for every role and scheme") {
  DetRng rng(1);
  for (std::uint8_t scheme : {kSchemeReal, kSchemeMarker}) {
    for (const char* role : {"org", "server", "clearance", "user"}) {
      CAPTURE(int(scheme));
      CAPTURE(role);
      KeyFile f;
      f.role = role;
      f.id = rng.uuid();
      f.keys = crypto_gen(scheme, std::string(role) == "user", rng).take();

      Bytes wire = canonical_encode(f);
      auto back = canonical_decode<KeyFile>(wire);
      REQUIRE(back.ok());
      CHECK(back.value().role == f.role);
      CHECK(back.value().id == f.id);
      CHECK(back.value().keys.pub() == f.keys.pub());
      CHECK(canonical_encode(back.value()) == wire);
    }
  }
}

TEST_CASE("public key files carry no secret material") {
  DetRng rng(2);
  KeyPair keys = crypto_gen(kSchemeReal, false, rng).take();
  PublicKeyFile f;
  f.role = "server";
  f.id = rng.uuid();
  f.publicKey = keys.pub();

  Bytes wire = canonical_encode(f);
  auto back = canonical_decode<PublicKeyFile>(wire);
  REQUIRE(back.ok());
  CHECK(back.value().publicKey == keys.pub());

  // A key file and a public key file are distinct formats; tags keep
  // them from being confused for each other.
  auto confused = canonical_decode<KeyFile>(wire);
  REQUIRE(!confused.ok());
  CHECK(confused.code() == FailureCode::Malformed);
  CHECK(confused.failure().detail == "bad tag");
}

TEST_CASE("certificate files keep the cleartext expiry in step") {
  DetRng rng(3);
  Uuid orgId = rng.uuid();
  KeyPair orgKeys = crypto_gen(kSchemeMarker, false, rng).take();
  KeyPair userKeys = crypto_gen(kSchemeMarker, true, rng).take();
  Enrollment e{Token{orgId, to_bytes("staff"), ""}, orgId, to_bytes("staff")};
  auto cert = build_certificate(orgKeys, userKeys.pub(), {e}, 7777);
  REQUIRE(cert.ok());

  CertificateFile f;
  f.org = orgId;
  f.certificate = cert.value();
  f.expiry = 7777;

  Bytes wire = canonical_encode(f);
  auto back = canonical_decode<CertificateFile>(wire);
  REQUIRE(back.ok());
  CHECK(back.value().org == orgId);
  CHECK(back.value().expiry == 7777);

  // The reloaded certificate still verifies and agrees with the
  // cleartext copy of the expiry.
  auto payload = verify_certificate(orgKeys.pub(), back.value().certificate);
  REQUIRE(payload.ok());
  CHECK(payload.value().expiry == back.value().expiry);
  CHECK(payload.value().kU == userKeys.pub());
}

TEST_CASE("acl files are canonical sets of entries") {
  DetRng rng(4);
  Uuid cc = rng.uuid();
  Uuid srv = rng.uuid();
  AclEntry a{Token{cc, to_bytes("reader"), ""},
             {{Token{srv, to_bytes("doc"), ""}, {time_window(0, 99)}}}};
  AclEntry b{Token{cc, to_bytes("writer"), ""},
             {{Token{srv, to_bytes("doc"), ""}, {}}}};

  AclFile f;
  f.entries = {a, b};
  Bytes wire = canonical_encode(f);

  AclFile swapped;
  swapped.entries = {b, a};
  // The encoder sorts, so entry order on input does not matter.
  CHECK(canonical_encode(swapped) == wire);

  auto back = canonical_decode<AclFile>(wire);
  REQUIRE(back.ok());
  REQUIRE(back.value().entries.size() == 2);
  CHECK((back.value().entries[0] == a || back.value().entries[0] == b));
  CHECK(back.value().entries[0] != back.value().entries[1]);
  CHECK(canonical_encode(back.value()) == wire);

  AclFile empty;
  auto emptyBack = canonical_decode<AclFile>(canonical_encode(empty));
  REQUIRE(emptyBack.ok());
  CHECK(emptyBack.value().entries.empty());
}

TEST_CASE("transcript files preserve every recorded field") {
  SimClock clock(500);
  Network net(clock);
  DetRng rng(5);
  Uuid alice = rng.uuid();
  Uuid bob = rng.uuid();
  net.register_endpoint(bob, [](const Uuid&, const Bytes& wire) {
    Bytes reply = wire;
    reply.push_back(0x99);
    return reply;
  });

  net.call(alice, bob, to_bytes("hello"));
  clock.advance(10);
  net.exchange(alice, bob, to_bytes("both ways"));
  net.schedule_drop(net.next_seq());
  net.call(alice, bob, to_bytes("never lands"));
  net.adversary_replay(0);

  TranscriptFile f;
  f.entries = net.transcript();
  Bytes wire = canonical_encode(f);
  auto back = canonical_decode<TranscriptFile>(wire);
  REQUIRE(back.ok());
  REQUIRE(back.value().entries.size() == f.entries.size());
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    CAPTURE(i);
    const TranscriptEntry& want = f.entries[i];
    const TranscriptEntry& got = back.value().entries[i];
    CHECK(got.seq == want.seq);
    CHECK(got.from == want.from);
    CHECK(got.to == want.to);
    CHECK(got.bytes == want.bytes);
    CHECK(got.responseBytes == want.responseBytes);
    CHECK(got.simTime == want.simTime);
    CHECK(got.injected == want.injected);
    CHECK(got.dropped == want.dropped);
  }
  CHECK(canonical_encode(back.value()) == wire);
}

TEST_CASE("truncated artifacts are refused as malformed") {
  DetRng rng(6);
  KeyFile f;
  f.role = "org";
  f.id = rng.uuid();
  f.keys = crypto_gen(kSchemeMarker, false, rng).take();
  Bytes wire = canonical_encode(f);

  for (std::size_t keep : {std::size_t{0}, std::size_t{1}, wire.size() / 2, wire.size() - 1}) {
    CAPTURE(keep);
    Bytes cut(wire.begin(), wire.begin() + keep);
    auto back = canonical_decode<KeyFile>(cut);
    REQUIRE(!back.ok());
    CHECK(back.code() == FailureCode::Malformed);
  }

  Bytes padded = wire;
  padded.push_back(0x00);
  auto back = canonical_decode<KeyFile>(padded);
  REQUIRE(!back.ok());
  CHECK(back.failure().detail == "trailing bytes");
}

TEST_CASE("file helpers round-trip bytes and report path errors") {
  std::string path = scratch("rw");
  Bytes data = to_bytes("binary\0payload");
  data.push_back(0x00);
  data.push_back(0xFF);

  REQUIRE(write_file(path, data).ok());
  auto back = read_file(path);
  REQUIRE(back.ok());
  CHECK(back.value() == data);

  // Empty files are legitimate.
  REQUIRE(write_file(path, {}).ok());
  auto empty = read_file(path);
  REQUIRE(empty.ok());
  CHECK(empty.value().empty());
  std::remove(path.c_str());

  auto missing = read_file("no_such_file_around_here.bin");
  REQUIRE(!missing.ok());
  CHECK(missing.code() == FailureCode::Malformed);
  CHECK(missing.failure().detail.find("no_such_file_around_here.bin") != std::string::npos);

  Status bad = write_file("missing_dir_xyz/out.bin", data);
  REQUIRE(!bad.ok());
  CHECK(bad.code() == FailureCode::Malformed);
  CHECK(bad.failure().detail.find("missing_dir_xyz/out.bin") != std::string::npos);
}
