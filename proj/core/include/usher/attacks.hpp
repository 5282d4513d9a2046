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

// Scripted adversary drills. Each drill builds a small world, runs some
// honest traffic, then attacks it, and reports whether the protocol held.
// The same recipes back the command-line attack runner and the test
// suite, so a drill that regresses fails in both places.

#ifndef USHER_ATTACKS_HPP
#define USHER_ATTACKS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "usher/crypto.hpp"
#include "usher/messages.hpp"
#include "usher/result.hpp"

namespace usher {

// Request-building blocks for splicing arbitrary materials together.
// The honest path goes through build_request; drills use these to pair a
// stolen certificate or blob with the wrong key on purpose.

Result<SignedBlob> forge_claim(const KeyPair& signer, const Uuid& orgId,
                               const EnrollmentCertificate& cert);

Result<SealedBlob> forge_blob(const PublicKey& outerKey, const SignedBlob& claim,
                              const PublicKey& clearancePub, DetRng& rng);

Result<Bytes> forge_request(const SignedBlob& tauSigned, const Token& resource,
                            const SealedBlob& blob, const PublicKey& serverPub, DetRng& rng);

// Replays of recorded wire messages, interleaved with honest requests to
// a counter resource on randomized schedules. The counter must end up
// exactly at the number of honest requests.
struct ReplayDrillReport {
  int schedules = 0;
  int honestRequests = 0;
  int injections = 0;
  // Schedules whose counter diverged from the honest request count.
  int violations = 0;

  bool immune() const { return schedules > 0 && violations == 0; }
};

ReplayDrillReport run_replay_drills(std::uint8_t scheme, std::uint64_t seed, int schedules);

// Single-byte corruptions of recorded messages, re-delivered to their
// original destination. None may produce a service answer or move the
// counter.
struct TamperDrillReport {
  int attempts = 0;
  int answers = 0;
  std::int64_t counterDrift = 0;

  bool harmless() const { return attempts > 0 && answers == 0 && counterDrift == 0; }
};

TamperDrillReport run_tamper_drills(std::uint8_t scheme, std::uint64_t seed, int attempts);

// Cross-user certificate theft. The thief holds a victim's certificate,
// clearance blob, even a signed request stamp, but not the victim's
// ephemeral private key, and tries every splice that could turn those
// into service.
struct TheftAttempt {
  std::string recipe;
  std::string outcome;  // failure code name, or "answer" on a breach
  bool denied = false;
};

struct TheftDrillReport {
  std::vector<TheftAttempt> attempts;
  int denied = 0;

  bool allDenied() const {
    return !attempts.empty() && denied == static_cast<int>(attempts.size());
  }
};

TheftDrillReport run_theft_drills(std::uint8_t scheme, std::uint64_t seed, int rounds);

}  // namespace usher

#endif  // USHER_ATTACKS_HPP
