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

// Structural privacy scan over marker-backend transcripts. The marker
// scheme keeps sealed payloads readable behind framed headers, so a scan
// can decide, for every byte on the wire, which recipient's sealed region
// it landed in. Real-backend ciphertexts are opaque and unscannable.

#ifndef USHER_PRIVACY_HPP
#define USHER_PRIVACY_HPP

#include <cstddef>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/crypto.hpp"

namespace usher {

// One marker seal frame found in a scanned buffer. Marker payloads embed
// their bytes verbatim, so nested frames surface at absolute offsets in
// the same buffer; offsets here address the scanned buffer directly.
struct SealedSpan {
  std::size_t payloadBegin = 0;
  std::size_t payloadEnd = 0;
  Bytes recipient;

  std::size_t length() const { return payloadEnd - payloadBegin; }
};

// Finds every marker seal frame in data, nested frames included, ordered
// by payload start. Bytes that merely resemble a frame header count only
// when the declared payload fits inside the buffer.
std::vector<SealedSpan> scan_sealed_spans(const Bytes& data);

// The innermost span whose payload fully covers [begin, end), or nullptr
// when no span does. A range straddling a frame boundary has no governing
// span; for a leak check that is the same as lying in the clear.
const SealedSpan* innermost_covering(const std::vector<SealedSpan>& spans, std::size_t begin,
                                     std::size_t end);

// A needle occurrence not governed by a seal to an allowed recipient.
// sealedTo is the innermost recipient key when some other seal covers the
// occurrence, empty when the bytes lie outside every sealed region.
struct Exposure {
  std::size_t offset = 0;
  Bytes sealedTo;
};

// Scans data for every occurrence of needle and reports those whose
// innermost sealed region is not addressed to one of the allowed keys.
// Callers pick needles with enough entropy that accidental byte matches
// do not occur; a short or empty needle makes the answer meaningless.
std::vector<Exposure> find_exposures(const Bytes& data, const Bytes& needle,
                                     const std::vector<PublicKey>& allowed);

}  // namespace usher

#endif  // USHER_PRIVACY_HPP
