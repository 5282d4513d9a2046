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

#include "usher/privacy.hpp"

#include <algorithm>

namespace usher {

std::vector<SealedSpan> scan_sealed_spans(const Bytes& data) {
  std::vector<SealedSpan> spans;
  if (data.size() < kMarkerSealHeaderLen) return spans;
  for (std::size_t i = 0; i + kMarkerSealHeaderLen <= data.size(); ++i) {
    if (data[i] != kMarkerSeal0 || data[i + 1] != kMarkerSeal1) continue;
    std::size_t lenOffset = i + 2 + kMarkerKeyLen + kMarkerSealNonceLen;
    std::uint32_t len = (static_cast<std::uint32_t>(data[lenOffset]) << 24) |
                        (static_cast<std::uint32_t>(data[lenOffset + 1]) << 16) |
                        (static_cast<std::uint32_t>(data[lenOffset + 2]) << 8) |
                        static_cast<std::uint32_t>(data[lenOffset + 3]);
    std::size_t payloadBegin = i + kMarkerSealHeaderLen;
    if (len > data.size() - payloadBegin) continue;
    SealedSpan span;
    span.payloadBegin = payloadBegin;
    span.payloadEnd = payloadBegin + len;
    span.recipient.assign(data.begin() + static_cast<std::ptrdiff_t>(i + 2),
                          data.begin() + static_cast<std::ptrdiff_t>(i + 2 + kMarkerKeyLen));
    spans.push_back(std::move(span));
  }
  return spans;
}

const SealedSpan* innermost_covering(const std::vector<SealedSpan>& spans, std::size_t begin,
                                     std::size_t end) {
  const SealedSpan* best = nullptr;
  for (const SealedSpan& span : spans) {
    if (span.payloadBegin > begin || span.payloadEnd < end) continue;
    if (best == nullptr || span.length() < best->length()) best = &span;
  }
  return best;
}

std::vector<Exposure> find_exposures(const Bytes& data, const Bytes& needle,
                                     const std::vector<PublicKey>& allowed) {
  std::vector<Exposure> exposures;
  if (needle.empty() || data.size() < needle.size()) return exposures;
  std::vector<SealedSpan> spans = scan_sealed_spans(data);

  auto it = data.begin();
  while (true) {
    it = std::search(it, data.end(), needle.begin(), needle.end());
    if (it == data.end()) break;
    std::size_t offset = static_cast<std::size_t>(it - data.begin());
    const SealedSpan* span = innermost_covering(spans, offset, offset + needle.size());
    bool ok = span != nullptr &&
              std::any_of(allowed.begin(), allowed.end(), [&](const PublicKey& key) {
                return key.bytes == span->recipient;
              });
    if (!ok) {
      Exposure e;
      e.offset = offset;
      if (span != nullptr) e.sealedTo = span->recipient;
      exposures.push_back(std::move(e));
    }
    ++it;
  }
  return exposures;
}

}  // namespace usher
