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

#ifndef USHER_TOKENS_HPP
#define USHER_TOKENS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/codec.hpp"

namespace usher {

// Opaque capability name. Identity and ordering are (creator, value);
// the label is a local display aid, never serialized, never compared.
// value must be 1..64 bytes.
struct Token {
  Uuid creator;
  Bytes value;
  std::string label;

  static constexpr Tag kTag = Tag::Token;
  void encode_body(Encoder& e) const;
  static Token decode_body(Decoder& d);

  friend bool operator==(const Token& a, const Token& b) {
    return a.creator == b.creator && a.value == b.value;
  }
  friend bool operator!=(const Token& a, const Token& b) { return !(a == b); }
};

// Matches the lexicographic order of Token canonical bytes: creator raw,
// then length-prefixed value (so shorter values sort first).
bool token_less(const Token& a, const Token& b);

using OrgId = Uuid;
using ServerId = Uuid;

// The paper's (user, organization, group) triple minus the user part,
// which travels separately as the certificate's ephemeral key binding.
struct Enrollment {
  Token token;
  OrgId org;  // must equal token.creator
  Bytes group;

  static constexpr Tag kTag = Tag::Enrollment;
  void encode_body(Encoder& e) const;
  static Enrollment decode_body(Decoder& d);

  friend bool operator==(const Enrollment& a, const Enrollment& b) {
    return a.token == b.token && a.org == b.org && a.group == b.group;
  }
  friend bool operator!=(const Enrollment& a, const Enrollment& b) { return !(a == b); }
};

// Fixed-point money-like quantity. decimal=false holds a plain integer
// count; decimal=true holds value*10^4 (four fractional digits, at most
// eighteen significant digits). Never a binary float.
struct DebitAmount {
  bool decimal = false;
  std::int64_t raw = 0;

  static DebitAmount integer(std::int64_t v) { return {false, v}; }
  static DebitAmount fixed(std::int64_t scaled) { return {true, scaled}; }

  // Cost of one use: 1 for integer amounts, 1.0000 for decimal ones.
  std::int64_t unit_raw() const { return decimal ? 10000 : 1; }

  std::string format() const;
  // Accepts "123" (integer) or "123.45" (decimal, <=4 fraction digits).
  static std::optional<DebitAmount> parse(std::string_view text);

  friend bool operator==(const DebitAmount&, const DebitAmount&) = default;
};

inline constexpr std::int64_t kMaxDecimalRaw = 999'999'999'999'999'999;  // decimal(18,4)

struct TimeWindowModifier {
  std::int64_t start = 0;  // epoch seconds, inclusive
  std::int64_t end = 0;    // inclusive; start <= end
  friend bool operator==(const TimeWindowModifier&, const TimeWindowModifier&) = default;
};

// Minutes-of-day range, inclusive both ends. startMinute > endMinute
// wraps across midnight (22:00..02:00).
struct TimeOfDayModifier {
  std::uint32_t startMinute = 0;  // 0..1439
  std::uint32_t endMinute = 0;    // 0..1439
  friend bool operator==(const TimeOfDayModifier&, const TimeOfDayModifier&) = default;
};

struct DebitModifier {
  DebitAmount remaining;  // raw >= 0
  std::string unit;
  bool requiresConfirmation = false;
  std::string description;
  friend bool operator==(const DebitModifier&, const DebitModifier&) = default;
};

// Passes only when the request carries paramKey with one of the listed
// values. Absent key denies.
struct ParamConstraintModifier {
  std::string paramKey;
  std::vector<Bytes> allowedValues;
  friend bool operator==(const ParamConstraintModifier&, const ParamConstraintModifier&) = default;
};

struct Modifier {
  std::variant<TimeWindowModifier, TimeOfDayModifier, DebitModifier, ParamConstraintModifier> v;

  static constexpr Tag kTag = Tag::Modifier;
  void encode_body(Encoder& e) const;
  static Modifier decode_body(Decoder& d);

  bool is_debit() const { return std::holds_alternative<DebitModifier>(v); }
  const DebitModifier* debit() const { return std::get_if<DebitModifier>(&v); }
  DebitModifier* debit() { return std::get_if<DebitModifier>(&v); }

  friend bool operator==(const Modifier&, const Modifier&) = default;
};

Modifier time_window(std::int64_t start, std::int64_t end);
Modifier time_of_day(std::uint32_t startMinute, std::uint32_t endMinute);
Modifier debit(DebitAmount remaining, std::string unit, bool requiresConfirmation,
               std::string description);
Modifier param_constraint(std::string key, std::vector<Bytes> allowed);

// Permission to use any member of a set of resources. The modifier list
// is ordered on the wire but order-insensitive for evaluation.
struct Ticket {
  Token token;
  std::vector<Modifier> modifiers;

  static constexpr Tag kTag = Tag::Ticket;
  void encode_body(Encoder& e) const;
  static Ticket decode_body(Decoder& d);

  friend bool operator==(const Ticket&, const Ticket&) = default;
};

// One edge of a service agreement: holding the keying enrollment grants
// this ticket, subject to the edge's own modifiers.
struct TicketGrant {
  Ticket ticket;
  std::vector<Modifier> grantModifiers;

  static constexpr Tag kTag = Tag::TicketGrant;
  void encode_body(Encoder& e) const;
  static TicketGrant decode_body(Decoder& d);

  friend bool operator==(const TicketGrant&, const TicketGrant&) = default;
};

// "left implies right" edges. Cycles are legal; closure still terminates.
struct ImplicationMap {
  std::vector<std::pair<Enrollment, Enrollment>> edges;  // canonical order, no duplicates

  static constexpr Tag kTag = Tag::ImplicationMap;
  void encode_body(Encoder& e) const;
  static ImplicationMap decode_body(Decoder& d);

  // Sorts edges into canonical byte order and drops duplicates.
  void normalize();

  friend bool operator==(const ImplicationMap&, const ImplicationMap&) = default;
};

struct ServiceAgreement {
  OrgId consumerOrg;
  std::vector<std::pair<Enrollment, std::vector<TicketGrant>>> grants;  // canonical order

  static constexpr Tag kTag = Tag::ServiceAgreement;
  void encode_body(Encoder& e) const;
  static ServiceAgreement decode_body(Decoder& d);

  void normalize();

  friend bool operator==(const ServiceAgreement&, const ServiceAgreement&) = default;
};

enum class Verdict : std::uint8_t { Pass, Fail, NeedsConfirmation };

struct EvalContext {
  std::int64_t now = 0;
  std::map<Bytes, Bytes, LenLexLess> params;
  bool confirmGranted = false;
};

struct ModifierSet {
  std::vector<Modifier> members;  // enrollment layer, then agreement, then server
};

// Least fixpoint of E under the implication edges. Terminates on cycles.
std::vector<Enrollment> enrollment_closure(const std::vector<Enrollment>& e,
                                           const ImplicationMap& map);

struct GrantMatch {
  Enrollment enrollment;
  Ticket ticket;
  std::vector<Modifier> grantModifiers;
};

// Finds a grant whose ticket token appears among the candidates and whose
// enrollment appears in closedE. Deterministic tie-break: lowest ticket
// token in byte order, then lowest enrollment token.
std::optional<GrantMatch> agreement_lookup(const ServiceAgreement& agreement,
                                           const std::vector<Enrollment>& closedE,
                                           const std::vector<Ticket>& candidates);

Verdict eval_modifier(const Modifier& m, const EvalContext& ctx);

ModifierSet compose_modifiers(const std::vector<Modifier>& enrollMods,
                              const std::vector<Modifier>& agreementMods,
                              const std::vector<Modifier>& serverMods);

// Conjunction over members: Fail dominates, NeedsConfirmation dominates Pass.
Verdict eval_modifier_set(const ModifierSet& set, const EvalContext& ctx);

}  // namespace usher

#endif  // USHER_TOKENS_HPP
