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

#include "usher/tokens.hpp"

#include <algorithm>
#include <set>

namespace usher {

void Token::encode_body(Encoder& e) const {
  e.uuid(creator);
  e.bytes(value);
}

Token Token::decode_body(Decoder& d) {
  Token t;
  t.creator = d.uuid();
  t.value = d.bytes();
  if (t.value.empty() || t.value.size() > 64) throw CodecError("token value size");
  return t;
}

bool token_less(const Token& a, const Token& b) {
  if (a.creator.data != b.creator.data) return a.creator.data < b.creator.data;
  return LenLexLess{}(a.value, b.value);
}

void Enrollment::encode_body(Encoder& e) const {
  token.encode_body(e);
  e.uuid(org);
  e.bytes(group);
}

Enrollment Enrollment::decode_body(Decoder& d) {
  Enrollment en;
  en.token = Token::decode_body(d);
  en.org = d.uuid();
  if (en.org != en.token.creator) throw CodecError("enrollment org mismatch");
  en.group = d.bytes();
  return en;
}

std::string DebitAmount::format() const {
  if (!decimal) return std::to_string(raw);
  std::string whole = std::to_string(raw / 10000);
  std::string frac = std::to_string(raw % 10000);
  return whole + "." + std::string(4 - frac.size(), '0') + frac;
}

std::optional<DebitAmount> DebitAmount::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t dot = text.find('.');
  std::string_view wholePart = text.substr(0, dot == std::string_view::npos ? text.size() : dot);
  if (wholePart.empty()) return std::nullopt;
  std::int64_t value = 0;
  for (char c : wholePart) {
    if (c < '0' || c > '9') return std::nullopt;
    if (value > (kMaxDecimalRaw - (c - '0')) / 10) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  if (dot == std::string_view::npos) return DebitAmount::integer(value);
  std::string_view fracPart = text.substr(dot + 1);
  if (fracPart.empty() || fracPart.size() > 4) return std::nullopt;
  std::int64_t frac = 0;
  for (char c : fracPart) {
    if (c < '0' || c > '9') return std::nullopt;
    frac = frac * 10 + (c - '0');
  }
  for (std::size_t i = fracPart.size(); i < 4; ++i) frac *= 10;
  if (value > (kMaxDecimalRaw - frac) / 10000) return std::nullopt;
  return DebitAmount::fixed(value * 10000 + frac);
}

namespace {

void encode_amount(Encoder& e, const DebitAmount& a) {
  e.boolean(a.decimal);
  e.i64(a.raw);
}

DebitAmount decode_amount(Decoder& d) {
  DebitAmount a;
  a.decimal = d.boolean();
  a.raw = d.i64();
  if (a.raw < 0) throw CodecError("negative amount");
  if (a.decimal && a.raw > kMaxDecimalRaw) throw CodecError("amount overflow");
  return a;
}

void encode_modifier_list(Encoder& e, const std::vector<Modifier>& mods) {
  e.u32(static_cast<std::uint32_t>(mods.size()));
  for (const Modifier& m : mods) m.encode_body(e);
}

std::vector<Modifier> decode_modifier_list(Decoder& d) {
  std::uint32_t n = d.u32();
  std::vector<Modifier> mods;
  for (std::uint32_t i = 0; i < n; ++i) mods.push_back(Modifier::decode_body(d));
  return mods;
}

constexpr std::uint8_t kTimeWindow = 0x01;
constexpr std::uint8_t kTimeOfDay = 0x02;
constexpr std::uint8_t kDebit = 0x03;
constexpr std::uint8_t kParamConstraint = 0x04;

}  // namespace

void Modifier::encode_body(Encoder& e) const {
  if (const auto* tw = std::get_if<TimeWindowModifier>(&v)) {
    e.u8(kTimeWindow);
    e.i64(tw->start);
    e.i64(tw->end);
  } else if (const auto* td = std::get_if<TimeOfDayModifier>(&v)) {
    e.u8(kTimeOfDay);
    e.u64(td->startMinute);
    e.u64(td->endMinute);
  } else if (const auto* db = std::get_if<DebitModifier>(&v)) {
    e.u8(kDebit);
    encode_amount(e, db->remaining);
    e.str(db->unit);
    e.boolean(db->requiresConfirmation);
    e.str(db->description);
  } else {
    const auto& pc = std::get<ParamConstraintModifier>(v);
    e.u8(kParamConstraint);
    e.str(pc.paramKey);
    e.u32(static_cast<std::uint32_t>(pc.allowedValues.size()));
    for (const Bytes& b : pc.allowedValues) e.bytes(b);
  }
}

Modifier Modifier::decode_body(Decoder& d) {
  Modifier m;
  switch (d.u8()) {
    case kTimeWindow: {
      TimeWindowModifier tw;
      tw.start = d.i64();
      tw.end = d.i64();
      if (tw.start > tw.end) throw CodecError("window order");
      m.v = tw;
      break;
    }
    case kTimeOfDay: {
      TimeOfDayModifier td;
      std::uint64_t s = d.u64(), e = d.u64();
      if (s > 1439 || e > 1439) throw CodecError("minute range");
      td.startMinute = static_cast<std::uint32_t>(s);
      td.endMinute = static_cast<std::uint32_t>(e);
      m.v = td;
      break;
    }
    case kDebit: {
      DebitModifier db;
      db.remaining = decode_amount(d);
      db.unit = d.str();
      db.requiresConfirmation = d.boolean();
      db.description = d.str();
      m.v = db;
      break;
    }
    case kParamConstraint: {
      ParamConstraintModifier pc;
      pc.paramKey = d.str();
      std::uint32_t n = d.u32();
      for (std::uint32_t i = 0; i < n; ++i) pc.allowedValues.push_back(d.bytes());
      m.v = pc;
      break;
    }
    default:
      throw CodecError("modifier kind");
  }
  return m;
}

Modifier time_window(std::int64_t start, std::int64_t end) {
  return Modifier{TimeWindowModifier{start, end}};
}

Modifier time_of_day(std::uint32_t startMinute, std::uint32_t endMinute) {
  return Modifier{TimeOfDayModifier{startMinute, endMinute}};
}

Modifier debit(DebitAmount remaining, std::string unit, bool requiresConfirmation,
               std::string description) {
  return Modifier{
      DebitModifier{remaining, std::move(unit), requiresConfirmation, std::move(description)}};
}

Modifier param_constraint(std::string key, std::vector<Bytes> allowed) {
  return Modifier{ParamConstraintModifier{std::move(key), std::move(allowed)}};
}

void Ticket::encode_body(Encoder& e) const {
  token.encode_body(e);
  encode_modifier_list(e, modifiers);
}

Ticket Ticket::decode_body(Decoder& d) {
  Ticket t;
  t.token = Token::decode_body(d);
  t.modifiers = decode_modifier_list(d);
  return t;
}

void TicketGrant::encode_body(Encoder& e) const {
  ticket.encode_body(e);
  encode_modifier_list(e, grantModifiers);
}

TicketGrant TicketGrant::decode_body(Decoder& d) {
  TicketGrant g;
  g.ticket = Ticket::decode_body(d);
  g.grantModifiers = decode_modifier_list(d);
  return g;
}

void ImplicationMap::encode_body(Encoder& e) const {
  e.sorted_set(edges.begin(), edges.end(), [](Encoder& sub, const auto& edge) {
    edge.first.encode_body(sub);
    edge.second.encode_body(sub);
  });
}

ImplicationMap ImplicationMap::decode_body(Decoder& d) {
  ImplicationMap m;
  d.sorted_set([&m](Decoder& sub) {
    Enrollment l = Enrollment::decode_body(sub);
    Enrollment r = Enrollment::decode_body(sub);
    m.edges.emplace_back(std::move(l), std::move(r));
  });
  return m;
}

void ImplicationMap::normalize() {
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    Encoder ea, eb;
    a.first.encode_body(ea);
    a.second.encode_body(ea);
    b.first.encode_body(eb);
    b.second.encode_body(eb);
    return ea.data() < eb.data();
  });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

void ServiceAgreement::encode_body(Encoder& e) const {
  e.uuid(consumerOrg);
  e.sorted_set(grants.begin(), grants.end(), [](Encoder& sub, const auto& entry) {
    entry.first.encode_body(sub);
    sub.sorted_set(entry.second.begin(), entry.second.end(),
                   [](Encoder& gs, const TicketGrant& g) { g.encode_body(gs); });
  });
}

ServiceAgreement ServiceAgreement::decode_body(Decoder& d) {
  ServiceAgreement a;
  a.consumerOrg = d.uuid();
  d.sorted_map(
      [&a](Decoder& sub) {
        a.grants.emplace_back(Enrollment::decode_body(sub), std::vector<TicketGrant>{});
      },
      [&a](Decoder& sub) {
        sub.sorted_set(
            [&a](Decoder& gs) { a.grants.back().second.push_back(TicketGrant::decode_body(gs)); });
      });
  return a;
}

void ServiceAgreement::normalize() {
  // Merge duplicate enrollment keys, then order everything canonically.
  std::vector<std::pair<Enrollment, std::vector<TicketGrant>>> merged;
  for (auto& [enr, list] : grants) {
    Bytes key = body_bytes(enr);
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&key](const auto& m) { return body_bytes(m.first) == key; });
    if (it == merged.end()) {
      merged.emplace_back(std::move(enr), std::move(list));
    } else {
      it->second.insert(it->second.end(), list.begin(), list.end());
    }
  }
  grants = std::move(merged);
  for (auto& [enr, list] : grants) {
    std::sort(list.begin(), list.end(), [](const TicketGrant& a, const TicketGrant& b) {
      return body_bytes(a) < body_bytes(b);
    });
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  std::sort(grants.begin(), grants.end(), [](const auto& a, const auto& b) {
    return body_bytes(a.first) < body_bytes(b.first);
  });
}

std::vector<Enrollment> enrollment_closure(const std::vector<Enrollment>& e,
                                           const ImplicationMap& map) {
  std::map<Bytes, std::vector<const Enrollment*>> adj;
  for (const auto& [l, r] : map.edges) adj[body_bytes(l)].push_back(&r);

  std::map<Bytes, Enrollment> reached;
  std::vector<const Enrollment*> work;
  for (const Enrollment& en : e) work.push_back(&en);
  while (!work.empty()) {
    const Enrollment* cur = work.back();
    work.pop_back();
    Bytes key = body_bytes(*cur);
    if (!reached.emplace(key, *cur).second) continue;
    auto it = adj.find(key);
    if (it == adj.end()) continue;
    for (const Enrollment* next : it->second) work.push_back(next);
  }

  std::vector<Enrollment> out;
  out.reserve(reached.size());
  for (auto& [key, en] : reached) out.push_back(std::move(en));
  return out;  // reached is byte-keyed, so this is canonical order
}

std::optional<GrantMatch> agreement_lookup(const ServiceAgreement& agreement,
                                           const std::vector<Enrollment>& closedE,
                                           const std::vector<Ticket>& candidates) {
  std::set<Bytes> closed;
  for (const Enrollment& en : closedE) closed.insert(body_bytes(en));
  std::set<Bytes> wanted;
  for (const Ticket& t : candidates) wanted.insert(body_bytes(t.token));

  std::optional<GrantMatch> best;
  std::pair<Bytes, Bytes> bestKey;
  for (const auto& [enr, list] : agreement.grants) {
    if (!closed.count(body_bytes(enr))) continue;
    for (const TicketGrant& g : list) {
      Bytes ticketKey = body_bytes(g.ticket.token);
      if (!wanted.count(ticketKey)) continue;
      std::pair<Bytes, Bytes> key{std::move(ticketKey), body_bytes(enr.token)};
      if (!best || key < bestKey) {
        bestKey = std::move(key);
        best = GrantMatch{enr, g.ticket, g.grantModifiers};
      }
    }
  }
  return best;
}

Verdict eval_modifier(const Modifier& m, const EvalContext& ctx) {
  if (const auto* tw = std::get_if<TimeWindowModifier>(&m.v)) {
    return (tw->start <= ctx.now && ctx.now <= tw->end) ? Verdict::Pass : Verdict::Fail;
  }
  if (const auto* td = std::get_if<TimeOfDayModifier>(&m.v)) {
    std::uint32_t minute = static_cast<std::uint32_t>((ctx.now % 86400) / 60);
    bool in = td->startMinute <= td->endMinute
                  ? (td->startMinute <= minute && minute <= td->endMinute)
                  : (minute >= td->startMinute || minute <= td->endMinute);
    return in ? Verdict::Pass : Verdict::Fail;
  }
  if (const auto* db = std::get_if<DebitModifier>(&m.v)) {
    if (db->requiresConfirmation && !ctx.confirmGranted) return Verdict::NeedsConfirmation;
    return db->remaining.raw < db->remaining.unit_raw() ? Verdict::Fail : Verdict::Pass;
  }
  const auto& pc = std::get<ParamConstraintModifier>(m.v);
  auto it = ctx.params.find(to_bytes(pc.paramKey));
  if (it == ctx.params.end()) return Verdict::Fail;
  for (const Bytes& allowed : pc.allowedValues)
    if (allowed == it->second) return Verdict::Pass;
  return Verdict::Fail;
}

ModifierSet compose_modifiers(const std::vector<Modifier>& enrollMods,
                              const std::vector<Modifier>& agreementMods,
                              const std::vector<Modifier>& serverMods) {
  ModifierSet set;
  set.members.reserve(enrollMods.size() + agreementMods.size() + serverMods.size());
  set.members.insert(set.members.end(), enrollMods.begin(), enrollMods.end());
  set.members.insert(set.members.end(), agreementMods.begin(), agreementMods.end());
  set.members.insert(set.members.end(), serverMods.begin(), serverMods.end());
  return set;
}

Verdict eval_modifier_set(const ModifierSet& set, const EvalContext& ctx) {
  bool needsConfirm = false;
  for (const Modifier& m : set.members) {
    switch (eval_modifier(m, ctx)) {
      case Verdict::Fail:
        return Verdict::Fail;
      case Verdict::NeedsConfirmation:
        needsConfirm = true;
        break;
      case Verdict::Pass:
        break;
    }
  }
  return needsConfirm ? Verdict::NeedsConfirmation : Verdict::Pass;
}

}  // namespace usher
