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

// Policy algebra tests: enrollment closure, agreement lookup, and
// modifier evaluation, each checked against an independent naive
// re-derivation plus hand-computed fixtures.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "usher/bytes.hpp"
#include "usher/tokens.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace usher;

namespace {

std::set<Bytes> as_keys(const std::vector<Enrollment>& es) {
  std::set<Bytes> out;
  for (const Enrollment& e : es) out.insert(canonical_encode(e));
  return out;
}

Enrollment named(const Uuid& org, const std::string& group) {
  Bytes value(group.begin(), group.end());
  return Enrollment{Token{org, value, group}, org, value};
}

}  // namespace

TEST_CASE("token_less agrees with canonical byte order") {
  DetRng rng(301);
  std::vector<Token> pool;
  for (int i = 0; i < 40; ++i) {
    Bytes value = gen::random_bytes(rng, 8);
    if (value.empty()) value.push_back(static_cast<std::uint8_t>(i));
    pool.push_back(Token{rng.below(2) ? rng.uuid() : Uuid{}, value, ""});
  }
  for (const Token& a : pool) {
    for (const Token& b : pool) {
      CHECK(token_less(a, b) == (body_bytes(a) < body_bytes(b)));
    }
  }
}

TEST_CASE("membership chain closes upward only") {
  // A purchasing-department member belongs to the administrative division
  // and is therefore a company employee; the reverse never follows.
  Uuid org = DetRng(17).uuid();
  Enrollment purchasing = named(org, "purchasing");
  Enrollment adminDivision = named(org, "adminDivision");
  Enrollment employee = named(org, "acmeEmployee");

  ImplicationMap map;
  map.edges = {{purchasing, adminDivision}, {adminDivision, employee}};
  map.normalize();

  auto fromPurchasing = enrollment_closure({purchasing}, map);
  CHECK(as_keys(fromPurchasing) ==
        as_keys({purchasing, adminDivision, employee}));

  auto fromDivision = enrollment_closure({adminDivision}, map);
  CHECK(as_keys(fromDivision) == as_keys({adminDivision, employee}));

  auto fromEmployee = enrollment_closure({employee}, map);
  CHECK(as_keys(fromEmployee) == as_keys({employee}));
}

TEST_CASE("closure handles cycles, empty maps, and repeats") {
  Uuid org = DetRng(18).uuid();
  Enrollment a = named(org, "a");
  Enrollment b = named(org, "b");
  Enrollment c = named(org, "c");

  SUBCASE("two-cycle terminates with both members") {
    ImplicationMap map;
    map.edges = {{a, b}, {b, a}};
    map.normalize();
    CHECK(as_keys(enrollment_closure({a}, map)) == as_keys({a, b}));
  }

  SUBCASE("self-loop adds nothing") {
    ImplicationMap map;
    map.edges = {{a, a}};
    map.normalize();
    CHECK(as_keys(enrollment_closure({a}, map)) == as_keys({a}));
  }

  SUBCASE("empty map returns the base set") {
    CHECK(as_keys(enrollment_closure({a, c}, ImplicationMap{})) ==
          as_keys({a, c}));
  }

  SUBCASE("unreachable edges stay out") {
    ImplicationMap map;
    map.edges = {{b, c}};
    map.normalize();
    CHECK(as_keys(enrollment_closure({a}, map)) == as_keys({a}));
  }
}

TEST_CASE("closure is idempotent, monotone, and matches the oracle") {
  DetRng rng(77001);
  for (int i = 0; i < 300; ++i) {
    gen::PolicyInstance inst = gen::policy_instance(rng);

    auto lib = enrollment_closure(inst.held, inst.implications);
    auto ref = oracle::closure(inst.held, inst.implications);
    CHECK(as_keys(lib) == as_keys(ref));

    // Closing again changes nothing.
    CHECK(as_keys(enrollment_closure(lib, inst.implications)) == as_keys(lib));

    // A smaller base never closes to a larger set.
    if (inst.held.size() > 1) {
      std::vector<Enrollment> fewer(inst.held.begin(), inst.held.end() - 1);
      auto sub = as_keys(enrollment_closure(fewer, inst.implications));
      auto full = as_keys(lib);
      CHECK(std::includes(full.begin(), full.end(), sub.begin(), sub.end()));
    }
  }
}

TEST_CASE("agreement lookup matches the full-scan oracle") {
  DetRng rng(77002);
  int hits = 0;
  int misses = 0;
  for (int i = 0; i < 400; ++i) {
    gen::PolicyInstance inst = gen::policy_instance(rng);
    auto closed = enrollment_closure(inst.held, inst.implications);

    std::vector<Ticket> wrapped;
    for (const Token& t : inst.candidates) wrapped.push_back(Ticket{t, {}});
    auto lib = agreement_lookup(inst.agreement, closed, wrapped);
    auto ref = oracle::lookup(inst.agreement, closed, inst.candidates);

    REQUIRE(lib.has_value() == ref.has_value());
    if (!lib) {
      ++misses;
      continue;
    }
    ++hits;
    CHECK(canonical_encode(lib->enrollment) == canonical_encode(ref->enrollment));
    CHECK(canonical_encode(lib->ticket) == canonical_encode(ref->ticket));
    REQUIRE(lib->grantModifiers.size() == ref->grantModifiers.size());
    for (std::size_t k = 0; k < lib->grantModifiers.size(); ++k) {
      CHECK(canonical_encode(lib->grantModifiers[k]) ==
            canonical_encode(ref->grantModifiers[k]));
    }
  }
  // The generator must exercise both outcomes or the equivalence is vacuous.
  CHECK(hits > 50);
  CHECK(misses > 50);
}

TEST_CASE("lookup tie-breaks on ticket token, then enrollment token") {
  DetRng rng(4242);
  Uuid org = rng.uuid();
  Uuid cc = rng.uuid();
  Enrollment early = named(org, "aaa");
  Enrollment late = named(org, "zzz");
  Token lowTicket{cc, Bytes{0x01}, ""};
  Token highTicket{cc, Bytes{0x02}, ""};

  ServiceAgreement ag;
  ag.consumerOrg = org;
  ag.grants = {
      {late, {TicketGrant{Ticket{lowTicket, {}}, {}}}},
      {early, {TicketGrant{Ticket{highTicket, {}}, {}}}},
  };
  ag.normalize();

  SUBCASE("lowest ticket token wins even from the later enrollment") {
    auto hit = agreement_lookup(ag, {early, late},
                                {Ticket{lowTicket, {}}, Ticket{highTicket, {}}});
    REQUIRE(hit.has_value());
    CHECK(hit->ticket.token == lowTicket);
    CHECK(canonical_encode(hit->enrollment) == canonical_encode(late));
  }

  SUBCASE("same ticket from two enrollments: lowest enrollment token wins") {
    ServiceAgreement both;
    both.consumerOrg = org;
    both.grants = {
        {late, {TicketGrant{Ticket{lowTicket, {}}, {time_window(1, 2)}}}},
        {early, {TicketGrant{Ticket{lowTicket, {}}, {time_window(3, 4)}}}},
    };
    both.normalize();
    auto hit = agreement_lookup(both, {early, late}, {Ticket{lowTicket, {}}});
    REQUIRE(hit.has_value());
    CHECK(canonical_encode(hit->enrollment) == canonical_encode(early));
    REQUIRE(hit->grantModifiers.size() == 1);
    CHECK(canonical_encode(hit->grantModifiers[0]) ==
          canonical_encode(time_window(3, 4)));
  }

  SUBCASE("no overlap means no hit") {
    CHECK(!agreement_lookup(ag, {early}, {Ticket{lowTicket, {}}}).has_value());
    Token stranger{cc, Bytes{0x7f}, ""};
    CHECK(!agreement_lookup(ag, {early, late}, {Ticket{stranger, {}}}).has_value());
  }
}

TEST_CASE("time window is inclusive at both endpoints") {
  Modifier m = time_window(100, 200);
  EvalContext ctx;
  for (auto [now, want] : std::vector<std::pair<std::int64_t, Verdict>>{
           {99, Verdict::Fail},
           {100, Verdict::Pass},
           {150, Verdict::Pass},
           {200, Verdict::Pass},
           {201, Verdict::Fail}}) {
    ctx.now = now;
    CHECK(eval_modifier(m, ctx) == want);
  }
}

TEST_CASE("time of day wraps across midnight") {
  EvalContext ctx;

  Modifier plain = time_of_day(480, 1079);  // 08:00 through 17:59
  ctx.now = 7 * 86400 + 480 * 60;  // 08:00 exactly, any day
  CHECK(eval_modifier(plain, ctx) == Verdict::Pass);
  ctx.now = 7 * 86400 + 1079 * 60 + 59;  // last second of 17:59
  CHECK(eval_modifier(plain, ctx) == Verdict::Pass);
  ctx.now = 7 * 86400 + 1080 * 60;  // 18:00
  CHECK(eval_modifier(plain, ctx) == Verdict::Fail);
  ctx.now = 7 * 86400 + 479 * 60 + 59;  // 07:59:59
  CHECK(eval_modifier(plain, ctx) == Verdict::Fail);

  Modifier night = time_of_day(1380, 120);  // 23:00 through 02:00
  ctx.now = 1380 * 60;
  CHECK(eval_modifier(night, ctx) == Verdict::Pass);
  ctx.now = 30;  // 00:00:30
  CHECK(eval_modifier(night, ctx) == Verdict::Pass);
  ctx.now = 120 * 60 + 59;
  CHECK(eval_modifier(night, ctx) == Verdict::Pass);
  ctx.now = 121 * 60;
  CHECK(eval_modifier(night, ctx) == Verdict::Fail);
  ctx.now = 720 * 60;  // noon
  CHECK(eval_modifier(night, ctx) == Verdict::Fail);
}

TEST_CASE("debit verdicts depend on balance and confirmation") {
  EvalContext ctx;
  ctx.now = 0;

  SUBCASE("plain counter") {
    Modifier one = debit(DebitAmount::integer(1), "uses", false, "");
    CHECK(eval_modifier(one, ctx) == Verdict::Pass);
    Modifier zero = debit(DebitAmount::integer(0), "uses", false, "");
    CHECK(eval_modifier(zero, ctx) == Verdict::Fail);
  }

  SUBCASE("decimal balance below one unit cannot cover a use") {
    Modifier half = debit(DebitAmount::fixed(5000), "credits", false, "");
    CHECK(eval_modifier(half, ctx) == Verdict::Fail);
    Modifier exact = debit(DebitAmount::fixed(10000), "credits", false, "");
    CHECK(eval_modifier(exact, ctx) == Verdict::Pass);
  }

  SUBCASE("confirmation request precedes the balance check") {
    Modifier ask = debit(DebitAmount::integer(0), "uses", true, "");
    ctx.confirmGranted = false;
    CHECK(eval_modifier(ask, ctx) == Verdict::NeedsConfirmation);
    ctx.confirmGranted = true;
    CHECK(eval_modifier(ask, ctx) == Verdict::Fail);

    Modifier funded = debit(DebitAmount::integer(2), "uses", true, "");
    ctx.confirmGranted = false;
    CHECK(eval_modifier(funded, ctx) == Verdict::NeedsConfirmation);
    ctx.confirmGranted = true;
    CHECK(eval_modifier(funded, ctx) == Verdict::Pass);
  }
}

TEST_CASE("param constraints require a present, allowed value") {
  Modifier m = param_constraint("mode", {to_bytes("read"), to_bytes("list")});
  EvalContext ctx;

  ctx.params[to_bytes("mode")] = to_bytes("read");
  CHECK(eval_modifier(m, ctx) == Verdict::Pass);

  ctx.params[to_bytes("mode")] = to_bytes("write");
  CHECK(eval_modifier(m, ctx) == Verdict::Fail);

  ctx.params.clear();
  CHECK(eval_modifier(m, ctx) == Verdict::Fail);

  // Empty allow-list can never pass.
  Modifier never = param_constraint("mode", {});
  ctx.params[to_bytes("mode")] = to_bytes("read");
  CHECK(eval_modifier(never, ctx) == Verdict::Fail);
}

TEST_CASE("single modifier evaluation matches the oracle") {
  DetRng rng(77003);
  for (int i = 0; i < 2000; ++i) {
    std::int64_t now = 1000000 + static_cast<std::int64_t>(rng.below(2000));
    Modifier m = gen::modifier(rng, now);
    EvalContext ctx;
    ctx.now = now;
    ctx.confirmGranted = rng.below(2) == 0;
    if (rng.below(2) == 0)
      ctx.params[to_bytes("mode")] = to_bytes("v" + std::to_string(rng.below(3)));
    CHECK(eval_modifier(m, ctx) ==
          oracle::eval_one(m, ctx.now, ctx.params, ctx.confirmGranted));
  }
}

TEST_CASE("modifier sets conjoin with Fail over NeedsConfirmation over Pass") {
  EvalContext ctx;
  ctx.now = 150;

  Modifier pass = time_window(100, 200);
  Modifier fail = time_window(300, 400);
  Modifier ask = debit(DebitAmount::integer(5), "uses", true, "");

  auto verdict = [&](std::vector<Modifier> mods) {
    return eval_modifier_set(ModifierSet{std::move(mods)}, ctx);
  };

  CHECK(verdict({}) == Verdict::Pass);
  CHECK(verdict({pass, pass}) == Verdict::Pass);
  CHECK(verdict({pass, ask}) == Verdict::NeedsConfirmation);
  CHECK(verdict({ask, fail}) == Verdict::Fail);
  CHECK(verdict({fail, ask}) == Verdict::Fail);
  CHECK(verdict({pass, fail, pass}) == Verdict::Fail);
}

TEST_CASE("set evaluation matches independent per-member evaluation") {
  DetRng rng(77004);
  for (int i = 0; i < 500; ++i) {
    std::int64_t now = 1000000 + static_cast<std::int64_t>(rng.below(2000));
    std::vector<Modifier> a = gen::modifiers(rng, now, 3);
    std::vector<Modifier> b = gen::modifiers(rng, now, 3);
    std::vector<Modifier> c = gen::modifiers(rng, now, 3);

    EvalContext ctx;
    ctx.now = now;
    ctx.confirmGranted = rng.below(2) == 0;
    if (rng.below(2) == 0) ctx.params[to_bytes("mode")] = to_bytes("v0");

    ModifierSet set = compose_modifiers(a, b, c);
    std::vector<Modifier> all = a;
    all.insert(all.end(), b.begin(), b.end());
    all.insert(all.end(), c.begin(), c.end());

    REQUIRE(set.members.size() == all.size());
    for (std::size_t k = 0; k < all.size(); ++k) {
      CHECK(canonical_encode(set.members[k]) == canonical_encode(all[k]));
    }
    CHECK(eval_modifier_set(set, ctx) ==
          oracle::eval_all(all, ctx.now, ctx.params, ctx.confirmGranted));
  }
}

TEST_CASE("normalize is stable under repetition and input order") {
  DetRng rng(77005);
  for (int i = 0; i < 100; ++i) {
    gen::PolicyInstance inst = gen::policy_instance(rng);

    ServiceAgreement again = inst.agreement;
    again.normalize();
    CHECK(canonical_encode(again) == canonical_encode(inst.agreement));

    ServiceAgreement shuffled = inst.agreement;
    std::reverse(shuffled.grants.begin(), shuffled.grants.end());
    shuffled.normalize();
    CHECK(canonical_encode(shuffled) == canonical_encode(inst.agreement));

    ImplicationMap mapAgain = inst.implications;
    std::reverse(mapAgain.edges.begin(), mapAgain.edges.end());
    mapAgain.normalize();
    CHECK(canonical_encode(mapAgain) == canonical_encode(inst.implications));
  }
}
