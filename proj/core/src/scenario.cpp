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

#include "usher/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "usher/attacks.hpp"
#include "usher/files.hpp"

namespace usher {

namespace {

using nlohmann::json;

// Validation failure with the JSON path that caused it.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] void reject(const std::string& path, const std::string& why) {
  throw SchemaError(path + ": " + why);
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) reject(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      reject(path + "." + key, "unknown key");
    }
  }
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) reject(path + "." + key, "missing");
  if (!obj[key].is_string()) reject(path + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

std::string get_string_or(const json& obj, const std::string& path, const char* key,
                          const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) reject(path + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

std::int64_t get_int(const json& obj, const std::string& path, const char* key,
                     std::int64_t fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) reject(path + "." + key, "missing");
    return fallback;
  }
  if (!obj[key].is_number_integer()) reject(path + "." + key, "expected an integer");
  return obj[key].get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) reject(path + "." + key, "expected a boolean");
  return obj[key].get<bool>();
}

// Names double as token values, so the token length bound applies.
void check_name(const std::string& name, const std::string& path) {
  if (name.empty() || name.size() > 64) reject(path, "name must be 1..64 bytes");
}

Modifier parse_modifier(const json& m, const std::string& path) {
  std::string type = get_string(m, path, "type");
  if (type == "timeWindow") {
    require_keys(m, path, {"type", "start", "end"});
    std::int64_t start = get_int(m, path, "start", 0, true);
    std::int64_t end = get_int(m, path, "end", 0, true);
    if (start > end) reject(path, "start after end");
    return time_window(start, end);
  }
  if (type == "timeOfDay") {
    require_keys(m, path, {"type", "startMinute", "endMinute"});
    std::int64_t s = get_int(m, path, "startMinute", 0, true);
    std::int64_t e = get_int(m, path, "endMinute", 0, true);
    if (s < 0 || s > 1439 || e < 0 || e > 1439) reject(path, "minutes must be 0..1439");
    return time_of_day(static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(e));
  }
  if (type == "debit") {
    require_keys(m, path, {"type", "remaining", "unit", "requiresConfirmation", "description"});
    std::string remainingText;
    if (m.contains("remaining") && m["remaining"].is_number_integer()) {
      remainingText = std::to_string(m["remaining"].get<std::int64_t>());
    } else {
      remainingText = get_string(m, path, "remaining");
    }
    auto amount = DebitAmount::parse(remainingText);
    if (!amount) reject(path + ".remaining", "not a debit amount");
    if (amount->raw < 0) reject(path + ".remaining", "must not be negative");
    return debit(*amount, get_string_or(m, path, "unit", "units"),
                 get_bool(m, path, "requiresConfirmation", false),
                 get_string_or(m, path, "description", ""));
  }
  if (type == "paramConstraint") {
    require_keys(m, path, {"type", "key", "values"});
    std::string key = get_string(m, path, "key");
    if (key.empty()) reject(path + ".key", "must not be empty");
    if (!m.contains("values") || !m["values"].is_array()) {
      reject(path + ".values", "expected an array");
    }
    std::vector<Bytes> allowed;
    for (std::size_t i = 0; i < m["values"].size(); ++i) {
      const json& v = m["values"][i];
      if (!v.is_string()) reject(path + ".values[" + std::to_string(i) + "]", "expected a string");
      std::string s = v.get<std::string>();
      allowed.push_back(Bytes(s.begin(), s.end()));
    }
    return param_constraint(key, std::move(allowed));
  }
  reject(path + ".type", "unknown modifier type");
}

std::vector<Modifier> parse_modifier_list(const json& obj, const std::string& path,
                                          const char* key) {
  std::vector<Modifier> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) reject(path + "." + key, "expected an array");
  for (std::size_t i = 0; i < obj[key].size(); ++i) {
    out.push_back(parse_modifier(obj[key][i], path + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<AclDecl> parse_acl(const json& arr, const std::string& path) {
  if (!arr.is_array()) reject(path, "expected an array");
  std::vector<AclDecl> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    const json& e = arr[i];
    require_keys(e, p, {"ticket", "resources"});
    AclDecl decl;
    decl.ticket = get_string(e, p, "ticket");
    check_name(decl.ticket, p + ".ticket");
    if (!e.contains("resources") || !e["resources"].is_array()) {
      reject(p + ".resources", "expected an array");
    }
    for (std::size_t j = 0; j < e["resources"].size(); ++j) {
      std::string rp = p + ".resources[" + std::to_string(j) + "]";
      const json& r = e["resources"][j];
      require_keys(r, rp, {"resource", "modifiers"});
      AclResourceDecl rd;
      rd.resource = get_string(r, rp, "resource");
      check_name(rd.resource, rp + ".resource");
      rd.modifiers = parse_modifier_list(r, rp, "modifiers");
      decl.resources.push_back(std::move(rd));
    }
    out.push_back(std::move(decl));
  }
  return out;
}

std::vector<GrantDecl> parse_grants(const json& arr, const std::string& path) {
  if (!arr.is_array()) reject(path, "expected an array");
  std::vector<GrantDecl> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    const json& g = arr[i];
    require_keys(g, p, {"group", "tickets"});
    GrantDecl decl;
    decl.group = get_string(g, p, "group");
    check_name(decl.group, p + ".group");
    if (!g.contains("tickets") || !g["tickets"].is_array()) {
      reject(p + ".tickets", "expected an array");
    }
    for (std::size_t j = 0; j < g["tickets"].size(); ++j) {
      std::string tp = p + ".tickets[" + std::to_string(j) + "]";
      const json& t = g["tickets"][j];
      require_keys(t, tp, {"ticket", "modifiers", "grantModifiers"});
      TicketGrantDecl td;
      td.ticket = get_string(t, tp, "ticket");
      check_name(td.ticket, tp + ".ticket");
      td.ticketModifiers = parse_modifier_list(t, tp, "modifiers");
      td.grantModifiers = parse_modifier_list(t, tp, "grantModifiers");
      decl.tickets.push_back(std::move(td));
    }
    out.push_back(std::move(decl));
  }
  return out;
}

RotationPolicy parse_rotation(const std::string& text, const std::string& path) {
  if (text == "never") return RotationPolicy::Never;
  if (text == "onRefresh") return RotationPolicy::OnRefresh;
  if (text == "everyRequest") return RotationPolicy::EveryRequest;
  reject(path, "unknown rotation policy");
}

bool valid_expect(const std::string& text) {
  if (text == "answer" || text == "ok" || text == "none" || text == "reply" || text == "error") {
    return true;
  }
  FailureCode code;
  return failure_code_from_name(text, code);
}

ParamMap parse_params(const json& obj, const std::string& path) {
  ParamMap out;
  if (!obj.contains("params")) return out;
  const json& p = obj["params"];
  if (!p.is_object()) reject(path + ".params", "expected an object");
  for (const auto& [key, value] : p.items()) {
    if (!value.is_string()) reject(path + ".params." + key, "expected a string");
    std::string v = value.get<std::string>();
    out[Bytes(key.begin(), key.end())] = Bytes(v.begin(), v.end());
  }
  return out;
}

ScenarioStep parse_step(const json& s, const std::string& path) {
  ScenarioStep step;
  step.op = get_string(s, path, "op");

  auto common = [&](std::initializer_list<const char*> extra) {
    std::vector<const char*> keys{"op", "expect", "expectMessages"};
    keys.insert(keys.end(), extra.begin(), extra.end());
    if (!s.is_object()) reject(path, "expected an object");
    for (const auto& [key, value] : s.items()) {
      (void)value;
      if (std::find_if(keys.begin(), keys.end(),
                       [&](const char* a) { return key == a; }) == keys.end()) {
        reject(path + "." + key, "unknown key");
      }
    }
  };

  if (step.op == "advance") {
    common({"by"});
    step.by = get_int(s, path, "by", 0, true);
    if (step.by < 0) reject(path + ".by", "must not be negative");
  } else if (step.op == "refresh") {
    common({"user", "org"});
    step.user = get_string(s, path, "user");
    step.org = get_string_or(s, path, "org", "");
  } else if (step.op == "rotate") {
    common({"user"});
    step.user = get_string(s, path, "user");
  } else if (step.op == "request") {
    common({"user", "server", "resource", "params", "confirm", "expectAnswer"});
    step.user = get_string(s, path, "user");
    step.server = get_string(s, path, "server");
    step.resource = get_string(s, path, "resource");
    step.params = parse_params(s, path);
    if (s.contains("confirm")) step.confirm = get_bool(s, path, "confirm", false);
    if (s.contains("expectAnswer")) step.expectAnswer = get_string(s, path, "expectAnswer");
  } else if (step.op == "replay") {
    common({"seq"});
    step.seq = static_cast<std::uint64_t>(get_int(s, path, "seq", 0, true));
  } else if (step.op == "tamper") {
    common({"seq", "byte", "value"});
    step.seq = static_cast<std::uint64_t>(get_int(s, path, "seq", 0, true));
    std::int64_t b = get_int(s, path, "byte", 0, true);
    std::int64_t v = get_int(s, path, "value", 0, true);
    if (b < 0) reject(path + ".byte", "must not be negative");
    if (v < 0 || v > 255) reject(path + ".value", "must be 0..255");
    step.byteIndex = static_cast<std::uint32_t>(b);
    step.newByte = static_cast<std::uint8_t>(v);
  } else if (step.op == "drop") {
    common({"seq"});
    step.seq = static_cast<std::uint64_t>(get_int(s, path, "seq", 0, true));
  } else if (step.op == "aclLoad") {
    common({"server", "acl"});
    step.server = get_string(s, path, "server");
    if (!s.contains("acl")) reject(path + ".acl", "missing");
    step.acl = parse_acl(s["acl"], path + ".acl");
  } else if (step.op == "aclRemove") {
    common({"server", "ticket"});
    step.server = get_string(s, path, "server");
    step.ticket = get_string(s, path, "ticket");
  } else if (step.op == "agree") {
    common({"org", "clearance", "grants"});
    step.org = get_string(s, path, "org");
    step.clearance = get_string_or(s, path, "clearance", "");
    if (!s.contains("grants")) reject(path + ".grants", "missing");
    step.grants = parse_grants(s["grants"], path + ".grants");
  } else if (step.op == "grantRemove") {
    common({"org", "clearance", "ticket", "group"});
    step.org = get_string(s, path, "org");
    step.clearance = get_string_or(s, path, "clearance", "");
    step.ticket = get_string(s, path, "ticket");
    step.group = get_string_or(s, path, "group", "");
  } else if (step.op == "groupRemove") {
    common({"org", "group"});
    step.org = get_string(s, path, "org");
    step.group = get_string(s, path, "group");
  } else if (step.op == "memberRemove") {
    common({"org", "user"});
    step.org = get_string_or(s, path, "org", "");
    step.user = get_string(s, path, "user");
  } else {
    reject(path + ".op", "unknown op");
  }

  if (s.contains("expect")) {
    step.expect = get_string(s, path, "expect");
    if (!valid_expect(*step.expect)) reject(path + ".expect", "unknown expected outcome");
  }
  if (s.contains("expectMessages")) {
    std::int64_t n = get_int(s, path, "expectMessages", 0, true);
    if (n < 0) reject(path + ".expectMessages", "must not be negative");
    step.expectMessages = static_cast<std::uint64_t>(n);
  }
  return step;
}

}  // namespace

Result<Scenario> parse_scenario(const std::string& jsonText) {
  try {
    json doc = json::parse(jsonText);
    require_keys(doc, "$",
                 {"version", "backend", "seed", "startTime", "orgs", "users", "clearances",
                  "servers", "agreements", "steps"});
    std::int64_t version = get_int(doc, "$", "version", 1);
    if (version != 1) reject("$.version", "unsupported version");

    Scenario sc;
    std::string backend = get_string_or(doc, "$", "backend", "real");
    if (backend == "real") {
      sc.backend = kSchemeReal;
    } else if (backend == "marker") {
      sc.backend = kSchemeMarker;
    } else {
      reject("$.backend", "unknown backend");
    }
    std::int64_t seed = get_int(doc, "$", "seed", 1);
    if (seed < 0) reject("$.seed", "must not be negative");
    sc.seed = static_cast<std::uint64_t>(seed);
    sc.startTime = get_int(doc, "$", "startTime", 0);

    std::set<std::string> orgNames, userNames, clearanceNames, serverNames;

    if (doc.contains("orgs")) {
      if (!doc["orgs"].is_array()) reject("$.orgs", "expected an array");
      for (std::size_t i = 0; i < doc["orgs"].size(); ++i) {
        std::string p = "$.orgs[" + std::to_string(i) + "]";
        const json& o = doc["orgs"][i];
        require_keys(o, p, {"name", "defaultExpiry", "implications", "keyFile"});
        Scenario::OrgDecl decl;
        decl.name = get_string(o, p, "name");
        check_name(decl.name, p + ".name");
        if (!orgNames.insert(decl.name).second) reject(p + ".name", "duplicate");
        decl.defaultExpiry = get_int(o, p, "defaultExpiry", 86400);
        if (decl.defaultExpiry <= 0) reject(p + ".defaultExpiry", "must be positive");
        if (o.contains("implications")) {
          if (!o["implications"].is_array()) reject(p + ".implications", "expected an array");
          for (std::size_t j = 0; j < o["implications"].size(); ++j) {
            std::string ip = p + ".implications[" + std::to_string(j) + "]";
            const json& edge = o["implications"][j];
            if (!edge.is_array() || edge.size() != 2 || !edge[0].is_string() ||
                !edge[1].is_string()) {
              reject(ip, "expected a [from, to] pair of group names");
            }
            std::string from = edge[0].get<std::string>();
            std::string to = edge[1].get<std::string>();
            check_name(from, ip + "[0]");
            check_name(to, ip + "[1]");
            decl.implications.push_back({from, to});
          }
        }
        if (o.contains("keyFile")) decl.keyFile = get_string(o, p, "keyFile");
        sc.orgs.push_back(std::move(decl));
      }
    }

    if (doc.contains("clearances")) {
      if (!doc["clearances"].is_array()) reject("$.clearances", "expected an array");
      for (std::size_t i = 0; i < doc["clearances"].size(); ++i) {
        std::string p = "$.clearances[" + std::to_string(i) + "]";
        const json& c = doc["clearances"][i];
        require_keys(c, p, {"name", "correlatorTimeout", "keyFile", "stateFile"});
        Scenario::ClearanceDecl decl;
        decl.name = get_string(c, p, "name");
        check_name(decl.name, p + ".name");
        if (!clearanceNames.insert(decl.name).second) reject(p + ".name", "duplicate");
        decl.correlatorTimeout = get_int(c, p, "correlatorTimeout", 120);
        if (decl.correlatorTimeout <= 0) reject(p + ".correlatorTimeout", "must be positive");
        if (c.contains("keyFile")) decl.keyFile = get_string(c, p, "keyFile");
        if (c.contains("stateFile")) decl.stateFile = get_string(c, p, "stateFile");
        sc.clearances.push_back(std::move(decl));
      }
    }

    if (doc.contains("servers")) {
      if (!doc["servers"].is_array()) reject("$.servers", "expected an array");
      for (std::size_t i = 0; i < doc["servers"].size(); ++i) {
        std::string p = "$.servers[" + std::to_string(i) + "]";
        const json& srv = doc["servers"][i];
        require_keys(srv, p,
                     {"name", "clearance", "replayWindow", "resources", "acl", "keyFile",
                      "aclFile"});
        Scenario::ServerDecl decl;
        decl.name = get_string(srv, p, "name");
        check_name(decl.name, p + ".name");
        if (!serverNames.insert(decl.name).second) reject(p + ".name", "duplicate");
        decl.clearance = get_string(srv, p, "clearance");
        if (clearanceNames.count(decl.clearance) == 0) {
          reject(p + ".clearance", "undeclared clearance center");
        }
        decl.replayWindow = get_int(srv, p, "replayWindow", 300);
        if (decl.replayWindow <= 0) reject(p + ".replayWindow", "must be positive");
        if (srv.contains("resources")) {
          if (!srv["resources"].is_array()) reject(p + ".resources", "expected an array");
          for (std::size_t j = 0; j < srv["resources"].size(); ++j) {
            std::string rp = p + ".resources[" + std::to_string(j) + "]";
            const json& r = srv["resources"][j];
            require_keys(r, rp, {"name", "kind", "content"});
            Scenario::ResourceDecl rd;
            rd.name = get_string(r, rp, "name");
            check_name(rd.name, rp + ".name");
            rd.kind = get_string(r, rp, "kind");
            if (rd.kind != "document" && rd.kind != "counter" && rd.kind != "echo") {
              reject(rp + ".kind", "unknown resource kind");
            }
            std::string content = get_string_or(r, rp, "content", "");
            rd.content = Bytes(content.begin(), content.end());
            decl.resources.push_back(std::move(rd));
          }
        }
        if (srv.contains("acl")) decl.acl = parse_acl(srv["acl"], p + ".acl");
        if (srv.contains("keyFile")) decl.keyFile = get_string(srv, p, "keyFile");
        if (srv.contains("aclFile")) decl.aclFile = get_string(srv, p, "aclFile");
        for (const AclDecl& a : decl.acl) {
          for (const AclResourceDecl& r : a.resources) {
            bool known = std::any_of(decl.resources.begin(), decl.resources.end(),
                                     [&](const auto& rd) { return rd.name == r.resource; });
            if (!known) reject(p + ".acl", "acl names undeclared resource " + r.resource);
          }
        }
        sc.servers.push_back(std::move(decl));
      }
    }

    if (doc.contains("users")) {
      if (!doc["users"].is_array()) reject("$.users", "expected an array");
      for (std::size_t i = 0; i < doc["users"].size(); ++i) {
        std::string p = "$.users[" + std::to_string(i) + "]";
        const json& u = doc["users"][i];
        require_keys(u, p, {"name", "org", "groups", "rotation", "keyFile", "certFile"});
        Scenario::UserDecl decl;
        decl.name = get_string(u, p, "name");
        check_name(decl.name, p + ".name");
        if (!userNames.insert(decl.name).second) reject(p + ".name", "duplicate");
        decl.org = get_string(u, p, "org");
        if (orgNames.count(decl.org) == 0) reject(p + ".org", "undeclared org");
        if (u.contains("groups")) {
          if (!u["groups"].is_array()) reject(p + ".groups", "expected an array");
          for (std::size_t j = 0; j < u["groups"].size(); ++j) {
            if (!u["groups"][j].is_string()) {
              reject(p + ".groups[" + std::to_string(j) + "]", "expected a string");
            }
            std::string g = u["groups"][j].get<std::string>();
            check_name(g, p + ".groups[" + std::to_string(j) + "]");
            decl.groups.push_back(g);
          }
        }
        decl.rotation = parse_rotation(get_string_or(u, p, "rotation", "onRefresh"),
                                       p + ".rotation");
        if (u.contains("keyFile")) decl.keyFile = get_string(u, p, "keyFile");
        if (u.contains("certFile")) decl.certFile = get_string(u, p, "certFile");
        sc.users.push_back(std::move(decl));
      }
    }

    if (doc.contains("agreements")) {
      if (!doc["agreements"].is_array()) reject("$.agreements", "expected an array");
      for (std::size_t i = 0; i < doc["agreements"].size(); ++i) {
        std::string p = "$.agreements[" + std::to_string(i) + "]";
        const json& a = doc["agreements"][i];
        require_keys(a, p, {"org", "clearance", "grants"});
        Scenario::AgreementDecl decl;
        decl.org = get_string(a, p, "org");
        if (orgNames.count(decl.org) == 0) reject(p + ".org", "undeclared org");
        decl.clearance = get_string(a, p, "clearance");
        if (clearanceNames.count(decl.clearance) == 0) {
          reject(p + ".clearance", "undeclared clearance center");
        }
        if (!a.contains("grants")) reject(p + ".grants", "missing");
        decl.grants = parse_grants(a["grants"], p + ".grants");
        sc.agreements.push_back(std::move(decl));
      }
    }

    if (doc.contains("steps")) {
      if (!doc["steps"].is_array()) reject("$.steps", "expected an array");
      for (std::size_t i = 0; i < doc["steps"].size(); ++i) {
        std::string p = "$.steps[" + std::to_string(i) + "]";
        ScenarioStep step = parse_step(doc["steps"][i], p);
        auto check_ref = [&](const std::string& name, const std::set<std::string>& names,
                             const char* what) {
          if (!name.empty() && names.count(name) == 0) {
            reject(p, std::string("undeclared ") + what + " " + name);
          }
        };
        check_ref(step.user, userNames, "user");
        check_ref(step.org, orgNames, "org");
        check_ref(step.server, serverNames, "server");
        check_ref(step.clearance, clearanceNames, "clearance center");
        sc.steps.push_back(std::move(step));
      }
    }

    return sc;
  } catch (const SchemaError& e) {
    return Failure{FailureCode::Malformed, e.what()};
  } catch (const json::exception& e) {
    return Failure{FailureCode::Malformed, std::string("invalid JSON: ") + e.what()};
  }
}

namespace {

std::string join_path(const std::string& baseDir, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (baseDir.empty() || baseDir == ".") return path;
  return baseDir + "/" + path;
}

// Printable answers render as text, anything else as hex.
std::string describe_bytes(const Bytes& b) {
  bool printable = !b.empty() && std::all_of(b.begin(), b.end(), [](std::uint8_t c) {
    return c >= 0x20 && c < 0x7f;
  });
  if (printable) return std::string(b.begin(), b.end());
  return "0x" + hex_encode(b);
}

struct RunState {
  const Scenario& sc;
  SimClock clock;
  Network net;
  DetRng master;

  std::map<std::string, std::unique_ptr<ClearanceCenter>> clearances;
  std::map<std::string, std::unique_ptr<ProducerAdmin>> producers;
  std::map<std::string, std::unique_ptr<OrgAdmin>> orgs;
  std::map<std::string, std::unique_ptr<ResourceServer>> servers;
  std::map<std::string, std::unique_ptr<UserAgent>> users;

  std::map<std::string, Uuid> serverIds;
  std::map<std::string, Uuid> clearanceIds;
  // Mutable copies the revocation steps edit and re-register.
  std::vector<Scenario::AgreementDecl> liveAgreements;
  std::map<std::string, std::vector<AclEntry>> liveAcls;

  explicit RunState(const Scenario& s, std::uint64_t seed)
      : sc(s), clock(s.startTime), net(clock), master(seed) {}
};

Token named_token(const Uuid& creator, const std::string& name) {
  return Token{creator, Bytes(name.begin(), name.end()), name};
}

std::vector<AclEntry> build_acl(const RunState& rs, const Scenario::ServerDecl& decl,
                                const std::vector<AclDecl>& acl) {
  return materialize_acl(rs.clearanceIds.at(decl.clearance), rs.serverIds.at(decl.name), acl);
}

ServiceAgreement build_agreement(const RunState& rs, const Scenario::AgreementDecl& decl) {
  AgreementSpec spec;
  spec.grants = decl.grants;
  return materialize_agreement(rs.orgs.at(decl.org)->id(), rs.clearanceIds.at(decl.clearance),
                               spec)
      .agreement;
}

void renegotiate(RunState& rs, const Scenario::AgreementDecl& decl) {
  rs.producers.at(decl.clearance)
      ->negotiate_agreement(*rs.orgs.at(decl.org), build_agreement(rs, decl));
}

// World construction. Master rng draws happen in declaration order, one
// fixed sequence per entity, which keeps runs reproducible under a seed.
Status setup(RunState& rs, const std::string& baseDir) {
  const Scenario& sc = rs.sc;

  auto load_keyfile = [&](const std::string& path, const char* role,
                          Uuid& id) -> Result<KeyPair> {
    auto raw = read_file(join_path(baseDir, path));
    if (!raw.ok()) return raw.failure();
    auto file = canonical_decode<KeyFile>(raw.value());
    if (!file.ok()) return Failure{file.failure().code, path + ": " + file.failure().detail};
    if (file.value().role != role) {
      return Failure{FailureCode::Malformed, path + ": key file role mismatch"};
    }
    id = file.value().id;
    return file.value().keys;
  };

  for (const auto& decl : sc.clearances) {
    Uuid id = rs.master.uuid();
    KeyPair keys;
    if (decl.keyFile) {
      auto loaded = load_keyfile(*decl.keyFile, "clearance", id);
      if (!loaded.ok()) return loaded.failure();
      keys = loaded.take();
    } else {
      auto gen = crypto_gen(sc.backend, false, rs.master);
      if (!gen.ok()) return gen.failure();
      keys = gen.take();
    }
    std::uint64_t subseed = rs.master.next_u64();

    std::unique_ptr<ClearanceCenter> cc;
    if (decl.stateFile) {
      auto raw = read_file(join_path(baseDir, *decl.stateFile));
      if (!raw.ok()) return raw.failure();
      auto loaded = ClearanceCenter::load_state(raw.value(), subseed, decl.correlatorTimeout);
      if (!loaded.ok()) {
        return Failure{loaded.failure().code, *decl.stateFile + ": " + loaded.failure().detail};
      }
      cc = loaded.take();
    } else {
      cc = std::make_unique<ClearanceCenter>(id, keys, subseed, decl.correlatorTimeout);
    }
    rs.clearanceIds[decl.name] = cc->id();
    ClearanceCenter* raw = cc.get();
    rs.net.register_endpoint(cc->id(), [raw, &rs](const Uuid&, const Bytes& wire) {
      return raw->handle(wire, rs.clock.now());
    });
    rs.producers[decl.name] = std::make_unique<ProducerAdmin>(raw);
    rs.clearances[decl.name] = std::move(cc);
  }

  for (const auto& decl : sc.orgs) {
    Uuid id = rs.master.uuid();
    KeyPair keys;
    if (decl.keyFile) {
      auto loaded = load_keyfile(*decl.keyFile, "org", id);
      if (!loaded.ok()) return loaded.failure();
      keys = loaded.take();
    } else {
      auto gen = crypto_gen(sc.backend, false, rs.master);
      if (!gen.ok()) return gen.failure();
      keys = gen.take();
    }
    auto org = std::make_unique<OrgAdmin>(id, keys, decl.defaultExpiry);
    ImplicationMap implications;
    for (const auto& [from, to] : decl.implications) {
      Enrollment a{org->group_token(from), org->id(), Bytes(from.begin(), from.end())};
      Enrollment b{org->group_token(to), org->id(), Bytes(to.begin(), to.end())};
      implications.edges.push_back({std::move(a), std::move(b)});
    }
    org->set_implications(std::move(implications));
    rs.orgs[decl.name] = std::move(org);
  }

  for (const auto& decl : sc.servers) {
    Uuid id = rs.master.uuid();
    KeyPair keys;
    if (decl.keyFile) {
      auto loaded = load_keyfile(*decl.keyFile, "server", id);
      if (!loaded.ok()) return loaded.failure();
      keys = loaded.take();
    } else {
      auto gen = crypto_gen(sc.backend, false, rs.master);
      if (!gen.ok()) return gen.failure();
      keys = gen.take();
    }
    std::uint64_t subseed = rs.master.next_u64();
    rs.serverIds[decl.name] = id;

    ClearanceCenter& cc = *rs.clearances.at(decl.clearance);
    auto server = std::make_unique<ResourceServer>(id, keys, cc.id(), cc.public_key(), subseed,
                                                   decl.replayWindow);
    for (const auto& r : decl.resources) {
      Token token = named_token(id, r.name);
      if (r.kind == "document") {
        server->add_document_resource(token, r.content);
      } else if (r.kind == "counter") {
        server->add_counter_resource(token);
      } else {
        server->add_echo_resource(token);
      }
    }

    std::vector<AclEntry> entries;
    if (decl.aclFile) {
      auto raw = read_file(join_path(baseDir, *decl.aclFile));
      if (!raw.ok()) return raw.failure();
      auto file = canonical_decode<AclFile>(raw.value());
      if (!file.ok()) {
        return Failure{file.failure().code, *decl.aclFile + ": " + file.failure().detail};
      }
      entries = file.value().entries;
    } else {
      entries = build_acl(rs, decl, decl.acl);
    }
    server->load_acl(entries);
    rs.liveAcls[decl.name] = std::move(entries);

    rs.producers.at(decl.clearance)->register_server(id, server->public_key());
    ResourceServer* raw = server.get();
    rs.net.register_endpoint(id, [raw, &rs](const Uuid& caller, const Bytes& wire) {
      return raw->handle_request(wire, rs.net, caller, rs.clock.now());
    });
    rs.servers[decl.name] = std::move(server);
  }

  for (const auto& decl : sc.agreements) {
    renegotiate(rs, decl);
    rs.liveAgreements.push_back(decl);
  }

  for (const auto& decl : sc.users) {
    Uuid id = rs.master.uuid();
    std::uint64_t subseed = rs.master.next_u64();
    auto user = std::make_unique<UserAgent>(id, sc.backend, subseed, decl.rotation);

    OrgAdmin& org = *rs.orgs.at(decl.org);
    org.add_member(decl.name, decl.groups);
    user->bind_org(&org, decl.name);

    if (decl.keyFile) {
      Uuid fileId;
      auto loaded = load_keyfile(*decl.keyFile, "user", fileId);
      if (!loaded.ok()) return loaded.failure();
      user->load_ephemeral(loaded.take());
    }
    if (decl.certFile) {
      auto raw = read_file(join_path(baseDir, *decl.certFile));
      if (!raw.ok()) return raw.failure();
      auto file = canonical_decode<CertificateFile>(raw.value());
      if (!file.ok()) {
        return Failure{file.failure().code, *decl.certFile + ": " + file.failure().detail};
      }
      user->install_certificate(file.value().org, file.value().certificate,
                                file.value().expiry);
    } else {
      // Initial enrollment; scripted refresh steps take over from here.
      Status issued = user->refresh_enrollments(org.id(), rs.clock.now());
      if (!issued.ok()) {
        return Failure{issued.failure().code,
                       decl.name + " initial enrollment: " + issued.failure().detail};
      }
    }

    for (const auto& srvDecl : sc.servers) {
      ResourceServer& server = *rs.servers.at(srvDecl.name);
      ClearanceCenter& cc = *rs.clearances.at(srvDecl.clearance);
      user->learn_server(server.id(), server.public_key(), cc.id(), cc.public_key());
    }
    user->attach(rs.net);
    rs.users[decl.name] = std::move(user);
  }

  return Status{};
}

// Classifies an injected message's reply for outcome matching.
std::string classify_reply(const std::optional<Bytes>& reply) {
  if (!reply) return "none";
  auto failure = canonical_decode<FailureMessage>(*reply);
  if (failure.ok()) return std::string(failure_code_name(failure.value().code));
  auto tag = peek_tag(*reply);
  if (tag.ok() && tag.value() == Tag::Answer) return "answer";
  return "reply";
}

StepReport execute_step(RunState& rs, const ScenarioStep& step, std::size_t index) {
  StepReport report;
  report.index = index;
  report.op = step.op;
  report.outcome = "ok";

  auto fromStatus = [&](const Status& st) {
    if (st.ok()) {
      report.outcome = "ok";
    } else {
      report.outcome = std::string(failure_code_name(st.failure().code));
      report.note = st.failure().detail;
    }
  };

  try {
    if (step.op == "advance") {
      rs.clock.advance(step.by);
    } else if (step.op == "refresh") {
      UserAgent& user = *rs.users.at(step.user);
      std::string orgName = step.org;
      if (orgName.empty()) {
        for (const auto& u : rs.sc.users) {
          if (u.name == step.user) orgName = u.org;
        }
      }
      fromStatus(user.refresh_enrollments(rs.orgs.at(orgName)->id(), rs.clock.now()));
    } else if (step.op == "rotate") {
      rs.users.at(step.user)->rotate_key();
    } else if (step.op == "request") {
      UserAgent& user = *rs.users.at(step.user);
      ResourceServer& server = *rs.servers.at(step.server);
      Token resource = named_token(server.id(), step.resource);
      ConfirmDecision confirm = nullptr;
      if (step.confirm) {
        bool approve = *step.confirm;
        confirm = [approve](const std::string&, const std::string&, const std::string&) {
          return approve;
        };
      }
      auto result = user.request_service(rs.net, server.id(), resource, step.params,
                                         rs.clock.now(), confirm);
      if (result.ok()) {
        report.outcome = "answer";
        report.note = describe_bytes(result.value());
        if (step.expectAnswer) {
          std::string text(result.value().begin(), result.value().end());
          if (text != *step.expectAnswer) {
            report.matched = false;
            report.note += " (wanted " + *step.expectAnswer + ")";
          }
        }
      } else {
        report.outcome = std::string(failure_code_name(result.failure().code));
        report.note = result.failure().detail;
      }
    } else if (step.op == "replay") {
      report.outcome = classify_reply(rs.net.adversary_replay(step.seq));
    } else if (step.op == "tamper") {
      report.outcome =
          classify_reply(rs.net.adversary_tamper(step.seq, step.byteIndex, step.newByte));
    } else if (step.op == "drop") {
      rs.net.schedule_drop(step.seq);
    } else if (step.op == "aclLoad") {
      for (const auto& decl : rs.sc.servers) {
        if (decl.name != step.server) continue;
        std::vector<AclEntry> entries = build_acl(rs, decl, step.acl);
        rs.servers.at(step.server)->load_acl(entries);
        rs.liveAcls[step.server] = std::move(entries);
      }
    } else if (step.op == "aclRemove") {
      auto& entries = rs.liveAcls.at(step.server);
      const Uuid& clearanceId =
          rs.clearanceIds.at([&] {
            for (const auto& decl : rs.sc.servers) {
              if (decl.name == step.server) return decl.clearance;
            }
            return std::string();
          }());
      Token gone = named_token(clearanceId, step.ticket);
      entries.erase(std::remove_if(entries.begin(), entries.end(),
                                   [&](const AclEntry& e) { return e.ticketToken == gone; }),
                    entries.end());
      rs.servers.at(step.server)->load_acl(entries);
    } else if (step.op == "agree") {
      for (auto& live : rs.liveAgreements) {
        if (live.org != step.org) continue;
        if (!step.clearance.empty() && live.clearance != step.clearance) continue;
        live.grants = step.grants;
        renegotiate(rs, live);
      }
    } else if (step.op == "grantRemove") {
      for (auto& live : rs.liveAgreements) {
        if (live.org != step.org) continue;
        if (!step.clearance.empty() && live.clearance != step.clearance) continue;
        for (auto& grant : live.grants) {
          if (!step.group.empty() && grant.group != step.group) continue;
          grant.tickets.erase(std::remove_if(grant.tickets.begin(), grant.tickets.end(),
                                             [&](const TicketGrantDecl& t) {
                                               return t.ticket == step.ticket;
                                             }),
                              grant.tickets.end());
        }
        renegotiate(rs, live);
      }
    } else if (step.op == "groupRemove") {
      rs.orgs.at(step.org)->delete_group(step.group);
      for (auto& live : rs.liveAgreements) {
        if (live.org != step.org) continue;
        live.grants.erase(std::remove_if(live.grants.begin(), live.grants.end(),
                                         [&](const GrantDecl& g) {
                                           return g.group == step.group;
                                         }),
                          live.grants.end());
        renegotiate(rs, live);
      }
    } else if (step.op == "memberRemove") {
      std::string orgName = step.org;
      if (orgName.empty()) {
        for (const auto& u : rs.sc.users) {
          if (u.name == step.user) orgName = u.org;
        }
      }
      rs.orgs.at(orgName)->remove_member(step.user);
    }
  } catch (const std::exception& e) {
    report.outcome = "error";
    report.note = e.what();
  }

  if (step.expect && report.outcome != *step.expect) report.matched = false;
  return report;
}

}  // namespace

Result<ScenarioOutcome> run_scenario(const Scenario& scenario,
                                     std::optional<std::uint64_t> seedOverride,
                                     const std::string& baseDir) {
  RunState rs(scenario, seedOverride.value_or(scenario.seed));
  Status ready = setup(rs, baseDir);
  if (!ready.ok()) return ready.failure();

  ScenarioOutcome outcome;
  for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
    std::size_t before = rs.net.transcript().size();
    StepReport report = execute_step(rs, scenario.steps[i], i);
    report.messages = rs.net.transcript().size() - before;
    if (scenario.steps[i].expectMessages && report.messages != *scenario.steps[i].expectMessages) {
      report.matched = false;
    }
    outcome.report.allMatched = outcome.report.allMatched && report.matched;
    outcome.report.steps.push_back(std::move(report));
  }
  outcome.report.totalMessages = rs.net.transcript().size();
  outcome.report.transcriptHashHex = hex_encode(rs.net.transcript_hash());
  outcome.transcript = rs.net.transcript();
  return outcome;
}

std::string ScenarioReport::render_text() const {
  std::ostringstream out;
  out << "step  op            outcome          msgs  match  note\n";
  for (const StepReport& s : steps) {
    out << std::left;
    out.width(6);
    out << s.index;
    out.width(14);
    out << s.op;
    out.width(17);
    out << s.outcome;
    out.width(6);
    out << s.messages;
    out.width(7);
    out << (s.matched ? "yes" : "NO");
    out << s.note << "\n";
  }
  out << "total messages: " << totalMessages << "\n";
  out << "transcript: " << transcriptHashHex << "\n";
  out << "result: " << (allMatched ? "PASS" : "FAIL") << "\n";
  return out.str();
}

Result<AttackOutcome> run_scenario_attack(const Scenario& scenario, const std::string& recipe,
                                          std::optional<std::uint64_t> seedOverride,
                                          const std::string& baseDir) {
  if (recipe != "replay" && recipe != "tamper" && recipe != "steal-cert") {
    return Failure{FailureCode::Malformed, "unknown attack recipe " + recipe};
  }

  RunState rs(scenario, seedOverride.value_or(scenario.seed));
  Status ready = setup(rs, baseDir);
  if (!ready.ok()) return ready.failure();
  for (std::size_t i = 0; i < scenario.steps.size(); ++i) {
    // The base run only shapes the world; its expectations are the run
    // command's business, not the attack's.
    execute_step(rs, scenario.steps[i], i);
  }

  AttackOutcome out;
  out.recipe = recipe;
  DetRng attackRng(rs.master.next_u64());

  auto counter_snapshot = [&]() {
    std::vector<std::int64_t> values;
    for (const auto& decl : scenario.servers) {
      for (const auto& r : decl.resources) {
        if (r.kind != "counter") continue;
        values.push_back(rs.servers.at(decl.name)
                             ->counter_value(named_token(rs.serverIds.at(decl.name), r.name)));
      }
    }
    return values;
  };

  auto is_answer = [](const std::optional<Bytes>& reply) {
    if (!reply) return false;
    auto tag = peek_tag(*reply);
    return tag.ok() && tag.value() == Tag::Answer;
  };

  if (recipe == "replay" || recipe == "tamper") {
    std::uint64_t recorded = rs.net.next_seq();
    if (recorded == 0) {
      out.notes.push_back("no recorded traffic to attack");
      return out;
    }
    auto before = counter_snapshot();
    for (std::uint64_t seq = 0; seq < recorded; ++seq) {
      std::optional<Bytes> reply;
      if (recipe == "replay") {
        reply = rs.net.adversary_replay(seq);
      } else {
        const TranscriptEntry& entry = rs.net.transcript()[seq];
        if (entry.bytes.empty()) continue;
        std::uint32_t idx = static_cast<std::uint32_t>(attackRng.below(entry.bytes.size()));
        std::uint8_t mutated = static_cast<std::uint8_t>(attackRng.below(256));
        if (mutated == entry.bytes[idx]) mutated ^= 0x01;
        reply = rs.net.adversary_tamper(seq, idx, mutated);
      }
      ++out.attempts;
      if (is_answer(reply)) {
        ++out.breaches;
        out.notes.push_back("entry " + std::to_string(seq) + " produced an answer");
      }
    }
    out.countersMoved = counter_snapshot() != before;
    if (out.countersMoved) out.notes.push_back("a counter moved under attack");
    return out;
  }

  // Certificate theft. The thief clones each user's enrollments onto a
  // key the drill holds (the org will enroll any current member), probes
  // for a target the world actually grants, then splices.
  auto thiefGen = crypto_gen(scenario.backend, true, attackRng);
  if (!thiefGen.ok()) return thiefGen.failure();
  KeyPair thiefKey = thiefGen.take();
  Uuid thiefId = attackRng.uuid();
  rs.net.register_endpoint(thiefId, [](const Uuid&, const Bytes&) {
    return canonical_encode(FailureMessage{FailureCode::NotAuthorized, "unexpected delivery"});
  });

  for (const auto& userDecl : scenario.users) {
    OrgAdmin& org = *rs.orgs.at(userDecl.org);
    auto victimGen = crypto_gen(scenario.backend, true, attackRng);
    if (!victimGen.ok()) return victimGen.failure();
    KeyPair victimKey = victimGen.take();
    auto issued = org.issue_enrollment(userDecl.name, victimKey.pub(), rs.clock.now());
    if (!issued.ok()) {
      out.notes.push_back(userDecl.name + ": no certificate (" + issued.failure().detail + ")");
      continue;
    }

    auto victimClaim = forge_claim(victimKey, org.id(), issued.value().certificate);
    if (!victimClaim.ok()) return victimClaim.failure();

    bool attacked = false;
    for (const auto& srvDecl : scenario.servers) {
      if (attacked) break;
      ResourceServer& server = *rs.servers.at(srvDecl.name);
      PublicKey serverPub = server.public_key();
      PublicKey clearancePub = rs.clearances.at(srvDecl.clearance)->public_key();
      auto blob = forge_blob(victimKey.pub(), victimClaim.value(), clearancePub, attackRng);
      if (!blob.ok()) return blob.failure();

      for (const auto& resDecl : srvDecl.resources) {
        Token resource = named_token(server.id(), resDecl.name);
        auto stamp = [&]() {
          Tau tau = build_tau(rs.clock.now(), attackRng);
          return crypto_sign(victimKey, canonical_encode(tau));
        };
        auto probeStamp = stamp();
        if (!probeStamp.ok()) return probeStamp.failure();
        auto probe =
            forge_request(probeStamp.value(), resource, blob.value(), serverPub, attackRng);
        if (!probe.ok()) return probe.failure();
        if (!is_answer(rs.net.call(thiefId, server.id(), probe.value()))) continue;

        // The world grants this target to the victim, so theft has a
        // prize worth measuring.
        auto before = counter_snapshot();
        auto splice = [&](const std::string& name, Result<Bytes> wire) {
          ++out.attempts;
          if (!wire.ok()) {
            out.notes.push_back(name + ": could not build (" + wire.failure().detail + ")");
            return;
          }
          if (is_answer(rs.net.call(thiefId, server.id(), wire.value()))) {
            ++out.breaches;
            out.notes.push_back(name + " against " + userDecl.name + "/" + srvDecl.name + "/" +
                                resDecl.name + " produced an answer");
          }
        };

        {
          RequestInputs in;
          in.ephemeral = &thiefKey;
          in.certificate = &issued.value().certificate;
          in.org = org.id();
          in.serverPub = serverPub;
          in.clearancePub = clearancePub;
          in.resource = resource;
          in.now = rs.clock.now();
          auto env = build_request(in, attackRng);
          splice("foreign-ephemeral-signature",
                 env.ok() ? Result<Bytes>(canonical_encode(env.value()))
                          : Result<Bytes>(env.failure()));
        }
        {
          auto thiefStamp = crypto_sign(thiefKey, canonical_encode(build_tau(rs.clock.now(),
                                                                             attackRng)));
          splice("swapped-key-echo",
                 thiefStamp.ok() ? forge_request(thiefStamp.value(), resource, blob.value(),
                                                 serverPub, attackRng)
                                 : Result<Bytes>(thiefStamp.failure()));
        }
        {
          splice("stolen-stamp-replay",
                 forge_request(probeStamp.value(), resource, blob.value(), serverPub, attackRng));
        }
        {
          auto reSealed = forge_blob(thiefKey.pub(), victimClaim.value(), clearancePub, attackRng);
          auto thiefStamp = crypto_sign(thiefKey, canonical_encode(build_tau(rs.clock.now(),
                                                                             attackRng)));
          if (reSealed.ok() && thiefStamp.ok()) {
            splice("re-sealed-blob", forge_request(thiefStamp.value(), resource, reSealed.value(),
                                                   serverPub, attackRng));
          } else {
            splice("re-sealed-blob", Result<Bytes>(Failure{FailureCode::Malformed,
                                                           "could not build re-sealed blob"}));
          }
        }
        if (counter_snapshot() != before) {
          out.countersMoved = true;
          out.notes.push_back("a counter moved during theft splices");
        }
        attacked = true;
        break;
      }
    }
    if (!attacked) out.notes.push_back(userDecl.name + ": no grantable target found");
  }
  if (out.attempts == 0) out.notes.push_back("scenario grants nothing to steal");
  return out;
}

std::string AttackOutcome::render_text() const {
  std::ostringstream out;
  out << "attack: " << recipe << "\n";
  out << "attempts: " << attempts << "\n";
  out << "breaches: " << breaches << "\n";
  out << "counters moved: " << (countersMoved ? "yes" : "no") << "\n";
  for (const std::string& n : notes) out << "note: " << n << "\n";
  out << "result: " << (denied() ? "DENIED" : "NOT DENIED") << "\n";
  return out.str();
}

std::string AttackOutcome::render_json() const {
  json doc = {{"recipe", recipe},
              {"attempts", attempts},
              {"breaches", breaches},
              {"countersMoved", countersMoved},
              {"notes", notes},
              {"denied", denied()}};
  return doc.dump(2) + "\n";
}

Result<AgreementSpec> parse_agreement_spec(const std::string& jsonText) {
  try {
    json doc = json::parse(jsonText);
    require_keys(doc, "$", {"implications", "grants"});
    AgreementSpec spec;
    if (doc.contains("implications")) {
      if (!doc["implications"].is_array()) reject("$.implications", "expected an array");
      for (std::size_t i = 0; i < doc["implications"].size(); ++i) {
        std::string p = "$.implications[" + std::to_string(i) + "]";
        const json& edge = doc["implications"][i];
        if (!edge.is_array() || edge.size() != 2 || !edge[0].is_string() || !edge[1].is_string()) {
          reject(p, "expected a [from, to] pair of group names");
        }
        std::string from = edge[0].get<std::string>();
        std::string to = edge[1].get<std::string>();
        check_name(from, p + "[0]");
        check_name(to, p + "[1]");
        spec.implications.push_back({std::move(from), std::move(to)});
      }
    }
    if (!doc.contains("grants")) reject("$.grants", "missing");
    spec.grants = parse_grants(doc["grants"], "$.grants");
    return spec;
  } catch (const SchemaError& e) {
    return Failure{FailureCode::Malformed, e.what()};
  } catch (const json::exception& e) {
    return Failure{FailureCode::Malformed, std::string("invalid JSON: ") + e.what()};
  }
}

MaterializedAgreement materialize_agreement(const OrgId& orgId, const Uuid& clearanceId,
                                            const AgreementSpec& spec) {
  MaterializedAgreement out;
  auto group_enrollment = [&](const std::string& group) {
    return Enrollment{named_token(orgId, group), orgId, Bytes(group.begin(), group.end())};
  };
  for (const auto& [from, to] : spec.implications) {
    out.implications.edges.push_back({group_enrollment(from), group_enrollment(to)});
  }
  out.implications.normalize();
  out.agreement.consumerOrg = orgId;
  for (const GrantDecl& g : spec.grants) {
    std::vector<TicketGrant> grants;
    for (const TicketGrantDecl& t : g.tickets) {
      TicketGrant tg;
      tg.ticket.token = named_token(clearanceId, t.ticket);
      tg.ticket.modifiers = t.ticketModifiers;
      tg.grantModifiers = t.grantModifiers;
      grants.push_back(std::move(tg));
    }
    out.agreement.grants.push_back({group_enrollment(g.group), std::move(grants)});
  }
  out.agreement.normalize();
  return out;
}

Result<std::vector<AclDecl>> parse_acl_spec(const std::string& jsonText) {
  try {
    json doc = json::parse(jsonText);
    return parse_acl(doc, "$");
  } catch (const SchemaError& e) {
    return Failure{FailureCode::Malformed, e.what()};
  } catch (const json::exception& e) {
    return Failure{FailureCode::Malformed, std::string("invalid JSON: ") + e.what()};
  }
}

std::vector<AclEntry> materialize_acl(const Uuid& clearanceId, const Uuid& serverId,
                                      const std::vector<AclDecl>& decls) {
  std::vector<AclEntry> out;
  for (const AclDecl& a : decls) {
    AclEntry entry;
    entry.ticketToken = named_token(clearanceId, a.ticket);
    for (const AclResourceDecl& r : a.resources) {
      entry.privileges.push_back({named_token(serverId, r.resource), r.modifiers});
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::string ScenarioReport::render_json() const {
  json steps_json = json::array();
  for (const StepReport& s : steps) {
    steps_json.push_back({{"index", s.index},
                          {"op", s.op},
                          {"outcome", s.outcome},
                          {"note", s.note},
                          {"messages", s.messages},
                          {"matched", s.matched}});
  }
  json doc = {{"allMatched", allMatched},
              {"steps", steps_json},
              {"totalMessages", totalMessages},
              {"transcriptHash", transcriptHashHex}};
  return doc.dump(2) + "\n";
}

}  // namespace usher
