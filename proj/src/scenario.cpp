#include "rcpor/scenario.hpp"

#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "rcpor/error.hpp"
#include "rcpor/wire.hpp"

namespace rcpor::scenario {

using ledger::Address;
using ledger::Ledger;
using ledger::TimeLabel;
using nlohmann::json;
using protocol::ClientComplaint;
using protocol::ServerComplaint;

namespace {

const Address kClient{"client"};
const Address kServer{"server"};
const Address kArbiter{"arbiter"};
constexpr Coin kDefaultBalance = 1'000'000;

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::kSpecInvalid, why); }

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) invalid(where + " must be an object");
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) invalid("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(where + "." + key + " is missing or has the wrong type");
  }
}

std::uint64_t get_uint(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_unsigned()) invalid(where + "." + key + " must be a non-negative integer");
  return obj[key].get<std::uint64_t>();
}

std::uint32_t get_u32(const json& obj, const char* key, const std::string& where) {
  auto v = get_uint(obj, key, where);
  if (v > UINT32_MAX) invalid(where + "." + key + " is too large");
  return static_cast<std::uint32_t>(v);
}

ClientBehavior parse_client_behavior(const std::string& s) {
  if (s == "ill_formed_metadata") return ClientBehavior::kIllFormedMetadata;
  if (s == "invalid_query") return ClientBehavior::kInvalidQuery;
  if (s == "false_accusation") return ClientBehavior::kFalseAccusation;
  if (s == "withhold_query") return ClientBehavior::kWithholdQuery;
  invalid("unknown client behavior '" + s + "'");
}

ServerBehavior parse_server_behavior(const std::string& s) {
  if (s == "corrupt_block") return ServerBehavior::kCorruptBlock;
  if (s == "withhold_proof") return ServerBehavior::kWithholdProof;
  if (s == "false_query_complaint") return ServerBehavior::kFalseQueryComplaint;
  if (s == "short_deposit") return ServerBehavior::kShortDeposit;
  invalid("unknown server behavior '" + s + "'");
}

bool session_wide(ClientBehavior b) { return b == ClientBehavior::kIllFormedMetadata; }
bool session_wide(ServerBehavior b) { return b == ServerBehavior::kShortDeposit; }

}  // namespace

const char* behavior_name(ClientBehavior b) {
  switch (b) {
    case ClientBehavior::kIllFormedMetadata: return "ill_formed_metadata";
    case ClientBehavior::kInvalidQuery: return "invalid_query";
    case ClientBehavior::kFalseAccusation: return "false_accusation";
    case ClientBehavior::kWithholdQuery: return "withhold_query";
  }
  return "?";
}

const char* behavior_name(ServerBehavior b) {
  switch (b) {
    case ServerBehavior::kCorruptBlock: return "corrupt_block";
    case ServerBehavior::kWithholdProof: return "withhold_proof";
    case ServerBehavior::kFalseQueryComplaint: return "false_query_complaint";
    case ServerBehavior::kShortDeposit: return "short_deposit";
  }
  return "?";
}

ScenarioSpec ScenarioSpec::parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    invalid(std::string("not JSON: ") + e.what());
  }
  only_keys(doc, {"seed", "session", "file", "genesis", "behaviors"}, "spec");
  ScenarioSpec s;
  if (doc.contains("seed")) s.seed = get_uint(doc, "seed", "spec");

  if (!doc.contains("session")) invalid("spec.session is required");
  const json& ses = doc["session"];
  only_keys(ses,
            {"block_payload_len", "phi", "z", "price_list", "choice", "pi_max", "variant", "codec",
             "client_complains_on_dummy", "j_gap"},
            "session");
  if (ses.contains("block_payload_len")) s.block_payload_len = get_uint(ses, "block_payload_len", "session");
  if (ses.contains("phi")) s.phi = get_u32(ses, "phi", "session");
  s.z = get_u32(ses, "z", "session");
  if (!ses.contains("price_list") || !ses["price_list"].is_array()) invalid("session.price_list must be an array");
  for (const auto& e : ses["price_list"]) {
    only_keys(e, {"o", "l"}, "price_list entry");
    s.price_list.push_back({get_uint(e, "o", "price_list"), get_uint(e, "l", "price_list")});
  }
  if (!ses.contains("choice")) invalid("session.choice is required");
  only_keys(ses["choice"], {"o", "l"}, "session.choice");
  s.choice = {get_uint(ses["choice"], "o", "choice"), get_uint(ses["choice"], "l", "choice")};
  if (ses.contains("pi_max") && !ses["pi_max"].is_null()) s.pi_max = get_u32(ses, "pi_max", "session");
  if (ses.contains("variant")) {
    try {
      s.variant = ledger::parse_variant(get<std::string>(ses, "variant", "session"));
    } catch (const Error& e) {
      invalid(e.what());
    }
  }
  if (ses.contains("codec")) s.codec = get<std::string>(ses, "codec", "session");
  if (ses.contains("client_complains_on_dummy"))
    s.client_complains_on_dummy = get<bool>(ses, "client_complains_on_dummy", "session");
  if (ses.contains("j_gap")) s.j_gap = static_cast<std::int64_t>(get_uint(ses, "j_gap", "session"));

  if (!doc.contains("file")) invalid("spec.file is required");
  only_keys(doc["file"], {"size", "path"}, "file");
  if (doc["file"].contains("size")) s.file_size = get_uint(doc["file"], "size", "file");
  if (doc["file"].contains("path")) s.file_path = get<std::string>(doc["file"], "path", "file");

  if (doc.contains("genesis")) {
    only_keys(doc["genesis"], {"accounts"}, "genesis");
    if (!doc["genesis"].contains("accounts") || !doc["genesis"]["accounts"].is_array())
      invalid("genesis.accounts must be an array");
    for (const auto& a : doc["genesis"]["accounts"]) {
      only_keys(a, {"address", "balance"}, "genesis account");
      s.genesis.push_back({get<std::string>(a, "address", "account"), get_uint(a, "balance", "account")});
    }
  }

  if (doc.contains("behaviors")) {
    const json& b = doc["behaviors"];
    only_keys(b, {"client", "server"}, "behaviors");
    if (b.contains("client")) {
      if (!b["client"].is_array()) invalid("behaviors.client must be an array");
      for (const auto& e : b["client"]) {
        only_keys(e, {"kind", "j"}, "client behavior");
        ClientAction a{parse_client_behavior(get<std::string>(e, "kind", "client behavior")), 0};
        if (e.contains("j")) a.j = get_u32(e, "j", "client behavior");
        s.client.push_back(a);
      }
    }
    if (b.contains("server")) {
      if (!b["server"].is_array()) invalid("behaviors.server must be an array");
      for (const auto& e : b["server"]) {
        only_keys(e, {"kind", "j", "entry"}, "server behavior");
        ServerAction a{parse_server_behavior(get<std::string>(e, "kind", "server behavior")), 0, 1};
        if (e.contains("j")) a.j = get_u32(e, "j", "server behavior");
        if (e.contains("entry")) a.entry = get_u32(e, "entry", "server behavior");
        s.server.push_back(a);
      }
    }
  }
  s.validate();
  return s;
}

std::string ScenarioSpec::to_json() const {
  json ses = {{"block_payload_len", block_payload_len},
              {"phi", phi},
              {"z", z},
              {"choice", {{"o", choice.o}, {"l", choice.l}}},
              {"pi_max", pi_max ? json(*pi_max) : json(nullptr)},
              {"variant", ledger::variant_name(variant)},
              {"codec", codec},
              {"client_complains_on_dummy", client_complains_on_dummy},
              {"j_gap", j_gap}};
  ses["price_list"] = json::array();
  for (const auto& e : price_list) ses["price_list"].push_back({{"o", e.o}, {"l", e.l}});
  json file = json::object();
  if (file_size) file["size"] = *file_size;
  if (file_path) file["path"] = *file_path;
  json doc = {{"seed", seed}, {"session", ses}, {"file", file}};
  if (!genesis.empty()) {
    json accounts = json::array();
    for (const auto& a : genesis) accounts.push_back({{"address", a.address}, {"balance", a.balance}});
    doc["genesis"] = {{"accounts", accounts}};
  }
  json cl = json::array();
  for (const auto& a : client) {
    json e = {{"kind", behavior_name(a.kind)}};
    if (!session_wide(a.kind)) e["j"] = a.j;
    cl.push_back(e);
  }
  json sv = json::array();
  for (const auto& a : server) {
    json e = {{"kind", behavior_name(a.kind)}};
    if (!session_wide(a.kind)) e["j"] = a.j;
    if (a.kind == ServerBehavior::kCorruptBlock) e["entry"] = a.entry;
    sv.push_back(e);
  }
  doc["behaviors"] = {{"client", cl}, {"server", sv}};
  return doc.dump();
}

void ScenarioSpec::validate() const {
  if (z == 0) invalid("z must be at least 1");
  if (phi == 0) invalid("phi must be at least 1");
  if (block_payload_len == 0) invalid("block_payload_len must be at least 1");
  if (price_list.empty()) invalid("price_list is empty");
  if (file_size.has_value() == file_path.has_value()) invalid("file needs exactly one of size or path");
  if (file_size && *file_size == 0) invalid("file.size must be positive");
  if (j_gap < 0) invalid("j_gap must be non-negative");
  try {
    (void)por::make_codec(codec);
  } catch (const Error& e) {
    invalid(e.what());
  }
  if (!genesis.empty()) {
    std::set<std::string> names;
    for (const auto& a : genesis)
      if (!names.insert(a.address).second) invalid("duplicate genesis address " + a.address);
    if (!names.count(kClient.id) || !names.count(kServer.id)) invalid("genesis must fund 'client' and 'server'");
    if (variant == Variant::kArbiter && !names.count(kArbiter.id)) invalid("arbiter variant needs an 'arbiter' account");
  }
  std::set<std::pair<int, std::uint32_t>> seen_c, seen_s;
  for (const auto& a : client) {
    if (session_wide(a.kind) ? a.j != 0 : (a.j == 0 || a.j > z))
      invalid(std::string(behavior_name(a.kind)) + ": target j=" + std::to_string(a.j) + " invalid for z=" + std::to_string(z));
    if (!seen_c.insert({session_wide(a.kind) ? -1 : 0, a.j}).second)
      invalid("more than one client behavior for j=" + std::to_string(a.j));
  }
  for (const auto& a : server) {
    if (session_wide(a.kind) ? a.j != 0 : (a.j == 0 || a.j > z))
      invalid(std::string(behavior_name(a.kind)) + ": target j=" + std::to_string(a.j) + " invalid for z=" + std::to_string(z));
    if (a.kind == ServerBehavior::kCorruptBlock && (a.entry == 0 || a.entry > phi))
      invalid("corrupt_block entry outside [1, phi]");
    if (!seen_s.insert({session_wide(a.kind) ? -1 : 0, a.j}).second)
      invalid("more than one server behavior for j=" + std::to_string(a.j));
    if (a.kind == ServerBehavior::kShortDeposit) {
      Coin l_max = 0;
      for (const auto& e : price_list) l_max = std::max(l_max, e.l);
      if (l_max * z == 0) invalid("short_deposit needs p_S >= 1");
    }
  }
}

ExpectedPayout expected_payout(Variant variant, const Counters& y, std::uint32_t z, Coin o, Coin l,
                               Coin coin_star_client, Coin coin_star_server) {
  const std::int64_t Z = z, O = static_cast<std::int64_t>(o), L = static_cast<std::int64_t>(l);
  const std::int64_t yc = y.y_c, ys = y.y_s, ycp = y.y_c_prime, ysp = y.y_s_prime;
  if (yc > Z || ys > Z || ycp > Z || ysp > Z) throw Error(ErrorCode::kCounterOutOfBounds, "counter above z");
  std::int64_t c = static_cast<std::int64_t>(coin_star_client) - O * (Z - ys);
  std::int64_t s = static_cast<std::int64_t>(coin_star_server) + O * (Z - ys);
  ExpectedPayout out;
  if (variant == Variant::kArbiter) {
    c -= L * (yc + ycp);
    s -= L * (ys + ysp);
    out.arbiter = static_cast<Coin>(L * (ys + yc + ysp + ycp));
  } else {
    if (ycp != 0 || ysp != 0) throw Error(ErrorCode::kCounterOutOfBounds, "primed counters in the arbiter-free variant");
    c += L * (ys - yc);
    s += L * (yc - ys);
  }
  if (c < 0 || s < 0) throw Error(ErrorCode::kCounterOutOfBounds, "counters drive a payout below zero");
  out.client = static_cast<Coin>(c);
  out.server = static_cast<Coin>(s);
  return out;
}

namespace {

json counters_json(const Counters& y) {
  return {{"y_c", y.y_c}, {"y_c_prime", y.y_c_prime}, {"y_s", y.y_s}, {"y_s_prime", y.y_s_prime}};
}

json outcome_json(const protocol::ComplaintOutcome& o) {
  json e = {{"j", o.j}, {"status", o.status}};
  if (o.g) e["g"] = *o.g;
  e["identified"] = o.identified ? json(protocol::party_name(*o.identified)) : json(nullptr);
  e["counter"] = o.counter ? json(protocol::counter_name(*o.counter)) : json(nullptr);
  return e;
}

json balances_json(const Ledger& ledger, const std::vector<Address>& who) {
  json b = json::object();
  for (const auto& a : who) b[a.id] = ledger.balance(a);
  return b;
}

Bytes load_file(const ScenarioSpec& spec, crypto::Rng& rng) {
  if (spec.file_size) return rng.bytes(*spec.file_size);
  std::ifstream in(*spec.file_path, std::ios::binary);
  if (!in) invalid("cannot read file " + *spec.file_path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.empty()) invalid("file " + *spec.file_path + " is empty");
  return data;
}

struct Behaviors {
  std::map<std::uint32_t, ClientBehavior> client;
  std::map<std::uint32_t, ServerAction> server;
  bool ill_formed = false;
  bool short_deposit = false;

  explicit Behaviors(const ScenarioSpec& spec) {
    for (const auto& a : spec.client) {
      if (a.kind == ClientBehavior::kIllFormedMetadata)
        ill_formed = true;
      else
        client[a.j] = a.kind;
    }
    for (const auto& a : spec.server) {
      if (a.kind == ServerBehavior::kShortDeposit)
        short_deposit = true;
      else
        server[a.j] = a;
    }
  }
  std::optional<ClientBehavior> at_client(std::uint32_t j) const {
    auto it = client.find(j);
    return it == client.end() ? std::nullopt : std::optional(it->second);
  }
  std::optional<ServerAction> at_server(std::uint32_t j) const {
    auto it = server.find(j);
    return it == server.end() ? std::nullopt : std::optional(it->second);
  }
};

}  // namespace

RunResult run(const ScenarioSpec& spec) {
  spec.validate();
  crypto::Rng root(spec.seed);
  crypto::Rng file_rng = root.fork();
  crypto::Rng client_rng = root.fork();
  crypto::Rng server_rng = root.fork();
  crypto::Rng decoy_rng = root.fork();

  const Bytes file = load_file(spec, file_rng);
  const auto codec = por::make_codec(spec.codec);
  const std::size_t m_wide = codec->encode(file, spec.block_payload_len).size() / spec.block_payload_len;
  if (m_wide > UINT32_MAX) invalid("file has too many blocks");
  const auto m = static_cast<std::uint32_t>(m_wide);
  if (spec.phi > m) invalid("phi=" + std::to_string(spec.phi) + " exceeds m=" + std::to_string(m));

  protocol::KeyGenOutput keys;
  try {
    keys = protocol::key_gen(client_rng, m, spec.pi_max);
  } catch (const Error& e) {
    invalid(e.what());
  }

  const Behaviors beh(spec);
  Ledger ledger;
  std::vector<Address> roles{kClient, kServer, kArbiter};
  if (spec.genesis.empty()) {
    ledger.create_account(kClient, kDefaultBalance);
    ledger.create_account(kServer, kDefaultBalance);
    ledger.create_account(kArbiter, 0);
  } else {
    for (const auto& a : spec.genesis) ledger.create_account(Address{a.address}, a.balance);
    if (!ledger.has_account(kArbiter)) roles.pop_back();
  }
  const Coin supply_before = ledger.total_supply();
  const json genesis_balances = balances_json(ledger, roles);

  protocol::Parties parties{kClient, kServer, std::nullopt};
  if (spec.variant == Variant::kArbiter) parties.arbiter = kArbiter;
  protocol::SessionTerms terms;
  terms.z = spec.z;
  terms.phi = spec.phi;
  terms.block_payload_len = spec.block_payload_len;
  terms.price_list.entries = spec.price_list;
  terms.choice = spec.choice;
  terms.variant = spec.variant;
  terms.j_gap = spec.j_gap;
  const auto schedule = ledger::Schedule::standard(spec.z, spec.j_gap);
  auto at = [&](TimeLabel label, std::uint32_t j = 0) { ledger.advance_time(schedule.at(label, j)); };

  json report;
  report["format"] = "rcpor-report/1";
  report["spec"] = json::parse(spec.to_json());
  json problems = json::array();
  json session = {{"variant", ledger::variant_name(spec.variant)},
                  {"z", spec.z},
                  {"phi", spec.phi},
                  {"m", m},
                  {"block_payload_len", spec.block_payload_len},
                  {"codec", spec.codec},
                  {"o", spec.choice.o},
                  {"l", spec.choice.l},
                  {"o_max", terms.price_list.o_max()},
                  {"l_max", terms.price_list.l_max()},
                  {"coin_star_client", Coin{spec.z} * (terms.price_list.o_max() + terms.price_list.l_max())},
                  {"p_server", Coin{spec.z} * terms.price_list.l_max()},
                  {"pi_act", keys.pi_act},
                  {"pi_max", keys.pi_max},
                  {"pad_pi", keys.pad_pi},
                  {"query_unit_len", wire::query_unit_len()}};
  json cycles = json::array();
  json complaints = {{"server", {{"filed", json::array()}, {"outcomes", json::array()}}},
                     {"client", {{"filed", json::array()}, {"outcomes", json::array()}}}};
  std::string path = "aborted";
  std::optional<protocol::CounterUpdate> update;
  std::optional<protocol::Payout> actual;
  json before_payout;
  Coin client_deposit = 0, server_deposit = 0;
  std::optional<ledger::ContractId> contract;

  try {
    at(TimeLabel::kT0);
    protocol::ClientInitOptions copts;
    if (beh.ill_formed) {
      Bytes other = decoy_rng.bytes(file.size());
      copts.sigma_override = por::setup(other, spec.block_payload_len, *codec, spec.phi).pp.sigma;
    }
    auto ci = protocol::client_init(ledger, parties, file, *codec, keys, terms, client_rng, copts);
    auto& client = ci.client;
    contract = client.contract;
    const auto layout = client.qp.layout();
    session["proof_unit_len"] = layout.unit_len();
    session["proof_unit_payload_len"] = layout.unit_payload_len();
    session["proof_units"] = layout.total_units();
    session["proof_wire_len"] = layout.wire_len();
    session["hash_len"] = layout.hash_len;
    session["height"] = layout.height;
    session["pp"] = {{"sigma", client.qp.pp.sigma.hex()},
                     {"phi", client.qp.pp.phi},
                     {"m", client.qp.pp.m},
                     {"zeta",
                      {{"key_bits", client.qp.pp.zeta.key_bits},
                       {"input_bits", client.qp.pp.zeta.input_bits},
                       {"output_bits", client.qp.pp.zeta.output_bits}}}};
    session["contract"] = client.contract;

    at(TimeLabel::kT1);
    protocol::ServerInitOptions sopts;
    if (beh.short_deposit) sopts.deposit_override = Coin{spec.z} * terms.price_list.l_max() - 1;
    auto si = protocol::server_init(ledger, parties, ci.handoff, sopts);
    auto& server = si.server;
    session["a"] = si.a ? 1 : 0;
    session["a_reason"] = si.reason;

    auto state = ledger.contract(client.contract);
    client_deposit = state.client_deposit;
    server_deposit = state.server_deposit;

    if (protocol::refund_applies(state)) {
      at(TimeLabel::kT2);
      before_payout = balances_json(ledger, roles);
      actual = protocol::payout_refund(ledger, kClient, client.contract);
      path = "refund";
    } else {
      std::vector<ServerComplaint> server_filed;
      std::vector<ClientComplaint> client_filed;
      for (std::uint32_t j = 1; j <= spec.z; ++j) {
        const auto cb = beh.at_client(j);
        const auto sb = beh.at_server(j);
        json cyc = {{"j", j}};

        at(TimeLabel::kG1, j);
        bool queried = cb != ClientBehavior::kWithholdQuery;
        if (queried) {
          auto form = cb == ClientBehavior::kInvalidQuery ? wire::QueryForm::kTruncated : wire::QueryForm::kValid;
          cyc["query_len"] = protocol::client_query(ledger, client, j, client_rng, form).size();
        } else {
          cyc["query_len"] = nullptr;
        }

        at(TimeLabel::kG2, j);
        std::optional<protocol::ServerProveOutput> sp;
        if (!(sb && sb->kind == ServerBehavior::kWithholdProof)) {
          protocol::ServerProveOptions popts;
          if (sb && sb->kind == ServerBehavior::kCorruptBlock) popts.corrupt_entry = sb->entry;
          if (sb && sb->kind == ServerBehavior::kFalseQueryComplaint) popts.false_complaint = true;
          try {
            sp = protocol::server_prove(ledger, server, j, server_rng, popts);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kMissingQuery) throw;
            sp = protocol::server_reject(ledger, server, j, server_rng);
          }
          if (sp->complaint) server_filed.push_back(*sp->complaint);
        }
        cyc["b_j"] = sp ? json(sp->b ? 1 : 0) : json(nullptr);
        cyc["proof_len"] = sp ? json(sp->posted.size()) : json(nullptr);
        cyc["server_complaint"] = sp && sp->complaint;

        json d = nullptr;
        json cc = nullptr;
        if (queried) {
          auto cv = protocol::client_verify(ledger, client, j);
          d = {{"accepted", cv.d.accepted},
               {"failing_index", cv.d.failing_index ? json(*cv.d.failing_index) : json(nullptr)}};
          std::optional<ClientComplaint> complaint = cv.complaint;
          if (cb == ClientBehavior::kFalseAccusation && !complaint) complaint = ClientComplaint{j, 1};
          if (cb == ClientBehavior::kInvalidQuery && !spec.client_complains_on_dummy) complaint.reset();
          if (complaint) {
            client_filed.push_back(*complaint);
            cc = {{"j", complaint->j}, {"g", complaint->g}};
          }
        }
        cyc["d_j"] = d;
        cyc["client_complaint"] = cc;
        cycles.push_back(cyc);
      }
      for (const auto& c : server_filed) complaints["server"]["filed"].push_back(c.j);
      for (const auto& c : client_filed) complaints["client"]["filed"].push_back({{"j", c.j}, {"g", c.g}});

      if (spec.variant == Variant::kArbiter) {
        at(TimeLabel::kK1);
        at(TimeLabel::kK2);
        auto sp = protocol::arbiter_resolve_server(ledger, client.contract, server_filed, server.t_qp.opening);
        at(TimeLabel::kK3);
        at(TimeLabel::kK4);
        at(TimeLabel::kK5);
        update = protocol::arbiter_resolve_client(ledger, client.contract, client_filed, client.t_qp.opening, sp);
        at(TimeLabel::kK6);
        protocol::arbiter_submit(ledger, kArbiter, client.contract, *update);
      } else {
        at(TimeLabel::kK1);
        if (!server_filed.empty())
          protocol::post_server_complaints(ledger, kServer, client.contract, server_filed, server.t_qp.opening);
        at(TimeLabel::kK4);
        if (!client_filed.empty())
          protocol::post_client_complaints(ledger, kClient, client.contract, client_filed, client.t_qp.opening);
        at(TimeLabel::kK6);
        update = protocol::contract_resolve(ledger, client.contract);
      }
      const std::size_t n_server = server_filed.size();
      for (std::size_t i = 0; i < update->outcomes.size(); ++i)
        complaints[i < n_server ? "server" : "client"]["outcomes"].push_back(outcome_json(update->outcomes[i]));

      at(TimeLabel::kL);
      before_payout = balances_json(ledger, roles);
      actual = spec.variant == Variant::kArbiter
                   ? protocol::payout_arbiter_variant(ledger, kClient, client.contract, client.t_cp.opening)
                   : protocol::payout_arbiterless_variant(ledger, kClient, client.contract, client.t_cp.opening);
      path = "payout";
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSpecInvalid) throw;
    problems.push_back(std::string("run aborted: ") + e.what());
  }

  report["session"] = session;
  report["cycles"] = cycles;
  report["complaints"] = complaints;
  report["path"] = path;
  report["deposits"] = {{"client", client_deposit}, {"server", server_deposit}};

  const Counters y = update ? update->counters : Counters{};
  report["counters"] = counters_json(y);
  json attribution = json::object();
  json exclusivity_exceptions = json::array();
  if (update) {
    for (const auto& [j, kinds] : update->attribution) {
      json list = json::array();
      for (auto k : kinds) list.push_back(protocol::counter_name(k));
      attribution[std::to_string(j)] = list;
      if (kinds.size() > 1) exclusivity_exceptions.push_back(j);
    }
  }
  report["attribution"] = attribution;
  report["exclusivity"] = {{"ok", exclusivity_exceptions.empty()}, {"multi_counter_cycles", exclusivity_exceptions}};

  json balances = {{"genesis", genesis_balances}, {"final", balances_json(ledger, roles)}};
  balances["before_payout"] = before_payout.is_null() ? json(nullptr) : before_payout;
  report["balances"] = balances;
  json deltas = json::object();
  for (const auto& a : roles)
    deltas[a.id] = static_cast<std::int64_t>(ledger.balance(a)) - genesis_balances[a.id].get<std::int64_t>();
  report["deltas"] = deltas;

  const Coin supply_after = ledger.total_supply();
  json payout = nullptr;
  bool payout_match = false;
  Coin distributed = 0;
  if (actual) {
    json act = {{"client", actual->client}, {"server", actual->server}};
    act["arbiter"] = actual->arbiter ? json(*actual->arbiter) : json(nullptr);
    distributed = actual->client + actual->server + actual->arbiter.value_or(0);
    json exp;
    try {
      if (path == "refund") {
        exp = {{"client", client_deposit}, {"server", server_deposit}, {"arbiter", nullptr}};
      } else {
        auto e = expected_payout(spec.variant, y, spec.z, spec.choice.o, spec.choice.l, client_deposit, server_deposit);
        exp = {{"client", e.client}, {"server", e.server}};
        exp["arbiter"] = e.arbiter ? json(*e.arbiter) : json(nullptr);
      }
    } catch (const Error& e) {
      problems.push_back(std::string("expected payout: ") + e.what());
    }
    json observed = json::object();
    for (const auto& a : roles)
      observed[a.id] = static_cast<std::int64_t>(ledger.balance(a)) - before_payout[a.id].get<std::int64_t>();
    const json arbiter_paid = act["arbiter"].is_null() ? json(0) : act["arbiter"];
    payout_match = !exp.is_null() && exp == act && observed["client"] == act["client"] &&
                   observed["server"] == act["server"] &&
                   (!observed.contains("arbiter") || observed["arbiter"] == arbiter_paid);
    if (!payout_match) problems.push_back("ledger payout differs from the closed-form expectation");
    payout = {{"actual", act}, {"expected", exp}, {"observed_deltas", observed}, {"match", payout_match}};
  }
  report["payout"] = payout;

  const bool conserved = supply_before == supply_after && (!actual || distributed == client_deposit + server_deposit);
  if (!conserved) problems.push_back("coin conservation violated");
  report["conservation"] = {{"supply_before", supply_before},
                            {"supply_after", supply_after},
                            {"distributed", distributed},
                            {"escrowed", client_deposit + server_deposit},
                            {"ok", conserved}};

  json trace = json::array();
  for (const auto& e : ledger.trace())
    trace.push_back({{"seq", e.seq},
                     {"time", e.time.name()},
                     {"ordinal", e.time.ordinal},
                     {"sender", e.sender.id},
                     {"kind", ledger::message_kind_name(e.kind)},
                     {"payload_digest", e.payload_digest}});
  report["trace"] = trace;

  const bool valid = problems.empty() && actual.has_value() && conserved && payout_match;
  report["problems"] = problems;
  report["status"] = valid ? "VALID" : "INVALID";
  return RunResult{report.dump(2), valid, ledger.trace_jsonl()};
}

VerifyResult verify_report(const std::string& text) {
  VerifyResult r;
  auto fail = [&](const std::string& p) { r.problems.push_back(p); };
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("not JSON: ") + e.what());
    return r;
  }
  try {
    if (doc.at("format") != "rcpor-report/1") fail("unknown report format");
    const json& ses = doc.at("session");
    const json& dep = doc.at("deposits");
    const Coin cd = dep.at("client").get<Coin>(), sd = dep.at("server").get<Coin>();
    const std::string path = doc.at("path").get<std::string>();
    const json& cons = doc.at("conservation");
    if (cons.at("supply_before") != cons.at("supply_after")) fail("total supply changed");
    if (cons.at("escrowed").get<Coin>() != cd + sd) fail("escrowed amount differs from deposits");

    if (path == "aborted") {
      fail("run was aborted");
    } else {
      const json& act = doc.at("payout").at("actual");
      const Coin ac = act.at("client").get<Coin>(), as = act.at("server").get<Coin>();
      const Coin ar = act.at("arbiter").is_null() ? 0 : act.at("arbiter").get<Coin>();
      if (ac + as + ar != cd + sd) fail("distributed coins do not sum to coin*_C + coin*_S");
      if (cons.at("distributed").get<Coin>() != ac + as + ar) fail("conservation.distributed is wrong");

      ExpectedPayout e;
      if (path == "refund") {
        e = {cd, sd, std::nullopt};
        if (ses.at("a") == 1 && sd >= ses.at("p_server").get<Coin>()) fail("refund path taken on an active contract");
      } else {
        const json& y = doc.at("counters");
        Counters c{y.at("y_c").get<std::uint32_t>(), y.at("y_c_prime").get<std::uint32_t>(),
                   y.at("y_s").get<std::uint32_t>(), y.at("y_s_prime").get<std::uint32_t>()};
        e = expected_payout(ledger::parse_variant(ses.at("variant").get<std::string>()), c,
                            ses.at("z").get<std::uint32_t>(), ses.at("o").get<Coin>(), ses.at("l").get<Coin>(), cd, sd);
      }
      if (e.client != ac || e.server != as || e.arbiter.value_or(0) != ar || e.arbiter.has_value() != !act.at("arbiter").is_null())
        fail("payout differs from the closed-form formulas");

      const json& before = doc.at("balances").at("before_payout");
      const json& after = doc.at("balances").at("final");
      auto check_party = [&](const char* who, Coin amount) {
        if (!before.contains(who)) return;
        if (after.at(who).get<Coin>() != before.at(who).get<Coin>() + amount)
          fail(std::string("final balance of ") + who + " does not reflect the payout");
      };
      check_party("client", ac);
      check_party("server", as);
      check_party("arbiter", ar);
    }

    const json& trace = doc.at("trace");
    for (std::size_t i = 0; i < trace.size(); ++i)
      if (trace[i].at("seq").get<std::uint64_t>() != i + 1) {
        fail("trace sequence has a gap at " + std::to_string(i + 1));
        break;
      }
    if (doc.at("status") != "VALID") fail("report status is " + doc.at("status").dump());
  } catch (const json::exception& e) {
    fail(std::string("report field missing or mistyped: ") + e.what());
  } catch (const Error& e) {
    fail(e.what());
  }
  r.valid = r.problems.empty();
  return r;
}

}  // namespace rcpor::scenario
