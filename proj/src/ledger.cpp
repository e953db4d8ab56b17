#include "rcpor/ledger.hpp"

#include <json.hpp>

#include "rcpor/error.hpp"

namespace rcpor::ledger {

using nlohmann::json;

namespace {

const char* label_name(TimeLabel l) {
  switch (l) {
    case TimeLabel::kGenesis: return "genesis";
    case TimeLabel::kT0: return "T0";
    case TimeLabel::kT1: return "T1";
    case TimeLabel::kT2: return "T2";
    case TimeLabel::kG1: return "G1";
    case TimeLabel::kG2: return "G2";
    case TimeLabel::kK1: return "K1";
    case TimeLabel::kK2: return "K2";
    case TimeLabel::kK3: return "K3";
    case TimeLabel::kK4: return "K4";
    case TimeLabel::kK5: return "K5";
    case TimeLabel::kK6: return "K6";
    case TimeLabel::kL: return "L";
  }
  return "?";
}

Bytes coin_payload(Coin v) {
  Bytes b;
  append_u64_be(b, v);
  return b;
}

}  // namespace

std::string TimePoint::name() const {
  if (label == TimeLabel::kG1 || label == TimeLabel::kG2)
    return "G(" + std::to_string(j) + "," + (label == TimeLabel::kG1 ? "1" : "2") + ")";
  return label_name(label);
}

Schedule Schedule::create(ScheduleSpec s) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidSchedule, why); };
  if (s.g1.empty()) fail("z must be at least 1");
  if (s.g1.size() != s.g2.size()) fail("G(j,1) and G(j,2) counts differ");
  if (s.j_gap < 0) fail("J must be non-negative");
  if (!(0 < s.t0 && s.t0 < s.t1 && s.t1 < s.t2 && s.t2 < s.g1[0])) fail("need 0 < T0 < T1 < T2 < G(1,1)");
  for (std::size_t j = 0; j < s.g1.size(); ++j) {
    if (!(s.g1[j] < s.g2[j])) fail("G(j,1) must precede G(j,2)");
    if (j + 1 < s.g1.size() && !(s.g2[j] < s.g1[j + 1])) fail("cycles must not overlap");
  }
  if (!(s.k[0] > s.g2.back() + s.j_gap)) fail("K1 must exceed G(z,2) + J");
  for (std::size_t i = 1; i < s.k.size(); ++i)
    if (!(s.k[i - 1] < s.k[i])) fail("K1 < ... < K6 violated");
  if (!(s.k[5] < s.l)) fail("L must follow K6");
  return Schedule(std::move(s));
}

Schedule Schedule::standard(std::uint32_t z, std::int64_t j_gap) {
  ScheduleSpec s;
  s.t0 = 1;
  s.t1 = 2;
  s.t2 = 3;
  std::int64_t t = 3;
  for (std::uint32_t j = 0; j < z; ++j) {
    s.g1.push_back(++t);
    s.g2.push_back(++t);
  }
  s.j_gap = j_gap;
  t += j_gap;
  for (auto& k : s.k) k = ++t;
  s.l = ++t;
  return create(std::move(s));
}

TimePoint Schedule::at(TimeLabel label, std::uint32_t j) const {
  switch (label) {
    case TimeLabel::kT0: return {label, 0, spec_.t0};
    case TimeLabel::kT1: return {label, 0, spec_.t1};
    case TimeLabel::kT2: return {label, 0, spec_.t2};
    case TimeLabel::kG1:
    case TimeLabel::kG2:
      if (j == 0 || j > z())
        throw Error(ErrorCode::kInvalidParams, "cycle " + std::to_string(j) + " outside [1, " + std::to_string(z()) + "]");
      return {label, j, label == TimeLabel::kG1 ? spec_.g1[j - 1] : spec_.g2[j - 1]};
    case TimeLabel::kK1:
    case TimeLabel::kK2:
    case TimeLabel::kK3:
    case TimeLabel::kK4:
    case TimeLabel::kK5:
    case TimeLabel::kK6:
      return {label, 0, spec_.k[static_cast<int>(label) - static_cast<int>(TimeLabel::kK1)]};
    case TimeLabel::kL: return {label, 0, spec_.l};
    case TimeLabel::kGenesis: break;
  }
  throw Error(ErrorCode::kInvalidParams, "genesis is not a schedule point");
}

const char* variant_name(Variant v) { return v == Variant::kArbiter ? "arbiter" : "arbiterless"; }

Variant parse_variant(const std::string& name) {
  if (name == "arbiter") return Variant::kArbiter;
  if (name == "arbiterless") return Variant::kArbiterless;
  throw Error(ErrorCode::kInvalidParams, "unknown variant '" + name + "'");
}

const char* message_kind_name(MessageKind k) {
  switch (k) {
    case MessageKind::kGenesis: return "genesis";
    case MessageKind::kDeploySap: return "deploy_sap";
    case MessageKind::kSapCommit: return "sap_commit";
    case MessageKind::kDeploy: return "deploy";
    case MessageKind::kDeposit: return "deposit";
    case MessageKind::kAcceptFlag: return "accept_flag";
    case MessageKind::kQuery: return "query";
    case MessageKind::kProof: return "proof";
    case MessageKind::kServerComplaints: return "server_complaints";
    case MessageKind::kClientComplaints: return "client_complaints";
    case MessageKind::kCounters: return "counters";
    case MessageKind::kPayout: return "payout";
  }
  return "?";
}

void Ledger::create_account(const Address& addr, Coin balance) {
  std::lock_guard lock(mu_);
  if (clock_started_) throw Error(ErrorCode::kOutOfWindow, "accounts are created at genesis only");
  if (addr.id.empty()) throw Error(ErrorCode::kInvalidParams, "empty address");
  if (balances_.count(addr)) throw Error(ErrorCode::kInvalidParams, "account exists: " + addr.id);
  balances_[addr] = balance;
  record(addr, MessageKind::kGenesis, coin_payload(balance));
}

void Ledger::load_genesis(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidParams, std::string("genesis: ") + e.what());
  }
  if (!doc.contains("accounts") || !doc["accounts"].is_array())
    throw Error(ErrorCode::kInvalidParams, "genesis: missing accounts array");
  for (const auto& a : doc["accounts"]) {
    if (!a.contains("address") || !a["address"].is_string() || !a.contains("balance") ||
        !a["balance"].is_number_unsigned())
      throw Error(ErrorCode::kInvalidParams, "genesis: bad account entry");
    create_account(Address{a["address"].get<std::string>()}, a["balance"].get<Coin>());
  }
}

bool Ledger::has_account(const Address& addr) const {
  std::lock_guard lock(mu_);
  return balances_.count(addr) != 0;
}

Coin Ledger::balance(const Address& addr) const {
  std::lock_guard lock(mu_);
  require_account(addr);
  return balances_.at(addr);
}

Coin Ledger::total_supply() const {
  std::lock_guard lock(mu_);
  Coin total = 0;
  for (const auto& [_, b] : balances_) total += b;
  for (const auto& [_, c] : contracts_) total += c.escrow;
  return total;
}

TimePoint Ledger::now() const {
  std::lock_guard lock(mu_);
  return now_;
}

void Ledger::advance_time(const TimePoint& to) {
  std::lock_guard lock(mu_);
  if (to.ordinal <= now_.ordinal)
    throw Error(ErrorCode::kNonMonotonicTime,
                "cannot move from " + now_.name() + " to " + to.name());
  now_ = to;
  clock_started_ = true;
}

SessionId Ledger::deploy_sap(const Address& sender, const Address& client, const Address& server) {
  std::lock_guard lock(mu_);
  require_account(sender);
  require_account(client);
  require_account(server);
  SessionId id = next_id_++;
  SapSession s;
  s.addr_client = client;
  s.addr_server = server;
  s.id = id;
  sessions_[id] = s;
  Bytes payload;
  append_u64_be(payload, id);
  append(payload, as_view(client.id));
  append(payload, as_view(server.id));
  record(sender, MessageKind::kDeploySap, payload);
  return id;
}

void Ledger::sap_commit(const Address& sender, SessionId session, const crypto::Commitment& c) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownContract, "no SAP session " + std::to_string(session));
  SapSession& s = it->second;
  if (sender == s.addr_client) {
    if (s.g_client) throw Error(ErrorCode::kDuplicateSlot, "client commitment already posted");
    s.g_client = c;
    s.g_client_sender = sender;
  } else if (sender == s.addr_server) {
    if (!s.g_client) throw Error(ErrorCode::kOutOfWindow, "server commits after the client");
    if (s.g_server) throw Error(ErrorCode::kDuplicateSlot, "server commitment already posted");
    s.g_server = c;
    s.g_server_sender = sender;
  } else {
    throw Error(ErrorCode::kWrongSender, sender.id + " is not a party of SAP session " + std::to_string(session));
  }
  record(sender, MessageKind::kSapCommit, c.digest.view());
}

SapSession Ledger::sap_session(SessionId session) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(session);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownContract, "no SAP session " + std::to_string(session));
  return it->second;
}

ContractId Ledger::deploy(const Address& sender, ContractParams params) {
  std::lock_guard lock(mu_);
  require_account(sender);
  if (sender != params.client) throw Error(ErrorCode::kWrongSender, "the client deploys the contract");
  require_account(params.client);
  require_account(params.server);
  if (params.variant == Variant::kArbiter) {
    if (!params.arbiter) throw Error(ErrorCode::kInvalidParams, "arbiter variant needs an arbiter address");
    require_account(*params.arbiter);
  }
  if (params.z != params.schedule.z()) throw Error(ErrorCode::kInvalidSchedule, "schedule z differs from contract z");
  for (auto sid : {params.sap_qp, params.sap_cp})
    if (!sessions_.count(sid)) throw Error(ErrorCode::kUnknownContract, "no SAP session " + std::to_string(sid));

  ContractId id = next_id_++;
  ContractState c;
  c.id = id;
  c.self = Address{"contract:" + std::to_string(id)};
  c.params = std::move(params);
  contracts_[id] = c;
  Bytes payload;
  append_u64_be(payload, id);
  append_u32_be(payload, c.params.z);
  append_u64_be(payload, c.params.coin_star_client);
  append_u64_be(payload, c.params.p_server);
  record(sender, MessageKind::kDeploy, payload);
  return id;
}

void Ledger::deposit(const Address& sender, ContractId contract, Coin amount) {
  std::lock_guard lock(mu_);
  ContractState& c = contract_locked(contract);
  require_account(sender);
  const auto& sch = c.params.schedule;
  if (sender == c.params.client) {
    if (now_.ordinal > sch.at(TimeLabel::kT0).ordinal)
      throw Error(ErrorCode::kOutOfWindow, "client deposits close at T0 (now " + now_.name() + ")");
  } else if (sender == c.params.server) {
    require_at(c, sch.at(TimeLabel::kT1));
  } else {
    throw Error(ErrorCode::kWrongSender, sender.id + " cannot deposit into contract " + std::to_string(contract));
  }
  Coin& bal = balances_[sender];
  if (bal < amount)
    throw Error(ErrorCode::kInsufficientBalance,
                sender.id + " has " + std::to_string(bal) + ", needs " + std::to_string(amount));
  bal -= amount;
  c.escrow += amount;
  (sender == c.params.client ? c.client_deposit : c.server_deposit) += amount;
  record(sender, MessageKind::kDeposit, coin_payload(amount));
}

void Ledger::set_accept_flag(const Address& sender, ContractId contract, bool a) {
  std::lock_guard lock(mu_);
  ContractState& c = contract_locked(contract);
  if (sender != c.params.server) throw Error(ErrorCode::kWrongSender, "only the server sets a");
  require_at(c, c.params.schedule.at(TimeLabel::kT1));
  if (c.a_flag) throw Error(ErrorCode::kDuplicateSlot, "a already set");
  c.a_flag = a;
  record(sender, MessageKind::kAcceptFlag, Bytes{static_cast<std::uint8_t>(a ? 1 : 0)});
}

void Ledger::post(ContractId contract, const LedgerMessage& msg) {
  std::lock_guard lock(mu_);
  ContractState& c = contract_locked(contract);
  require_account(msg.sender);
  const auto& sch = c.params.schedule;
  auto expect_sender = [&](const Address& who, const char* role) {
    if (msg.sender != who)
      throw Error(ErrorCode::kWrongSender, std::string(message_kind_name(msg.kind)) + " must come from the " + role);
  };
  auto check_slot = [&] {
    if (msg.slot == 0 || msg.slot > c.params.z)
      throw Error(ErrorCode::kInvalidParams, "slot " + std::to_string(msg.slot) + " outside [1, z]");
    if (c.a_flag != true) throw Error(ErrorCode::kOutOfWindow, "contract not accepted by the server");
  };
  switch (msg.kind) {
    case MessageKind::kQuery:
      expect_sender(c.params.client, "client");
      check_slot();
      require_at(c, sch.at(TimeLabel::kG1, msg.slot));
      if (c.posted_queries.count(msg.slot)) throw Error(ErrorCode::kDuplicateSlot, "query already posted");
      c.posted_queries[msg.slot] = msg.payload;
      break;
    case MessageKind::kProof:
      expect_sender(c.params.server, "server");
      check_slot();
      require_at(c, sch.at(TimeLabel::kG2, msg.slot));
      if (c.posted_proofs.count(msg.slot)) throw Error(ErrorCode::kDuplicateSlot, "proof already posted");
      c.posted_proofs[msg.slot] = msg.payload;
      break;
    case MessageKind::kServerComplaints:
      if (c.params.variant != Variant::kArbiterless)
        throw Error(ErrorCode::kInvalidParams, "complaints go to the arbiter in this variant");
      expect_sender(c.params.server, "server");
      require_at(c, sch.at(TimeLabel::kK1));
      if (c.server_complaints) throw Error(ErrorCode::kDuplicateSlot, "server complaints already posted");
      c.server_complaints = msg.payload;
      break;
    case MessageKind::kClientComplaints:
      if (c.params.variant != Variant::kArbiterless)
        throw Error(ErrorCode::kInvalidParams, "complaints go to the arbiter in this variant");
      expect_sender(c.params.client, "client");
      require_at(c, sch.at(TimeLabel::kK4));
      if (c.client_complaints) throw Error(ErrorCode::kDuplicateSlot, "client complaints already posted");
      c.client_complaints = msg.payload;
      break;
    default:
      throw Error(ErrorCode::kInvalidParams,
                  std::string("message kind ") + message_kind_name(msg.kind) + " has its own entry point");
  }
  record(msg.sender, msg.kind, msg.payload);
}

void Ledger::record_counters(const Address& sender, ContractId contract, const Counters& y) {
  std::lock_guard lock(mu_);
  ContractState& c = contract_locked(contract);
  const Address& expected = c.params.variant == Variant::kArbiter ? *c.params.arbiter : c.self;
  if (sender != expected) throw Error(ErrorCode::kWrongSender, sender.id + " cannot record counters");
  require_at(c, c.params.schedule.at(TimeLabel::kK6));
  if (c.counters_recorded) throw Error(ErrorCode::kDuplicateSlot, "counters already recorded");
  c.counters = y;
  c.counters_recorded = true;
  Bytes payload;
  for (auto v : {y.y_c, y.y_s, y.y_c_prime, y.y_s_prime}) append_u32_be(payload, v);
  record(sender, MessageKind::kCounters, payload);
}

void Ledger::execute_payout(const Address& sender, ContractId contract, const Distribution& dist) {
  std::lock_guard lock(mu_);
  ContractState& c = contract_locked(contract);
  if (sender != c.params.client && sender != c.params.server)
    throw Error(ErrorCode::kWrongSender, "only the client or server can trigger pay");
  if (now_.ordinal < c.params.schedule.at(TimeLabel::kT2).ordinal)
    throw Error(ErrorCode::kOutOfWindow, "pay opens at T2");
  if (c.paid_out) throw Error(ErrorCode::kAlreadyPaid, "contract " + std::to_string(contract) + " already paid");
  Coin sum = 0;
  for (const auto& [addr, amount] : dist) {
    require_account(addr);
    sum += amount;
  }
  if (sum != c.escrow)
    throw Error(ErrorCode::kUnbalanced,
                "distribution sums to " + std::to_string(sum) + ", escrow is " + std::to_string(c.escrow));
  Bytes payload;
  for (const auto& [addr, amount] : dist) {
    balances_[addr] += amount;
    append(payload, as_view(addr.id));
    append_u64_be(payload, amount);
  }
  c.escrow = 0;
  c.paid_out = true;
  record(sender, MessageKind::kPayout, payload);
}

ContractState Ledger::contract(ContractId id) const {
  std::lock_guard lock(mu_);
  return contract_locked(id);
}

std::optional<Bytes> Ledger::posted_query(ContractId id, std::uint32_t j) const {
  std::lock_guard lock(mu_);
  const auto& c = contract_locked(id);
  auto it = c.posted_queries.find(j);
  if (it == c.posted_queries.end()) return std::nullopt;
  return it->second;
}

std::optional<Bytes> Ledger::posted_proof(ContractId id, std::uint32_t j) const {
  std::lock_guard lock(mu_);
  const auto& c = contract_locked(id);
  auto it = c.posted_proofs.find(j);
  if (it == c.posted_proofs.end()) return std::nullopt;
  return it->second;
}

std::vector<TraceEntry> Ledger::trace() const {
  std::lock_guard lock(mu_);
  return trace_;
}

std::string Ledger::trace_jsonl() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const auto& e : trace_) {
    json line = {{"seq", e.seq},
                 {"time", e.time.name()},
                 {"ordinal", e.time.ordinal},
                 {"sender", e.sender.id},
                 {"kind", message_kind_name(e.kind)},
                 {"payload_digest", e.payload_digest}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::string Ledger::state_json() const {
  std::lock_guard lock(mu_);
  json doc;
  doc["now"] = {{"time", now_.name()}, {"ordinal", now_.ordinal}};
  json accounts = json::object();
  for (const auto& [a, b] : balances_) accounts[a.id] = b;
  doc["accounts"] = accounts;
  json sessions = json::array();
  for (const auto& [id, s] : sessions_) {
    sessions.push_back({{"id", id},
                        {"client", s.addr_client.id},
                        {"server", s.addr_server.id},
                        {"g_client", s.g_client ? json(s.g_client->digest.hex()) : json(nullptr)},
                        {"g_server", s.g_server ? json(s.g_server->digest.hex()) : json(nullptr)}});
  }
  doc["sap_sessions"] = sessions;
  json contracts = json::array();
  for (const auto& [id, c] : contracts_) {
    contracts.push_back({{"id", id},
                         {"address", c.self.id},
                         {"variant", variant_name(c.params.variant)},
                         {"z", c.params.z},
                         {"client_deposit", c.client_deposit},
                         {"server_deposit", c.server_deposit},
                         {"a", c.a_flag ? json(*c.a_flag) : json(nullptr)},
                         {"escrow", c.escrow},
                         {"paid_out", c.paid_out},
                         {"counters_recorded", c.counters_recorded},
                         {"counters",
                          {{"y_c", c.counters.y_c},
                           {"y_c_prime", c.counters.y_c_prime},
                           {"y_s", c.counters.y_s},
                           {"y_s_prime", c.counters.y_s_prime}}}});
  }
  doc["contracts"] = contracts;
  return doc.dump();
}

ContractState& Ledger::contract_locked(ContractId id) {
  auto it = contracts_.find(id);
  if (it == contracts_.end()) throw Error(ErrorCode::kUnknownContract, "no contract " + std::to_string(id));
  return it->second;
}

const ContractState& Ledger::contract_locked(ContractId id) const {
  auto it = contracts_.find(id);
  if (it == contracts_.end()) throw Error(ErrorCode::kUnknownContract, "no contract " + std::to_string(id));
  return it->second;
}

void Ledger::require_account(const Address& addr) const {
  if (!balances_.count(addr)) throw Error(ErrorCode::kUnknownAddress, "unknown address '" + addr.id + "'");
}

void Ledger::require_at(const ContractState&, const TimePoint& tp) const {
  if (now_.ordinal != tp.ordinal)
    throw Error(ErrorCode::kOutOfWindow, "allowed only at " + tp.name() + " (now " + now_.name() + ")");
}

void Ledger::record(const Address& sender, MessageKind kind, ByteView payload) {
  trace_.push_back(TraceEntry{trace_.size() + 1, now_, sender, kind, to_hex(crypto::sha256(payload))});
}

}  // namespace rcpor::ledger
