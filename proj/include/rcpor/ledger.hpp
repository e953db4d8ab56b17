#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcpor/bytes.hpp"
#include "rcpor/crypto.hpp"

namespace rcpor::ledger {

using Coin = std::uint64_t;
using SessionId = std::uint64_t;
using ContractId = std::uint64_t;

struct Address {
  std::string id;
  friend auto operator<=>(const Address&, const Address&) = default;
};

enum class TimeLabel { kGenesis, kT0, kT1, kT2, kG1, kG2, kK1, kK2, kK3, kK4, kK5, kK6, kL };

struct TimePoint {
  TimeLabel label = TimeLabel::kGenesis;
  std::uint32_t j = 0;  // billing cycle for G(j,1)/G(j,2), else 0
  std::int64_t ordinal = 0;

  std::string name() const;
  friend bool operator==(const TimePoint&, const TimePoint&) = default;
};

// Logical ordinals for every named time point of one contract. J is not a
// point of its own; it is the minimum gap between G(z,2) and K1.
struct ScheduleSpec {
  std::int64_t t0 = 0, t1 = 0, t2 = 0;
  std::vector<std::int64_t> g1, g2;  // size z
  std::int64_t j_gap = 1;
  std::array<std::int64_t, 6> k{};
  std::int64_t l = 0;
};

class Schedule {
 public:
  // Throws kInvalidSchedule unless 0<T0<T1<T2<G(1,1), G(j,1)<G(j,2)<G(j+1,1),
  // K1 > G(z,2)+J, K1<...<K6<L and z >= 1.
  static Schedule create(ScheduleSpec spec);
  // Consecutive ordinals starting at 1 with the given J gap.
  static Schedule standard(std::uint32_t z, std::int64_t j_gap = 1);

  std::uint32_t z() const { return static_cast<std::uint32_t>(spec_.g1.size()); }
  std::int64_t j_gap() const { return spec_.j_gap; }
  // Throws kInvalidParams for G labels with j outside [1, z].
  TimePoint at(TimeLabel label, std::uint32_t j = 0) const;
  const ScheduleSpec& spec() const { return spec_; }

 private:
  explicit Schedule(ScheduleSpec spec) : spec_(std::move(spec)) {}
  ScheduleSpec spec_;
};

struct SapSession {
  Address addr_client;
  Address addr_server;
  std::optional<crypto::Commitment> g_client;
  std::optional<Address> g_client_sender;
  std::optional<crypto::Commitment> g_server;
  std::optional<Address> g_server_sender;
  SessionId id = 0;
};

enum class Variant { kArbiter, kArbiterless };
const char* variant_name(Variant v);
// Throws kInvalidParams.
Variant parse_variant(const std::string& name);

struct Counters {
  std::uint32_t y_c = 0;
  std::uint32_t y_c_prime = 0;
  std::uint32_t y_s = 0;
  std::uint32_t y_s_prime = 0;
  friend bool operator==(const Counters&, const Counters&) = default;
};

struct ContractParams {
  Variant variant = Variant::kArbiter;
  std::uint32_t z = 1;
  Coin coin_star_client = 0;  // required client deposit z*(o_max+l_max)
  Coin p_server = 0;          // required server deposit z*l_max
  Address client;
  Address server;
  std::optional<Address> arbiter;  // arbiter variant only
  SessionId sap_qp = 0;
  SessionId sap_cp = 0;
  Schedule schedule = Schedule::standard(1);
};

enum class MessageKind {
  kGenesis,
  kDeploySap,
  kSapCommit,
  kDeploy,
  kDeposit,
  kAcceptFlag,
  kQuery,
  kProof,
  kServerComplaints,
  kClientComplaints,
  kCounters,
  kPayout,
};
const char* message_kind_name(MessageKind k);

// Payload-carrying message for the slot-based contract inbox. The ledger
// stamps the current time and attributes it to `sender`; callers cannot
// choose either.
struct LedgerMessage {
  Address sender;
  MessageKind kind = MessageKind::kQuery;
  std::uint32_t slot = 0;  // billing cycle j for queries/proofs, else 0
  Bytes payload;
};

struct ContractState {
  ContractId id = 0;
  Address self;
  ContractParams params;
  Coin client_deposit = 0;
  Coin server_deposit = 0;
  std::optional<bool> a_flag;
  Counters counters;
  bool counters_recorded = false;
  std::map<std::uint32_t, Bytes> posted_queries;
  std::map<std::uint32_t, Bytes> posted_proofs;
  std::optional<Bytes> server_complaints;
  std::optional<Bytes> client_complaints;
  Coin escrow = 0;
  bool paid_out = false;
};

struct TraceEntry {
  std::uint64_t seq = 0;
  TimePoint time;
  Address sender;
  MessageKind kind = MessageKind::kGenesis;
  std::string payload_digest;  // hex
};

using Distribution = std::vector<std::pair<Address, Coin>>;

// Deterministic single-ordered state machine. Every mutating call is applied
// atomically under one lock and appended to the trace; a rejected call
// leaves state untouched.
class Ledger {
 public:
  Ledger() = default;
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  // Genesis only (before the clock first advances).
  void create_account(const Address& addr, Coin balance);
  // {"accounts": [{"address": "...", "balance": N}, ...]}
  void load_genesis(const std::string& json);

  bool has_account(const Address& addr) const;
  Coin balance(const Address& addr) const;
  // Sum of balances plus every contract's escrow.
  Coin total_supply() const;
  TimePoint now() const;

  // Throws kNonMonotonicTime unless `to` is strictly later than now.
  void advance_time(const TimePoint& to);

  SessionId deploy_sap(const Address& sender, const Address& client, const Address& server);
  // Client commitment first, then the server's; each exactly once.
  void sap_commit(const Address& sender, SessionId session, const crypto::Commitment& c);
  SapSession sap_session(SessionId session) const;

  ContractId deploy(const Address& sender, ContractParams params);
  // Client: any time up to T0. Server: exactly at T1.
  void deposit(const Address& sender, ContractId contract, Coin amount);
  // Server's a-bit, exactly at T1, once.
  void set_accept_flag(const Address& sender, ContractId contract, bool a);
  // Queries at G(j,1) from the client, proofs at G(j,2) from the server,
  // server complaints at K1, client complaints at K4.
  void post(ContractId contract, const LedgerMessage& msg);
  // From the arbiter (arbiter variant) or the contract itself (arbiterless)
  // at K6, once.
  void record_counters(const Address& sender, ContractId contract, const Counters& counters);
  // "pay": from client or server at T2 or later. Throws kUnbalanced,
  // kAlreadyPaid.
  void execute_payout(const Address& sender, ContractId contract, const Distribution& distribution);

  ContractState contract(ContractId id) const;
  std::optional<Bytes> posted_query(ContractId id, std::uint32_t j) const;
  std::optional<Bytes> posted_proof(ContractId id, std::uint32_t j) const;

  std::vector<TraceEntry> trace() const;
  // One JSON object per line: {seq, time, sender, kind, payload_digest}.
  std::string trace_jsonl() const;
  // Canonical JSON of the full state (accounts, sessions, contracts).
  std::string state_json() const;

 private:
  ContractState& contract_locked(ContractId id);
  const ContractState& contract_locked(ContractId id) const;
  void require_account(const Address& addr) const;
  void require_at(const ContractState& c, const TimePoint& tp) const;
  void record(const Address& sender, MessageKind kind, ByteView payload);

  mutable std::mutex mu_;
  std::map<Address, Coin> balances_;
  std::map<SessionId, SapSession> sessions_;
  std::map<ContractId, ContractState> contracts_;
  TimePoint now_{TimeLabel::kGenesis, 0, 0};
  bool clock_started_ = false;
  std::uint64_t next_id_ = 1;
  std::vector<TraceEntry> trace_;
};

}  // namespace rcpor::ledger
