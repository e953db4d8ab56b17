#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcpor/ledger.hpp"
#include "rcpor/protocol.hpp"

namespace rcpor::scenario {

using ledger::Coin;
using ledger::Counters;
using ledger::Variant;

enum class ClientBehavior { kIllFormedMetadata, kInvalidQuery, kFalseAccusation, kWithholdQuery };
enum class ServerBehavior { kCorruptBlock, kWithholdProof, kFalseQueryComplaint, kShortDeposit };

const char* behavior_name(ClientBehavior b);
const char* behavior_name(ServerBehavior b);

struct ClientAction {
  ClientBehavior kind = ClientBehavior::kInvalidQuery;
  std::uint32_t j = 0;  // 0 for session-wide behaviors
};

struct ServerAction {
  ServerBehavior kind = ServerBehavior::kCorruptBlock;
  std::uint32_t j = 0;
  std::uint32_t entry = 1;  // corrupt_block: which proof entry
};

struct Account {
  std::string address;
  Coin balance = 0;
};

struct ScenarioSpec {
  std::size_t block_payload_len = por::kDefaultPayloadLen;
  std::uint32_t phi = por::kDefaultPhi;
  std::uint32_t z = 1;
  std::vector<protocol::PriceEntry> price_list;
  protocol::PriceEntry choice;
  std::optional<std::uint32_t> pi_max;  // per proof entry
  Variant variant = Variant::kArbiter;
  std::string codec = "identity";
  bool client_complains_on_dummy = true;
  std::int64_t j_gap = 1;

  std::optional<std::size_t> file_size;
  std::optional<std::string> file_path;

  std::vector<Account> genesis;  // empty: defaults
  std::vector<ClientAction> client;
  std::vector<ServerAction> server;
  std::uint64_t seed = 0;

  // Throws kSpecInvalid.
  static ScenarioSpec parse(const std::string& text);
  std::string to_json() const;
  void validate() const;
};

struct ExpectedPayout {
  Coin client = 0;
  Coin server = 0;
  std::optional<Coin> arbiter;
};

// Closed-form payouts evaluated from counters alone. Throws
// kCounterOutOfBounds when a counter combination is impossible for z.
ExpectedPayout expected_payout(Variant variant, const Counters& y, std::uint32_t z, Coin o, Coin l,
                               Coin coin_star_client, Coin coin_star_server);

struct RunResult {
  std::string report;  // canonical JSON text
  bool valid = false;
  std::string trace_jsonl;
};

// Throws kSpecInvalid; every other failure is captured in the report.
RunResult run(const ScenarioSpec& spec);

struct VerifyResult {
  bool valid = false;
  std::vector<std::string> problems;
};

// Recomputes conservation and expected payouts from a report's own fields.
VerifyResult verify_report(const std::string& report_json);

}  // namespace rcpor::scenario
