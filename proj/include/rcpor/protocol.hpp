#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcpor/bytes.hpp"
#include "rcpor/crypto.hpp"
#include "rcpor/ledger.hpp"
#include "rcpor/merkle.hpp"
#include "rcpor/por.hpp"
#include "rcpor/sap.hpp"
#include "rcpor/wire.hpp"

namespace rcpor::protocol {

using crypto::Commitment;
using crypto::Opening;
using ledger::Address;
using ledger::Coin;
using ledger::ContractId;
using ledger::Counters;
using ledger::Ledger;
using ledger::SessionId;
using ledger::Variant;

struct PriceEntry {
  Coin o = 0;  // per accepted verification
  Coin l = 0;  // per dispute resolution
  friend bool operator==(const PriceEntry&, const PriceEntry&) = default;
};

struct PriceList {
  std::vector<PriceEntry> entries;

  Coin o_max() const;
  Coin l_max() const;
  bool contains(const PriceEntry& e) const;
};

// qp: everything needed to encode and check queries and proofs.
struct QpStatement {
  std::uint32_t pad_pi = 0;
  crypto::SymKey k_bar;
  por::PublicParams pp;
  std::uint32_t block_payload_len = por::kDefaultPayloadLen;

  wire::ProofLayout layout() const;
  Bytes encode() const;
  // Throws kMalformedStatement.
  static QpStatement decode(ByteView encoded);
};

// cp := (o, o_max, l, l_max, z)
struct CpStatement {
  Coin o = 0;
  Coin o_max = 0;
  Coin l = 0;
  Coin l_max = 0;
  std::uint32_t z = 0;

  Bytes encode() const;
  static CpStatement decode(ByteView encoded);
  friend bool operator==(const CpStatement&, const CpStatement&) = default;
};

// SAP-agreed statement: opening plus the commitment and session it lives in.
struct Token {
  Opening opening;
  Commitment commitment;
  SessionId session = 0;
};

struct KeyGenOutput {
  crypto::SymKey k_bar;
  std::uint32_t pad_pi = 0;
  std::uint32_t pi_act = 0;  // real units per proof entry
  std::uint32_t pi_max = 0;
};

// pi_act follows from m; pi_max defaults to pi_act (no padding). Throws
// kInvalidParams when pi_max < pi_act.
KeyGenOutput key_gen(crypto::Rng& rng, std::uint32_t m, std::optional<std::uint32_t> pi_max = {});

struct Parties {
  Address client;
  Address server;
  std::optional<Address> arbiter;  // required for the arbiter variant
};

struct SessionTerms {
  std::uint32_t z = 1;
  std::uint32_t phi = por::kDefaultPhi;
  std::size_t block_payload_len = por::kDefaultPayloadLen;
  PriceList price_list;
  PriceEntry choice;
  Variant variant = Variant::kArbiter;
  std::int64_t j_gap = 1;
};

// Adversarial hooks on the client side of initiation.
struct ClientInitOptions {
  // Replaces sigma in qp with a root that does not match u*.
  std::optional<crypto::Digest> sigma_override;
};

// What the client hands to the server out of band.
struct Handoff {
  por::EncodedFile u_star;
  std::uint32_t z = 0;
  Token t_qp;
  Token t_cp;
  ContractId contract = 0;
};

struct ClientState {
  Parties parties;
  ContractId contract = 0;
  QpStatement qp;
  CpStatement cp;
  Token t_qp;
  Token t_cp;
  std::map<std::uint32_t, Bytes> query_keys;  // plaintext k_j per cycle
};

struct ClientInitOutput {
  ClientState client;
  Handoff handoff;
  Coin deposited = 0;
};

// Throws kPriceNotInList, kInsufficientBalance.
ClientInitOutput client_init(Ledger& ledger, const Parties& parties, ByteView file,
                             const por::Codec& codec, const KeyGenOutput& keys,
                             const SessionTerms& terms, crypto::Rng& rng,
                             const ClientInitOptions& options = {});

struct ServerState {
  Parties parties;
  ContractId contract = 0;
  por::EncodedFile u_star;
  std::optional<merkle::MerkleTree> tree;
  std::optional<QpStatement> qp;
  std::optional<CpStatement> cp;
  Token t_qp;
  Token t_cp;
};

struct ServerInitOptions {
  // Deposit this instead of p_S when a = 1.
  std::optional<Coin> deposit_override;
};

struct ServerInitOutput {
  ServerState server;
  bool a = false;
  std::optional<Coin> deposit;
  std::string reason;  // why a = 0
};

// Must run at T1.
ServerInitOutput server_init(Ledger& ledger, const Parties& parties, const Handoff& handoff,
                             const ServerInitOptions& options = {});

// Posts Enc(k_bar, k_j) at G(j,1) and remembers k_j. Returns the posted unit.
Bytes client_query(Ledger& ledger, ClientState& client, std::uint32_t j, crypto::Rng& rng,
                   wire::QueryForm form = wire::QueryForm::kValid);

struct ServerComplaint {
  std::uint32_t j = 0;
  friend bool operator==(const ServerComplaint&, const ServerComplaint&) = default;
};

struct ClientComplaint {
  std::uint32_t j = 0;
  std::uint32_t g = 0;
  friend bool operator==(const ClientComplaint&, const ClientComplaint&) = default;
};

struct ServerProveOptions {
  // Corrupt the block of this proof entry (1-based) before encoding.
  std::optional<std::uint32_t> corrupt_entry;
  // Complain about the query even though it is valid (still proves).
  bool false_complaint = false;
};

struct ServerProveOutput {
  bool b = false;
  std::optional<ServerComplaint> complaint;
  Bytes posted;
};

// Must run at G(j,2). Throws kMissingQuery when nothing was posted for j.
ServerProveOutput server_prove(Ledger& ledger, const ServerState& server, std::uint32_t j,
                               crypto::Rng& rng, const ServerProveOptions& options = {});

// The b_j = 0 branch on its own: posts a dummy vector and returns the
// complaint. Used when the query slot is empty.
ServerProveOutput server_reject(Ledger& ledger, const ServerState& server, std::uint32_t j,
                                crypto::Rng& rng);

struct ClientVerifyOutput {
  por::Verdict d;
  std::optional<ClientComplaint> complaint;
};

// Missing or undecodable proofs are rejections (g = first failing entry).
ClientVerifyOutput client_verify(const Ledger& ledger, const ClientState& client, std::uint32_t j);

enum class Party { kClient, kServer, kNone };
const char* party_name(Party p);

enum class CounterKind { kYc, kYcPrime, kYs, kYsPrime };
const char* counter_name(CounterKind k);

struct ComplaintOutcome {
  std::uint32_t j = 0;
  std::optional<std::uint32_t> g;
  // "admitted", "duplicate", "out_of_range", "in_v", "bad_opening"
  std::string status;
  std::optional<Party> identified;
  std::optional<CounterKind> counter;
};

struct CounterUpdate {
  Counters counters;
  std::map<std::uint32_t, std::vector<CounterKind>> attribution;
  std::vector<ComplaintOutcome> outcomes;

  void bump(std::uint32_t j, CounterKind kind);
  bool touched(std::uint32_t j, CounterKind kind) const;
};

struct ServerPassResult {
  CounterUpdate update;
  std::vector<std::uint32_t> v;  // cycles with queries found invalid
  bool opening_valid = false;
};

// Arbiter at K2: checks the qp opening, dedupes/range-filters, re-runs the
// query checks. Rejected query -> y_C, accepted -> y'_S.
ServerPassResult arbiter_resolve_server(const Ledger& ledger, ContractId contract,
                                        const std::vector<ServerComplaint>& complaints,
                                        const Opening& qp_opening);

// Arbiter at K5: single-proof check of entry g for each admitted [j, g].
CounterUpdate arbiter_resolve_client(const Ledger& ledger, ContractId contract,
                                     const std::vector<ClientComplaint>& complaints,
                                     const Opening& qp_opening, const ServerPassResult& server_pass);

// Arbiter at K6.
void arbiter_submit(Ledger& ledger, const Address& arbiter, ContractId contract,
                    const CounterUpdate& update);

// Arbiter-free: the parties post complaints and their qp opening to the
// contract (server at K1, client at K4).
void post_server_complaints(Ledger& ledger, const Address& server, ContractId contract,
                            const std::vector<ServerComplaint>& complaints, const Opening& qp_opening);
void post_client_complaints(Ledger& ledger, const Address& client, ContractId contract,
                            const std::vector<ClientComplaint>& complaints, const Opening& qp_opening);

// Arbiter-free resolution run by the contract at K6 over whatever complaints
// it holds. Maintains only y_C and y_S and records them.
CounterUpdate contract_resolve(Ledger& ledger, ContractId contract);

struct Payout {
  Coin client = 0;
  Coin server = 0;
  std::optional<Coin> arbiter;
  bool refund = false;
};

// Closed-form payouts. Throw kCounterOutOfBounds when counters exceed z.
Payout arbiter_amounts(const CpStatement& cp, Coin coin_star_client, Coin coin_star_server,
                       const Counters& y);
Payout arbiterless_amounts(const CpStatement& cp, Coin coin_star_client, Coin coin_star_server,
                           const Counters& y);

// True when the T2 withdrawal applies (a != 1 or short server deposit).
bool refund_applies(const ledger::ContractState& c);

// T2 path: returns both deposits. Throws kInvalidParams when not applicable.
Payout payout_refund(Ledger& ledger, const Address& sender, ContractId contract);

// Settlement at L. Throws kRefundPath or kBadOpening.
Payout payout_arbiter_variant(Ledger& ledger, const Address& sender, ContractId contract,
                              const Opening& cp_opening);
Payout payout_arbiterless_variant(Ledger& ledger, const Address& sender, ContractId contract,
                                  const Opening& cp_opening);

}  // namespace rcpor::protocol
