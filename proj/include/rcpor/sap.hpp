#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcpor/bytes.hpp"
#include "rcpor/crypto.hpp"
#include "rcpor/ledger.hpp"

namespace rcpor::sap {

using crypto::Commitment;
using crypto::Opening;
using ledger::Address;
using ledger::Ledger;
using ledger::SessionId;

struct InitResult {
  Opening opening;  // (statement, r), handed to the server out of band
  Commitment g_client;
  SessionId session = 0;
};

// Deploys a session naming both parties and posts g_client = H(x || r) from
// the client. Throws kUnknownAddress.
InitResult sap_init(Ledger& ledger, const Address& addr_client, const Address& addr_server,
                    ByteView statement, crypto::Rng& rng);

struct AgreeResult {
  std::optional<Commitment> g_server;
  bool b = false;
};

// Run by the server. Posts g_server iff the ledger attributes g_client to
// addr_client and the opening matches it.
AgreeResult sap_agree(Ledger& ledger, const Address& addr_server, ByteView statement,
                      ByteView randomness, const Commitment& g_client,
                      const Address& addr_client, SessionId session);

bool sap_verify(const Opening& opening, const Commitment& g_client, const Commitment& g_server,
                const Address& addr_client, const Address& addr_server, SessionId session,
                const Ledger& ledger);

// Off-chain form over a session snapshot: uses the recorded commitments.
bool sap_verify(const Opening& opening, const ledger::SapSession& snapshot);

// Canonical statement encoding: (tag: 1 byte, be32 length, value) triples.
class StatementWriter {
 public:
  StatementWriter& field(std::uint8_t tag, ByteView value);
  StatementWriter& u32(std::uint8_t tag, std::uint32_t v);
  StatementWriter& u64(std::uint8_t tag, std::uint64_t v);
  Bytes finish() { return std::move(out_); }

 private:
  Bytes out_;
};

struct StatementField {
  std::uint8_t tag = 0;
  Bytes value;
};

// Throws kMalformedStatement on truncation.
std::vector<StatementField> parse_statement(ByteView encoded);

}  // namespace rcpor::sap
