#include "rcpor/sap.hpp"

#include "rcpor/error.hpp"

namespace rcpor::sap {

InitResult sap_init(Ledger& ledger, const Address& addr_client, const Address& addr_server,
                    ByteView statement, crypto::Rng& rng) {
  SessionId session = ledger.deploy_sap(addr_client, addr_client, addr_server);
  Bytes r = rng.bytes(crypto::kCommitRandLen);
  Commitment g = crypto::commit(statement, r);
  ledger.sap_commit(addr_client, session, g);
  return InitResult{Opening{Bytes(statement.begin(), statement.end()), std::move(r)}, g, session};
}

AgreeResult sap_agree(Ledger& ledger, const Address& addr_server, ByteView statement,
                      ByteView randomness, const Commitment& g_client, const Address& addr_client,
                      SessionId session) {
  auto s = ledger.sap_session(session);
  if (s.addr_client != addr_client || s.addr_server != addr_server) return {};
  if (!s.g_client || !(*s.g_client == g_client) || s.g_client_sender != addr_client) return {};
  Opening o{Bytes(statement.begin(), statement.end()), Bytes(randomness.begin(), randomness.end())};
  if (!crypto::commit_verify(g_client, o)) return {};
  Commitment g_server = crypto::commit(statement, randomness);
  ledger.sap_commit(addr_server, session, g_server);
  return AgreeResult{g_server, true};
}

bool sap_verify(const Opening& opening, const ledger::SapSession& s) {
  if (!s.g_client || !s.g_server) return false;
  if (s.g_client_sender != s.addr_client || s.g_server_sender != s.addr_server) return false;
  if (!(*s.g_client == *s.g_server)) return false;
  return crypto::commit_verify(*s.g_client, opening);
}

bool sap_verify(const Opening& opening, const Commitment& g_client, const Commitment& g_server,
                const Address& addr_client, const Address& addr_server, SessionId session,
                const Ledger& ledger) {
  ledger::SapSession s;
  try {
    s = ledger.sap_session(session);
  } catch (const Error&) {
    return false;
  }
  if (s.addr_client != addr_client || s.addr_server != addr_server) return false;
  if (!s.g_client || !(*s.g_client == g_client) || !s.g_server || !(*s.g_server == g_server)) return false;
  return sap_verify(opening, s);
}

StatementWriter& StatementWriter::field(std::uint8_t tag, ByteView value) {
  out_.push_back(tag);
  append_u32_be(out_, static_cast<std::uint32_t>(value.size()));
  append(out_, value);
  return *this;
}

StatementWriter& StatementWriter::u32(std::uint8_t tag, std::uint32_t v) {
  Bytes b;
  append_u32_be(b, v);
  return field(tag, b);
}

StatementWriter& StatementWriter::u64(std::uint8_t tag, std::uint64_t v) {
  Bytes b;
  append_u64_be(b, v);
  return field(tag, b);
}

std::vector<StatementField> parse_statement(ByteView in) {
  std::vector<StatementField> out;
  std::size_t off = 0;
  while (off < in.size()) {
    if (in.size() - off < 5) throw Error(ErrorCode::kMalformedStatement, "truncated field header");
    std::uint8_t tag = in[off];
    std::uint32_t len = read_u32_be(in.subspan(off + 1));
    off += 5;
    if (in.size() - off < len) throw Error(ErrorCode::kMalformedStatement, "truncated field value");
    out.push_back(StatementField{tag, Bytes(in.begin() + off, in.begin() + off + len)});
    off += len;
  }
  return out;
}

}  // namespace rcpor::sap
