#include "rcpor/protocol.hpp"

#include <algorithm>
#include <set>

#include "rcpor/error.hpp"

namespace rcpor::protocol {

using ledger::MessageKind;
using ledger::TimeLabel;

namespace {

enum QpTag : std::uint8_t {
  kTagPadPi = 0x01,
  kTagKBar = 0x02,
  kTagSigma = 0x03,
  kTagPhi = 0x04,
  kTagM = 0x05,
  kTagZeta = 0x06,
  kTagPayloadLen = 0x07,
};

enum CpTag : std::uint8_t {
  kTagO = 0x11,
  kTagOMax = 0x12,
  kTagL = 0x13,
  kTagLMax = 0x14,
  kTagZ = 0x15,
};

enum ComplaintTag : std::uint8_t {
  kTagStatement = 0x21,
  kTagRandomness = 0x22,
  kTagServerList = 0x23,
  kTagClientList = 0x24,
};

const Bytes& field_value(const std::vector<sap::StatementField>& fields, std::uint8_t tag) {
  for (const auto& f : fields)
    if (f.tag == tag) return f.value;
  throw Error(ErrorCode::kMalformedStatement, "missing field " + std::to_string(tag));
}

std::uint32_t field_u32(const std::vector<sap::StatementField>& fields, std::uint8_t tag) {
  const Bytes& v = field_value(fields, tag);
  if (v.size() != 4) throw Error(ErrorCode::kMalformedStatement, "field " + std::to_string(tag) + " is not 4 bytes");
  return read_u32_be(v);
}

std::uint64_t field_u64(const std::vector<sap::StatementField>& fields, std::uint8_t tag) {
  const Bytes& v = field_value(fields, tag);
  if (v.size() != 8) throw Error(ErrorCode::kMalformedStatement, "field " + std::to_string(tag) + " is not 8 bytes");
  return read_u64_be(v);
}

void require_time(const Ledger& ledger, const ledger::Schedule& sch, TimeLabel label, std::uint32_t j = 0) {
  auto tp = sch.at(label, j);
  if (ledger.now().ordinal != tp.ordinal)
    throw Error(ErrorCode::kOutOfWindow, "step runs at " + tp.name() + " (now " + ledger.now().name() + ")");
}

std::optional<QpStatement> open_qp(const Opening& opening, const ledger::SapSession& session) {
  if (!sap::sap_verify(opening, session)) return std::nullopt;
  try {
    return QpStatement::decode(opening.statement);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

Coin PriceList::o_max() const {
  Coin v = 0;
  for (const auto& e : entries) v = std::max(v, e.o);
  return v;
}

Coin PriceList::l_max() const {
  Coin v = 0;
  for (const auto& e : entries) v = std::max(v, e.l);
  return v;
}

bool PriceList::contains(const PriceEntry& e) const {
  return std::find(entries.begin(), entries.end(), e) != entries.end();
}

wire::ProofLayout QpStatement::layout() const {
  wire::ProofLayout l;
  l.phi = pp.phi;
  l.height = wire::tree_height(pp.m);
  l.pad_pi = pad_pi;
  l.block_len = block_payload_len + por::kIndexFieldLen;
  l.hash_len = pp.sigma.size();
  return l;
}

Bytes QpStatement::encode() const {
  Bytes zeta;
  append_u32_be(zeta, pp.zeta.key_bits);
  append_u32_be(zeta, pp.zeta.input_bits);
  append_u32_be(zeta, pp.zeta.output_bits);
  return sap::StatementWriter{}
      .u32(kTagPadPi, pad_pi)
      .field(kTagKBar, k_bar.view())
      .field(kTagSigma, pp.sigma.view())
      .u32(kTagPhi, pp.phi)
      .u32(kTagM, pp.m)
      .field(kTagZeta, zeta)
      .u32(kTagPayloadLen, block_payload_len)
      .finish();
}

QpStatement QpStatement::decode(ByteView encoded) {
  auto fields = sap::parse_statement(encoded);
  const Bytes& key = field_value(fields, kTagKBar);
  if (key.size() != crypto::kSymKeyLen) throw Error(ErrorCode::kMalformedStatement, "k_bar length");
  QpStatement qp{0, crypto::SymKey(key), {}, 0};
  qp.pad_pi = field_u32(fields, kTagPadPi);
  const Bytes& sigma = field_value(fields, kTagSigma);
  if (sigma.empty() || sigma.size() > 32) throw Error(ErrorCode::kMalformedStatement, "sigma length");
  qp.pp.sigma = crypto::Digest{sigma};
  qp.pp.phi = field_u32(fields, kTagPhi);
  qp.pp.m = field_u32(fields, kTagM);
  const Bytes& zeta = field_value(fields, kTagZeta);
  if (zeta.size() != 12) throw Error(ErrorCode::kMalformedStatement, "zeta length");
  qp.pp.zeta = {read_u32_be(zeta), read_u32_be(ByteView(zeta).subspan(4)), read_u32_be(ByteView(zeta).subspan(8))};
  qp.block_payload_len = field_u32(fields, kTagPayloadLen);
  if (qp.encode() != Bytes(encoded.begin(), encoded.end()))
    throw Error(ErrorCode::kMalformedStatement, "qp is not in canonical form");
  return qp;
}

Bytes CpStatement::encode() const {
  return sap::StatementWriter{}.u64(kTagO, o).u64(kTagOMax, o_max).u64(kTagL, l).u64(kTagLMax, l_max).u32(kTagZ, z).finish();
}

CpStatement CpStatement::decode(ByteView encoded) {
  auto fields = sap::parse_statement(encoded);
  CpStatement cp{field_u64(fields, kTagO), field_u64(fields, kTagOMax), field_u64(fields, kTagL),
                 field_u64(fields, kTagLMax), field_u32(fields, kTagZ)};
  if (cp.encode() != Bytes(encoded.begin(), encoded.end()))
    throw Error(ErrorCode::kMalformedStatement, "cp is not in canonical form");
  return cp;
}

KeyGenOutput key_gen(crypto::Rng& rng, std::uint32_t m, std::optional<std::uint32_t> pi_max) {
  KeyGenOutput out{crypto::SymKey::random(rng), 0, 0, 0};
  out.pi_act = wire::entry_real_units(wire::tree_height(m));
  out.pi_max = pi_max.value_or(out.pi_act);
  if (out.pi_max < out.pi_act)
    throw Error(ErrorCode::kInvalidParams,
                "pi_max=" + std::to_string(out.pi_max) + " below pi_act=" + std::to_string(out.pi_act));
  out.pad_pi = out.pi_max - out.pi_act;
  return out;
}

ClientInitOutput client_init(Ledger& ledger, const Parties& parties, ByteView file, const por::Codec& codec,
                             const KeyGenOutput& keys, const SessionTerms& terms, crypto::Rng& rng,
                             const ClientInitOptions& options) {
  if (!terms.price_list.contains(terms.choice))
    throw Error(ErrorCode::kPriceNotInList, "(o=" + std::to_string(terms.choice.o) +
                                                ", l=" + std::to_string(terms.choice.l) + ") is not in the price list");
  if (terms.variant == Variant::kArbiter && !parties.arbiter)
    throw Error(ErrorCode::kInvalidParams, "arbiter variant needs an arbiter");
  if (terms.z == 0) throw Error(ErrorCode::kInvalidParams, "z must be at least 1");

  const Coin o_max = terms.price_list.o_max();
  const Coin l_max = terms.price_list.l_max();
  const Coin coin_star_client = terms.z * (o_max + l_max);
  const Coin p_server = terms.z * l_max;
  if (ledger.balance(parties.client) < coin_star_client)
    throw Error(ErrorCode::kInsufficientBalance, parties.client.id + " cannot cover coin*_C=" +
                                                     std::to_string(coin_star_client));

  auto setup = por::setup(file, terms.block_payload_len, codec, terms.phi);

  ClientInitOutput out;
  ClientState& c = out.client;
  c.parties = parties;
  c.qp = QpStatement{keys.pad_pi, keys.k_bar, setup.pp, static_cast<std::uint32_t>(terms.block_payload_len)};
  if (options.sigma_override) c.qp.pp.sigma = *options.sigma_override;
  c.cp = CpStatement{terms.choice.o, o_max, terms.choice.l, l_max, terms.z};

  auto qp_sap = sap::sap_init(ledger, parties.client, parties.server, c.qp.encode(), rng);
  auto cp_sap = sap::sap_init(ledger, parties.client, parties.server, c.cp.encode(), rng);
  c.t_qp = Token{qp_sap.opening, qp_sap.g_client, qp_sap.session};
  c.t_cp = Token{cp_sap.opening, cp_sap.g_client, cp_sap.session};

  ledger::ContractParams params;
  params.variant = terms.variant;
  params.z = terms.z;
  params.coin_star_client = coin_star_client;
  params.p_server = p_server;
  params.client = parties.client;
  params.server = parties.server;
  if (terms.variant == Variant::kArbiter) params.arbiter = parties.arbiter;
  params.sap_qp = qp_sap.session;
  params.sap_cp = cp_sap.session;
  params.schedule = ledger::Schedule::standard(terms.z, terms.j_gap);
  c.contract = ledger.deploy(parties.client, params);
  ledger.deposit(parties.client, c.contract, coin_star_client);

  out.handoff = Handoff{std::move(setup.file), terms.z, c.t_qp, c.t_cp, c.contract};
  out.deposited = coin_star_client;
  return out;
}

ServerInitOutput server_init(Ledger& ledger, const Parties& parties, const Handoff& handoff,
                             const ServerInitOptions& options) {
  ServerInitOutput out;
  ServerState& s = out.server;
  s.parties = parties;
  s.contract = handoff.contract;
  s.u_star = handoff.u_star;
  s.t_qp = handoff.t_qp;
  s.t_cp = handoff.t_cp;

  const auto c = ledger.contract(handoff.contract);
  require_time(ledger, c.params.schedule, TimeLabel::kT1);

  auto decide = [&]() -> std::string {
    if (c.params.client != parties.client || c.params.server != parties.server) return "contract parties differ";
    if (c.params.variant == Variant::kArbiter && c.params.arbiter != parties.arbiter) return "arbiter differs";
    if (c.params.z != handoff.z) return "z differs from the contract";
    if (c.client_deposit < c.params.coin_star_client) return "client deposit below coin*_C";
    if (handoff.t_qp.session != c.params.sap_qp || handoff.t_cp.session != c.params.sap_cp)
      return "SAP sessions differ from the contract";

    for (const Token* t : {&handoff.t_qp, &handoff.t_cp}) {
      auto agreed = sap::sap_agree(ledger, parties.server, t->opening.statement, t->opening.randomness,
                                   t->commitment, parties.client, t->session);
      if (!agreed.b) return "statement agreement failed";
    }

    QpStatement qp;
    CpStatement cp;
    try {
      qp = QpStatement::decode(handoff.t_qp.opening.statement);
      cp = CpStatement::decode(handoff.t_cp.opening.statement);
    } catch (const Error& e) {
      return e.what();
    }
    if (cp.z != handoff.z || cp.o > cp.o_max || cp.l > cp.l_max) return "cp is inconsistent";
    if (c.params.coin_star_client != cp.z * (cp.o_max + cp.l_max) || c.params.p_server != cp.z * cp.l_max)
      return "deposits do not match cp";

    const auto& u = handoff.u_star;
    if (u.m() == 0 || u.m() != qp.pp.m) return "|u*| != m";
    if (qp.pp.phi == 0 || qp.pp.phi > qp.pp.m) return "phi outside [1, m]";
    if (u.payload_len != qp.block_payload_len) return "block payload length differs";
    if (!(qp.pp.zeta == por::PrfDescription{})) return "unsupported PRF description";
    for (std::size_t i = 0; i < u.m(); ++i)
      if (por::block_index(u.blocks.block(i)) != i + 1) return "block " + std::to_string(i + 1) + " has a wrong index";
    auto tree = merkle::gen_tree(u.blocks, crypto::HashFn(qp.pp.sigma.size()));
    if (!(tree.root() == qp.pp.sigma)) return "rebuilt root differs from sigma";

    s.tree = std::move(tree);
    s.qp = std::move(qp);
    s.cp = cp;
    return {};
  };

  out.reason = decide();
  out.a = out.reason.empty();
  if (out.a) {
    Coin amount = options.deposit_override.value_or(c.params.p_server);
    ledger.deposit(parties.server, handoff.contract, amount);
    out.deposit = amount;
  } else {
    s.tree.reset();
    s.qp.reset();
    s.cp.reset();
  }
  ledger.set_accept_flag(parties.server, handoff.contract, out.a);
  return out;
}

Bytes client_query(Ledger& ledger, ClientState& client, std::uint32_t j, crypto::Rng& rng, wire::QueryForm form) {
  auto key = por::gen_query(rng);
  Bytes unit = wire::encode_query(client.qp.k_bar, key, form, rng);
  ledger.post(client.contract, ledger::LedgerMessage{client.parties.client, MessageKind::kQuery, j, unit});
  client.query_keys[j] = key.bytes();
  return unit;
}

ServerProveOutput server_reject(Ledger& ledger, const ServerState& server, std::uint32_t j, crypto::Rng& rng) {
  if (!server.qp) throw Error(ErrorCode::kInvalidParams, "server has no accepted session");
  Bytes dummy = wire::dummy_proof(server.qp->layout(), rng);
  ledger.post(server.contract, ledger::LedgerMessage{server.parties.server, MessageKind::kProof, j, dummy});
  return ServerProveOutput{false, ServerComplaint{j}, std::move(dummy)};
}

ServerProveOutput server_prove(Ledger& ledger, const ServerState& server, std::uint32_t j, crypto::Rng& rng,
                               const ServerProveOptions& options) {
  if (!server.qp || !server.tree) throw Error(ErrorCode::kInvalidParams, "server has no accepted session");
  auto posted = ledger.posted_query(server.contract, j);
  if (!posted) throw Error(ErrorCode::kMissingQuery, "no query posted for cycle " + std::to_string(j));
  require_time(ledger, ledger.contract(server.contract).params.schedule, TimeLabel::kG2, j);

  auto key = wire::decode_query(server.qp->k_bar, *posted);
  if (!key) return server_reject(ledger, server, j, rng);

  auto pi = por::prove(*server.tree, *key, server.qp->pp);
  if (options.corrupt_entry) {
    const auto g = *options.corrupt_entry;
    if (g == 0 || g > pi.size()) throw Error(ErrorCode::kInvalidParams, "corrupt entry outside [1, phi]");
    pi.entries[g - 1].block[0] ^= 0x01;
  }
  Bytes wire = wire::encode_proof(pi, server.qp->layout(), server.qp->k_bar, rng);
  ledger.post(server.contract, ledger::LedgerMessage{server.parties.server, MessageKind::kProof, j, wire});
  ServerProveOutput out{true, std::nullopt, std::move(wire)};
  if (options.false_complaint) out.complaint = ServerComplaint{j};
  return out;
}

ClientVerifyOutput client_verify(const Ledger& ledger, const ClientState& client, std::uint32_t j) {
  auto it = client.query_keys.find(j);
  if (it == client.query_keys.end())
    throw Error(ErrorCode::kMissingQuery, "client posted no query for cycle " + std::to_string(j));
  const crypto::PrfKey key(it->second);
  ClientVerifyOutput out;
  auto posted = ledger.posted_proof(client.contract, j);
  if (!posted) {
    out.d = por::Verdict::reject(1);
  } else {
    auto pi = wire::decode_proof(*posted, client.qp.layout(), client.qp.k_bar);
    out.d = por::verify(pi, key, client.qp.pp);
  }
  if (!out.d.accepted) out.complaint = ClientComplaint{j, static_cast<std::uint32_t>(*out.d.failing_index)};
  return out;
}

const char* party_name(Party p) {
  switch (p) {
    case Party::kClient: return "C";
    case Party::kServer: return "S";
    case Party::kNone: return "none";
  }
  return "?";
}

const char* counter_name(CounterKind k) {
  switch (k) {
    case CounterKind::kYc: return "y_C";
    case CounterKind::kYcPrime: return "y'_C";
    case CounterKind::kYs: return "y_S";
    case CounterKind::kYsPrime: return "y'_S";
  }
  return "?";
}

void CounterUpdate::bump(std::uint32_t j, CounterKind kind) {
  switch (kind) {
    case CounterKind::kYc: ++counters.y_c; break;
    case CounterKind::kYcPrime: ++counters.y_c_prime; break;
    case CounterKind::kYs: ++counters.y_s; break;
    case CounterKind::kYsPrime: ++counters.y_s_prime; break;
  }
  attribution[j].push_back(kind);
}

bool CounterUpdate::touched(std::uint32_t j, CounterKind kind) const {
  auto it = attribution.find(j);
  return it != attribution.end() && std::find(it->second.begin(), it->second.end(), kind) != it->second.end();
}

namespace {

ServerPassResult resolve_server(const Ledger& ledger, const ledger::ContractState& c,
                                const std::vector<ServerComplaint>& complaints, const Opening& opening) {
  ServerPassResult r;
  const bool arbiter = c.params.variant == Variant::kArbiter;
  auto qp = open_qp(opening, ledger.sap_session(c.params.sap_qp));
  r.opening_valid = qp.has_value();
  std::set<std::uint32_t> seen;
  for (const auto& m : complaints) {
    ComplaintOutcome o;
    o.j = m.j;
    if (!qp) {
      o.status = "bad_opening";
    } else if (m.j == 0 || m.j > c.params.z) {
      o.status = "out_of_range";
    } else if (!seen.insert(m.j).second) {
      o.status = "duplicate";
    } else {
      o.status = "admitted";
      auto posted = c.posted_queries.find(m.j);
      bool valid = posted != c.posted_queries.end() && wire::decode_query(qp->k_bar, posted->second).has_value();
      if (!valid) {
        o.identified = Party::kClient;
        o.counter = CounterKind::kYc;
        r.update.bump(m.j, CounterKind::kYc);
        r.v.push_back(m.j);
      } else {
        o.identified = Party::kServer;
        if (arbiter) {
          o.counter = CounterKind::kYsPrime;
          r.update.bump(m.j, CounterKind::kYsPrime);
        }
      }
    }
    r.update.outcomes.push_back(o);
  }
  return r;
}

CounterUpdate resolve_client(const Ledger& ledger, const ledger::ContractState& c,
                             const std::vector<ClientComplaint>& complaints, const Opening& opening,
                             const ServerPassResult& server_pass) {
  CounterUpdate u = server_pass.update;
  const bool arbiter = c.params.variant == Variant::kArbiter;
  auto qp = open_qp(opening, ledger.sap_session(c.params.sap_qp));
  const std::set<std::uint32_t> v(server_pass.v.begin(), server_pass.v.end());
  std::set<std::uint32_t> seen;
  for (const auto& m : complaints) {
    ComplaintOutcome o;
    o.j = m.j;
    o.g = m.g;
    if (!qp) {
      o.status = "bad_opening";
    } else if (m.j == 0 || m.j > c.params.z || m.g == 0 || m.g > qp->pp.phi) {
      o.status = "out_of_range";
    } else if (!seen.insert(m.j).second) {
      o.status = "duplicate";
    } else if (v.count(m.j)) {
      o.status = "in_v";
    } else {
      o.status = "admitted";
      auto posted = c.posted_queries.find(m.j);
      std::optional<crypto::PrfKey> key;
      if (posted != c.posted_queries.end()) key = wire::decode_query(qp->k_bar, posted->second);
      Party who = Party::kNone;
      if (!key) {
        who = Party::kClient;
      } else {
        const std::uint32_t q_g = por::derive_index(*key, m.g, qp->pp.m);
        std::optional<por::ProofEntry> entry;
        auto proof = c.posted_proofs.find(m.j);
        if (proof != c.posted_proofs.end()) entry = wire::decode_entry(proof->second, m.g, qp->layout(), qp->k_bar);
        bool ok = false;
        if (entry) {
          por::ProofVector single{{std::move(*entry)}};
          ok = por::verify(single, std::vector<std::uint32_t>{q_g}, qp->pp).accepted;
        }
        who = ok ? Party::kNone : Party::kServer;
      }
      o.identified = who;
      std::optional<CounterKind> bump;
      if (arbiter) {
        if (who == Party::kClient && !u.touched(m.j, CounterKind::kYc) && !u.touched(m.j, CounterKind::kYcPrime))
          bump = CounterKind::kYc;
        else if (who == Party::kServer && !u.touched(m.j, CounterKind::kYsPrime))
          bump = CounterKind::kYs;
        else if (who == Party::kNone && !u.touched(m.j, CounterKind::kYc))
          bump = CounterKind::kYcPrime;
      } else {
        if (who == Party::kClient) bump = CounterKind::kYc;
        if (who == Party::kServer) bump = CounterKind::kYs;
      }
      if (bump) {
        u.bump(m.j, *bump);
        o.counter = bump;
      }
    }
    u.outcomes.push_back(o);
  }
  return u;
}

Bytes encode_complaints(const Opening& opening, std::uint8_t list_tag, const Bytes& list) {
  return sap::StatementWriter{}
      .field(kTagStatement, opening.statement)
      .field(kTagRandomness, opening.randomness)
      .field(list_tag, list)
      .finish();
}

struct PostedComplaints {
  Opening opening;
  Bytes list;
};

std::optional<PostedComplaints> decode_complaints(const std::optional<Bytes>& payload, std::uint8_t list_tag,
                                                  std::size_t item_len) {
  if (!payload) return std::nullopt;
  try {
    auto fields = sap::parse_statement(*payload);
    PostedComplaints p{{field_value(fields, kTagStatement), field_value(fields, kTagRandomness)},
                       field_value(fields, list_tag)};
    if (p.list.size() % item_len != 0) return std::nullopt;
    return p;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

ServerPassResult arbiter_resolve_server(const Ledger& ledger, ContractId contract,
                                        const std::vector<ServerComplaint>& complaints, const Opening& qp_opening) {
  const auto c = ledger.contract(contract);
  require_time(ledger, c.params.schedule, TimeLabel::kK2);
  return resolve_server(ledger, c, complaints, qp_opening);
}

CounterUpdate arbiter_resolve_client(const Ledger& ledger, ContractId contract,
                                     const std::vector<ClientComplaint>& complaints, const Opening& qp_opening,
                                     const ServerPassResult& server_pass) {
  const auto c = ledger.contract(contract);
  require_time(ledger, c.params.schedule, TimeLabel::kK5);
  return resolve_client(ledger, c, complaints, qp_opening, server_pass);
}

void arbiter_submit(Ledger& ledger, const Address& arbiter, ContractId contract, const CounterUpdate& update) {
  ledger.record_counters(arbiter, contract, update.counters);
}

void post_server_complaints(Ledger& ledger, const Address& server, ContractId contract,
                            const std::vector<ServerComplaint>& complaints, const Opening& qp_opening) {
  Bytes list;
  for (const auto& m : complaints) append_u32_be(list, m.j);
  ledger.post(contract, ledger::LedgerMessage{server, MessageKind::kServerComplaints, 0,
                                              encode_complaints(qp_opening, kTagServerList, list)});
}

void post_client_complaints(Ledger& ledger, const Address& client, ContractId contract,
                            const std::vector<ClientComplaint>& complaints, const Opening& qp_opening) {
  Bytes list;
  for (const auto& m : complaints) {
    append_u32_be(list, m.j);
    append_u32_be(list, m.g);
  }
  ledger.post(contract, ledger::LedgerMessage{client, MessageKind::kClientComplaints, 0,
                                              encode_complaints(qp_opening, kTagClientList, list)});
}

CounterUpdate contract_resolve(Ledger& ledger, ContractId contract) {
  const auto c = ledger.contract(contract);
  if (c.params.variant != Variant::kArbiterless)
    throw Error(ErrorCode::kInvalidParams, "contract resolution is for the arbiter-free variant");
  require_time(ledger, c.params.schedule, TimeLabel::kK6);

  ServerPassResult server_pass;
  if (auto p = decode_complaints(c.server_complaints, kTagServerList, 4)) {
    std::vector<ServerComplaint> list;
    for (std::size_t off = 0; off < p->list.size(); off += 4)
      list.push_back(ServerComplaint{read_u32_be(ByteView(p->list).subspan(off))});
    server_pass = resolve_server(ledger, c, list, p->opening);
  }
  CounterUpdate u = server_pass.update;
  if (auto p = decode_complaints(c.client_complaints, kTagClientList, 8)) {
    std::vector<ClientComplaint> list;
    for (std::size_t off = 0; off < p->list.size(); off += 8)
      list.push_back(ClientComplaint{read_u32_be(ByteView(p->list).subspan(off)),
                                     read_u32_be(ByteView(p->list).subspan(off + 4))});
    u = resolve_client(ledger, c, list, p->opening, server_pass);
  }
  ledger.record_counters(c.self, contract, u.counters);
  return u;
}

namespace {

using Wide = __int128;

Coin to_coin(Wide v, const char* who) {
  if (v < 0 || v > static_cast<Wide>(UINT64_MAX))
    throw Error(ErrorCode::kCounterOutOfBounds, std::string(who) + " payout out of range");
  return static_cast<Coin>(v);
}

void check_bounds(const CpStatement& cp, const Counters& y, bool arbiter) {
  const std::uint64_t z = cp.z;
  bool ok = y.y_c <= z && y.y_s <= z;
  if (arbiter)
    ok = ok && std::uint64_t{y.y_c} + y.y_c_prime <= z && std::uint64_t{y.y_s} + y.y_s_prime <= z;
  else
    ok = ok && y.y_c_prime == 0 && y.y_s_prime == 0 && std::uint64_t{y.y_c} + y.y_s <= z;
  if (!ok) throw Error(ErrorCode::kCounterOutOfBounds, "counters exceed what z=" + std::to_string(z) + " allows");
}

}  // namespace

Payout arbiter_amounts(const CpStatement& cp, Coin coin_star_client, Coin coin_star_server, const Counters& y) {
  check_bounds(cp, y, true);
  const Wide served = Wide(cp.o) * (Wide(cp.z) - y.y_s);
  Payout p;
  p.client = to_coin(Wide(coin_star_client) - served - Wide(cp.l) * (Wide(y.y_c) + y.y_c_prime), "client");
  p.server = to_coin(Wide(coin_star_server) + served - Wide(cp.l) * (Wide(y.y_s) + y.y_s_prime), "server");
  p.arbiter = to_coin(Wide(cp.l) * (Wide(y.y_s) + y.y_c + y.y_s_prime + y.y_c_prime), "arbiter");
  return p;
}

Payout arbiterless_amounts(const CpStatement& cp, Coin coin_star_client, Coin coin_star_server, const Counters& y) {
  check_bounds(cp, y, false);
  const Wide served = Wide(cp.o) * (Wide(cp.z) - y.y_s);
  const Wide shift = Wide(cp.l) * (Wide(y.y_s) - y.y_c);
  Payout p;
  p.client = to_coin(Wide(coin_star_client) - served + shift, "client");
  p.server = to_coin(Wide(coin_star_server) + served - shift, "server");
  return p;
}

bool refund_applies(const ledger::ContractState& c) {
  return !c.a_flag.value_or(false) || c.server_deposit < c.params.p_server;
}

Payout payout_refund(Ledger& ledger, const Address& sender, ContractId contract) {
  const auto c = ledger.contract(contract);
  if (!refund_applies(c)) throw Error(ErrorCode::kInvalidParams, "contract is active; no refund");
  ledger.execute_payout(sender, contract, {{c.params.client, c.client_deposit}, {c.params.server, c.server_deposit}});
  return Payout{c.client_deposit, c.server_deposit, std::nullopt, true};
}

namespace {

Payout pay(Ledger& ledger, const Address& sender, ContractId contract, const Opening& cp_opening, Variant variant) {
  const auto c = ledger.contract(contract);
  if (c.params.variant != variant) throw Error(ErrorCode::kInvalidParams, "wrong payout variant for this contract");
  if (refund_applies(c)) throw Error(ErrorCode::kRefundPath, "a=0 or short server deposit; use the T2 refund");
  require_time(ledger, c.params.schedule, TimeLabel::kL);
  if (!c.counters_recorded) throw Error(ErrorCode::kOutOfWindow, "counters were not recorded at K6");
  if (!sap::sap_verify(cp_opening, ledger.sap_session(c.params.sap_cp)))
    throw Error(ErrorCode::kBadOpening, "cp opening does not match the agreed commitment");
  CpStatement cp;
  try {
    cp = CpStatement::decode(cp_opening.statement);
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadOpening, e.what());
  }
  if (cp.z != c.params.z) throw Error(ErrorCode::kBadOpening, "cp.z differs from the contract");

  Payout p = variant == Variant::kArbiter
                 ? arbiter_amounts(cp, c.client_deposit, c.server_deposit, c.counters)
                 : arbiterless_amounts(cp, c.client_deposit, c.server_deposit, c.counters);
  ledger::Distribution dist{{c.params.client, p.client}, {c.params.server, p.server}};
  if (p.arbiter) dist.emplace_back(*c.params.arbiter, *p.arbiter);
  ledger.execute_payout(sender, contract, dist);
  return p;
}

}  // namespace

Payout payout_arbiter_variant(Ledger& ledger, const Address& sender, ContractId contract, const Opening& cp_opening) {
  return pay(ledger, sender, contract, cp_opening, Variant::kArbiter);
}

Payout payout_arbiterless_variant(Ledger& ledger, const Address& sender, ContractId contract,
                                  const Opening& cp_opening) {
  return pay(ledger, sender, contract, cp_opening, Variant::kArbiterless);
}

}  // namespace rcpor::protocol
