#include <gtest/gtest.h>

#include "rcpor/error.hpp"
#include "rcpor/protocol.hpp"

using namespace rcpor;
using namespace rcpor::protocol;
using ledger::TimeLabel;

namespace {

using Triple = std::tuple<ledger::Coin, ledger::Coin, ledger::Coin>;
using Duo = std::pair<ledger::Coin, ledger::Coin>;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

const Address C{"client"}, S{"server"}, R{"arbiter"};

// One session driven step by step; z=3, o=5, l=2 unless overridden.
struct Session {
  Ledger ledger;
  crypto::Rng rng{21};
  por::IdentityCodec codec;
  SessionTerms terms;
  Parties parties{C, S, R};
  Bytes file;
  KeyGenOutput keys;
  std::optional<ClientInitOutput> ci;
  std::optional<ServerInitOutput> si;

  explicit Session(Variant v = Variant::kArbiter, std::uint32_t z = 3) {
    ledger.create_account(C, 1000);
    ledger.create_account(S, 1000);
    ledger.create_account(R, 0);
    terms.z = z;
    terms.phi = 8;
    terms.price_list.entries = {{5, 2}};
    terms.choice = {5, 2};
    terms.variant = v;
    if (v == Variant::kArbiterless) parties.arbiter.reset();
    file = rng.bytes(2048);
  }

  ledger::Schedule schedule() const { return ledger::Schedule::standard(terms.z, terms.j_gap); }
  void to(TimeLabel l, std::uint32_t j = 0) { ledger.advance_time(schedule().at(l, j)); }
  ContractId id() const { return ci->client.contract; }

  void init(const ClientInitOptions& copts = {}, const ServerInitOptions& sopts = {}) {
    const std::uint32_t m = static_cast<std::uint32_t>(codec.encode(file, terms.block_payload_len).size() /
                                                       terms.block_payload_len);
    keys = key_gen(rng, m);
    to(TimeLabel::kT0);
    ci = client_init(ledger, parties, file, codec, keys, terms, rng, copts);
    to(TimeLabel::kT1);
    si = server_init(ledger, parties, ci->handoff, sopts);
  }

  // Runs cycle j; returns the client's complaint, if any.
  std::pair<std::optional<ServerComplaint>, std::optional<ClientComplaint>> cycle(
      std::uint32_t j, wire::QueryForm form = wire::QueryForm::kValid, const ServerProveOptions& popts = {}) {
    to(TimeLabel::kG1, j);
    client_query(ledger, ci->client, j, rng, form);
    to(TimeLabel::kG2, j);
    auto sp = server_prove(ledger, si->server, j, rng, popts);
    auto cv = client_verify(ledger, ci->client, j);
    return {sp.complaint, cv.complaint};
  }

  CounterUpdate resolve(const std::vector<ServerComplaint>& sc, const std::vector<ClientComplaint>& cc) {
    to(TimeLabel::kK2);
    auto sp = arbiter_resolve_server(ledger, id(), sc, si->server.t_qp.opening);
    to(TimeLabel::kK5);
    auto up = arbiter_resolve_client(ledger, id(), cc, ci->client.t_qp.opening, sp);
    to(TimeLabel::kK6);
    arbiter_submit(ledger, R, id(), up);
    return up;
  }

  Payout pay() {
    to(TimeLabel::kL);
    return terms.variant == Variant::kArbiter
               ? payout_arbiter_variant(ledger, C, id(), ci->client.t_cp.opening)
               : payout_arbiterless_variant(ledger, C, id(), ci->client.t_cp.opening);
  }
};

CpStatement cp_535() { return {5, 5, 2, 2, 3}; }

}  // namespace

TEST(KeyGen, PaddingFollowsPiMax) {
  crypto::Rng rng(1);
  auto k = key_gen(rng, 128);
  EXPECT_EQ(k.pi_act, 9u);
  EXPECT_EQ(k.pi_max, 9u);
  EXPECT_EQ(k.pad_pi, 0u);
  auto p = key_gen(rng, 128, 12);
  EXPECT_EQ(p.pad_pi, 3u);
  EXPECT_NE(k.k_bar, p.k_bar);
  EXPECT_EQ(code_of([&] { key_gen(rng, 128, 8); }), ErrorCode::kInvalidParams);
}

TEST(Statements, CpEncodingFrozen) {
  Bytes enc = cp_535().encode();
  EXPECT_EQ(to_hex(enc),
            "110000000800000000000000051200000008000000000000000513000000080000000000000002"
            "14000000080000000000000002150000000400000003");
  EXPECT_EQ(CpStatement::decode(enc), cp_535());
  Bytes r(16);
  for (int i = 0; i < 16; ++i) r[i] = static_cast<std::uint8_t>(i);
  EXPECT_EQ(crypto::commit(enc, r).digest.hex(), "dac37d2c04606f2689bea1726bd28fc9");
}

TEST(Statements, DecodeIsStrict) {
  Bytes enc = cp_535().encode();
  Bytes extra = enc;
  extra.insert(extra.end(), {0x16, 0, 0, 0, 0});
  EXPECT_EQ(code_of([&] { CpStatement::decode(extra); }), ErrorCode::kMalformedStatement);
  EXPECT_EQ(code_of([&] { CpStatement::decode(Bytes(enc.begin(), enc.end() - 1)); }),
            ErrorCode::kMalformedStatement);

  Session s;
  s.init();
  const auto& qp = s.ci->client.qp;
  auto back = QpStatement::decode(qp.encode());
  EXPECT_EQ(back.encode(), qp.encode());
  EXPECT_EQ(back.pp, qp.pp);
  EXPECT_EQ(code_of([&] { QpStatement::decode(enc); }), ErrorCode::kMalformedStatement);
}

TEST(Init, DepositsAndAcceptance) {
  Session s;
  s.init();
  EXPECT_EQ(s.ci->deposited, 21u);
  EXPECT_TRUE(s.si->a);
  EXPECT_EQ(s.si->deposit, 6u);
  auto c = s.ledger.contract(s.id());
  EXPECT_EQ(c.escrow, 27u);
  EXPECT_EQ(c.a_flag, true);
  EXPECT_FALSE(refund_applies(c));
  EXPECT_EQ(c.counters, Counters{});
}

TEST(Init, PriceNotInList) {
  Session s;
  s.terms.choice = {4, 2};
  EXPECT_EQ(code_of([&] { s.init(); }), ErrorCode::kPriceNotInList);
}

TEST(Init, WrongSigmaRefused) {
  Session s;
  crypto::Rng other(99);
  por::IdentityCodec codec;
  ClientInitOptions copts;
  copts.sigma_override = por::setup(other.bytes(2048), 16, codec, 8).pp.sigma;
  s.init(copts);
  EXPECT_FALSE(s.si->a);
  EXPECT_FALSE(s.si->reason.empty());
  EXPECT_TRUE(refund_applies(s.ledger.contract(s.id())));
  s.to(TimeLabel::kT2);
  auto p = payout_refund(s.ledger, C, s.id());
  EXPECT_TRUE(p.refund);
  EXPECT_EQ(p.client, 21u);
  EXPECT_EQ(p.server, 0u);
  EXPECT_EQ(s.ledger.balance(C), 1000u);
  EXPECT_EQ(s.ledger.balance(S), 1000u);
  EXPECT_EQ(code_of([&] { s.pay(); }), ErrorCode::kRefundPath);
}

TEST(Init, ShortServerDepositRefunds) {
  Session s;
  ServerInitOptions sopts;
  sopts.deposit_override = 5;
  s.init({}, sopts);
  EXPECT_TRUE(refund_applies(s.ledger.contract(s.id())));
  s.to(TimeLabel::kT2);
  auto p = payout_refund(s.ledger, S, s.id());
  EXPECT_EQ(p.client, 21u);
  EXPECT_EQ(p.server, 5u);
  EXPECT_EQ(s.ledger.total_supply(), 2000u);
}

TEST(Flow, HonestSession) {
  Session s;
  s.init();
  for (std::uint32_t j = 1; j <= 3; ++j) {
    auto [sc, cc] = s.cycle(j);
    EXPECT_FALSE(sc);
    EXPECT_FALSE(cc);
  }
  auto up = s.resolve({}, {});
  EXPECT_EQ(up.counters, Counters{});
  auto p = s.pay();
  EXPECT_EQ(p.client, 6u);
  EXPECT_EQ(p.server, 21u);
  EXPECT_EQ(p.arbiter, 0u);
  EXPECT_EQ(s.ledger.balance(C), 1000u - 21 + 6);
  EXPECT_EQ(s.ledger.balance(S), 1000u - 6 + 21);
  EXPECT_EQ(code_of([&] { s.pay(); }), ErrorCode::kNonMonotonicTime);
}

TEST(Flow, CorruptBlockChargesServer) {
  Session s;
  s.init();
  s.cycle(1);
  ServerProveOptions bad;
  bad.corrupt_entry = 3;
  auto [sc, cc] = s.cycle(2, wire::QueryForm::kValid, bad);
  ASSERT_TRUE(cc);
  EXPECT_EQ(*cc, (ClientComplaint{2, 3}));
  s.cycle(3);
  auto up = s.resolve({}, {*cc});
  EXPECT_EQ(up.counters, (Counters{0, 0, 1, 0}));
  ASSERT_EQ(up.outcomes.size(), 1u);
  EXPECT_EQ(up.outcomes[0].identified, Party::kServer);
  auto p = s.pay();
  EXPECT_EQ(p.client, 11u);
  EXPECT_EQ(p.server, 14u);
  EXPECT_EQ(p.arbiter, 2u);
}

TEST(Flow, InvalidQueryChargesClientAndDropsItsComplaint) {
  Session s;
  s.init();
  auto [sc, cc] = s.cycle(1, wire::QueryForm::kTruncated);
  ASSERT_TRUE(sc);
  EXPECT_EQ(sc->j, 1u);
  ASSERT_TRUE(cc);  // the dummy proof fails to verify
  s.cycle(2);
  s.cycle(3);
  auto up = s.resolve({*sc, *sc, {9}}, {*cc});
  EXPECT_EQ(up.counters, (Counters{1, 0, 0, 0}));
  std::vector<std::string> statuses;
  for (const auto& o : up.outcomes) statuses.push_back(o.status);
  EXPECT_EQ(statuses, (std::vector<std::string>{"admitted", "duplicate", "out_of_range", "in_v"}));
  auto p = s.pay();
  EXPECT_EQ(p.client, 4u);
  EXPECT_EQ(p.server, 21u);
  EXPECT_EQ(p.arbiter, 2u);
}

TEST(Flow, FalseComplaintsChargeTheirAuthors) {
  Session s;
  s.init();
  ServerProveOptions fq;
  fq.false_complaint = true;
  auto [sc, cc] = s.cycle(1, wire::QueryForm::kValid, fq);
  ASSERT_TRUE(sc);
  EXPECT_FALSE(cc);
  s.cycle(2);
  s.cycle(3);
  auto up = s.resolve({*sc}, {{3, 2}});
  EXPECT_EQ(up.counters, (Counters{0, 1, 0, 1}));
  auto p = s.pay();
  EXPECT_EQ(p.client, 4u);
  EXPECT_EQ(p.server, 19u);
  EXPECT_EQ(p.arbiter, 4u);
}

TEST(Flow, SameCycleFalseComplaintsBothCount) {
  Session s;
  s.init();
  ServerProveOptions fq;
  fq.false_complaint = true;
  auto [sc, cc] = s.cycle(1, wire::QueryForm::kValid, fq);
  s.cycle(2);
  s.cycle(3);
  auto up = s.resolve({*sc}, {{1, 1}});
  EXPECT_EQ(up.counters, (Counters{0, 1, 0, 1}));
  EXPECT_EQ(up.attribution.at(1).size(), 2u);
}

TEST(Flow, BadOpeningDiscardsComplaints) {
  Session s;
  s.init();
  ServerProveOptions fq;
  fq.false_complaint = true;
  auto [sc, cc] = s.cycle(1, wire::QueryForm::kValid, fq);
  s.to(TimeLabel::kK2);
  auto forged = s.si->server.t_qp.opening;
  forged.statement.back() ^= 1;
  auto sp = arbiter_resolve_server(s.ledger, s.id(), {*sc}, forged);
  EXPECT_FALSE(sp.opening_valid);
  EXPECT_EQ(sp.update.counters, Counters{});
  ASSERT_EQ(sp.update.outcomes.size(), 1u);
  EXPECT_EQ(sp.update.outcomes[0].status, "bad_opening");
}

TEST(Flow, CpOpeningMustMatch) {
  Session s(Variant::kArbiter, 1);
  s.init();
  s.cycle(1);
  s.resolve({}, {});
  s.to(TimeLabel::kL);
  auto forged = s.ci->client.t_cp.opening;
  forged.randomness[0] ^= 1;
  EXPECT_EQ(code_of([&] { payout_arbiter_variant(s.ledger, C, s.id(), forged); }), ErrorCode::kBadOpening);
  EXPECT_FALSE(s.ledger.contract(s.id()).paid_out);
}

TEST(Flow, MissingQueryGetsDummy) {
  Session s;
  s.init();
  s.to(TimeLabel::kG2, 1);
  EXPECT_EQ(code_of([&] { server_prove(s.ledger, s.si->server, 1, s.rng); }), ErrorCode::kMissingQuery);
  auto r = server_reject(s.ledger, s.si->server, 1, s.rng);
  EXPECT_FALSE(r.b);
  ASSERT_TRUE(r.complaint);
  EXPECT_EQ(r.posted.size(), s.ci->client.qp.layout().wire_len());
}

TEST(Arbiterless, ContractResolution) {
  Session s(Variant::kArbiterless);
  s.init();
  ServerProveOptions bad;
  bad.corrupt_entry = 1;
  auto [sc1, cc1] = s.cycle(1, wire::QueryForm::kTruncated);
  auto [sc2, cc2] = s.cycle(2, wire::QueryForm::kValid, bad);
  auto [sc3, cc3] = s.cycle(3);
  ASSERT_TRUE(sc1 && cc1 && cc2);
  s.to(TimeLabel::kK1);
  post_server_complaints(s.ledger, S, s.id(), {*sc1}, s.si->server.t_qp.opening);
  s.to(TimeLabel::kK4);
  post_client_complaints(s.ledger, C, s.id(), {*cc1, *cc2, {3, 1}}, s.ci->client.t_qp.opening);
  s.to(TimeLabel::kK6);
  auto up = contract_resolve(s.ledger, s.id());
  EXPECT_EQ(up.counters, (Counters{1, 0, 1, 0}));
  auto p = s.pay();
  EXPECT_FALSE(p.arbiter);
  // C = 21 - 5*2 + 2*(1-1), S = 6 + 10 - 0
  EXPECT_EQ(p.client, 11u);
  EXPECT_EQ(p.server, 16u);
}

TEST(Payout, ArbiterFormulas) {
  auto cp = cp_535();
  auto p = arbiter_amounts(cp, 21, 6, {});
  EXPECT_EQ((std::tuple{p.client, p.server, *p.arbiter}), Triple(6u, 21u, 0u));
  p = arbiter_amounts(cp, 21, 6, {0, 0, 1, 0});
  EXPECT_EQ((std::tuple{p.client, p.server, *p.arbiter}), Triple(11u, 14u, 2u));
  p = arbiter_amounts(cp, 21, 6, {0, 1, 0, 0});
  EXPECT_EQ((std::tuple{p.client, p.server, *p.arbiter}), Triple(4u, 21u, 2u));
  p = arbiter_amounts(cp, 21, 6, {0, 0, 3, 0});
  EXPECT_EQ((std::tuple{p.client, p.server, *p.arbiter}), Triple(21u, 0u, 6u));
  EXPECT_EQ(code_of([&] { arbiter_amounts(cp, 21, 6, {0, 0, 4, 0}); }), ErrorCode::kCounterOutOfBounds);
}

TEST(Payout, ArbiterlessFormulas) {
  auto cp = cp_535();
  auto p = arbiterless_amounts(cp, 21, 6, {});
  EXPECT_EQ((std::pair{p.client, p.server}), Duo(6u, 21u));
  EXPECT_FALSE(p.arbiter);
  p = arbiterless_amounts(cp, 21, 6, {0, 0, 1, 0});
  EXPECT_EQ((std::pair{p.client, p.server}), Duo(13u, 14u));
  p = arbiterless_amounts(cp, 21, 6, {1, 0, 0, 0});
  EXPECT_EQ((std::pair{p.client, p.server}), Duo(4u, 23u));
  p = arbiterless_amounts({7, 7, 2, 2, 1}, 9, 2, {1, 0, 0, 0});
  EXPECT_EQ((std::pair{p.client, p.server}), Duo(0u, 11u));
}
