#include <gtest/gtest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "rcpor/error.hpp"
#include "rcpor/scenario.hpp"

using namespace rcpor;
using namespace rcpor::scenario;
using json = nlohmann::json;

namespace {

using Triple = std::tuple<ledger::Coin, ledger::Coin, ledger::Coin>;
using Duo = std::pair<ledger::Coin, ledger::Coin>;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioSpec honest() { return ScenarioSpec::parse(read_file(RCPOR_TEST_DATA "/honest.json")); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

json run_json(const ScenarioSpec& s) { return json::parse(run(s).report); }

}  // namespace

TEST(Spec, ParsesAndRoundTrips) {
  auto s = honest();
  EXPECT_EQ(s.z, 3u);
  EXPECT_EQ(s.phi, 16u);
  EXPECT_EQ(s.seed, 1u);
  EXPECT_EQ(s.file_size, 4096u);
  auto back = ScenarioSpec::parse(s.to_json());
  EXPECT_EQ(back.to_json(), s.to_json());
}

TEST(Spec, RejectsBadInput) {
  auto bad = [](const std::string& text) { return code_of([&] { ScenarioSpec::parse(text).validate(); }); };
  EXPECT_EQ(bad("not json"), ErrorCode::kSpecInvalid);
  EXPECT_EQ(bad(R"({"session":{"z":1,"price_list":[{"o":1,"l":1}],"choice":{"o":1,"l":1}}})"),
            ErrorCode::kSpecInvalid);  // no file
  EXPECT_EQ(bad(R"({"session":{"z":1,"price_list":[{"o":1,"l":1}],"choice":{"o":1,"l":1}},"file":{"size":64},
                   "colour":1})"),
            ErrorCode::kSpecInvalid);
  EXPECT_EQ(bad(R"({"session":{"z":0,"price_list":[{"o":1,"l":1}],"choice":{"o":1,"l":1}},"file":{"size":64}})"),
            ErrorCode::kSpecInvalid);
  EXPECT_EQ(bad(R"({"session":{"z":1,"price_list":[{"o":1,"l":1}],"choice":{"o":1,"l":1},"variant":"oracle"},
                   "file":{"size":64}})"),
            ErrorCode::kSpecInvalid);
  EXPECT_EQ(bad(R"({"session":{"z":1,"price_list":[{"o":1,"l":1}],"choice":{"o":1,"l":1}},"file":{"size":64},
                   "behaviors":{"server":[{"kind":"bribe","j":1}]}})"),
            ErrorCode::kSpecInvalid);
  EXPECT_EQ(bad(R"({"session":{"z":1,"price_list":[{"o":1,"l":1}],"choice":{"o":1,"l":1}},"file":{"size":64},
                   "behaviors":{"client":[{"kind":"invalid_query","j":2}]}})"),
            ErrorCode::kSpecInvalid);
  auto s = honest();
  s.phi = 100000;  // more than m
  EXPECT_EQ(code_of([&] { run(s); }), ErrorCode::kSpecInvalid);
}

TEST(Run, HonestIsValidAndDeterministic) {
  auto s = honest();
  auto a = run(s);
  auto b = run(s);
  EXPECT_TRUE(a.valid);
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.trace_jsonl, b.trace_jsonl);
  auto doc = json::parse(a.report);
  EXPECT_EQ(doc["status"], "VALID");
  EXPECT_EQ(doc["payout"]["actual"]["client"], 6);
  EXPECT_EQ(doc["payout"]["actual"]["server"], 21);
  EXPECT_EQ(doc["deltas"]["client"], -15);
  EXPECT_EQ(doc["deltas"]["server"], 15);
  s.seed = 2;
  EXPECT_NE(run(s).report, a.report);
}

TEST(Run, CorruptBlockArbiter) {
  auto s = honest();
  s.server.push_back({ServerBehavior::kCorruptBlock, 2, 4});
  auto doc = run_json(s);
  EXPECT_EQ(doc["status"], "VALID");
  EXPECT_EQ(doc["counters"]["y_s"], 1);
  EXPECT_EQ(doc["complaints"]["client"]["filed"][0], (json{{"j", 2}, {"g", 4}}));
  EXPECT_EQ(doc["payout"]["actual"], (json{{"client", 11}, {"server", 14}, {"arbiter", 2}}));
}

TEST(Run, WithheldProofCountsAgainstServer) {
  auto s = honest();
  s.server.push_back({ServerBehavior::kWithholdProof, 1, 1});
  auto doc = run_json(s);
  EXPECT_EQ(doc["status"], "VALID");
  EXPECT_EQ(doc["counters"]["y_s"], 1);
  EXPECT_EQ(doc["cycles"][0]["d_j"]["failing_index"], 1);
}

TEST(Run, ClientMisbehaviorBothVariants) {
  for (auto v : {Variant::kArbiter, Variant::kArbiterless}) {
    auto s = honest();
    s.variant = v;
    s.client.push_back({ClientBehavior::kInvalidQuery, 1});
    auto doc = run_json(s);
    EXPECT_EQ(doc["status"], "VALID");
    EXPECT_EQ(doc["counters"]["y_c"], 1);
    EXPECT_EQ(doc["payout"]["actual"]["client"], 4);

    s = honest();
    s.variant = v;
    s.client.push_back({ClientBehavior::kFalseAccusation, 3});
    doc = run_json(s);
    EXPECT_EQ(doc["status"], "VALID");
    EXPECT_EQ(doc["counters"]["y_c_prime"], v == Variant::kArbiter ? 1 : 0);
    EXPECT_EQ(doc["payout"]["actual"]["client"], v == Variant::kArbiter ? 4 : 6);
  }
}

TEST(Run, RefundPaths) {
  for (auto b : {0, 1}) {
    auto s = honest();
    if (b == 0) s.client.push_back({ClientBehavior::kIllFormedMetadata, 0});
    else s.server.push_back({ServerBehavior::kShortDeposit, 0, 1});
    auto doc = run_json(s);
    EXPECT_EQ(doc["status"], "VALID");
    EXPECT_EQ(doc["path"], "refund");
    EXPECT_EQ(doc["deltas"]["client"], 0);
    EXPECT_EQ(doc["deltas"]["server"], 0);
    EXPECT_TRUE(doc["cycles"].empty());
  }
}

TEST(Run, UnderfundedClientAborts) {
  auto s = honest();
  s.genesis = {{"client", 20}, {"server", 100}, {"arbiter", 0}};
  auto r = run(s);
  EXPECT_FALSE(r.valid);
  auto doc = json::parse(r.report);
  EXPECT_EQ(doc["status"], "INVALID");
  EXPECT_FALSE(doc["problems"].empty());
  EXPECT_FALSE(verify_report(r.report).valid);
}

TEST(Run, HonestHoldsAcrossSizes) {
  for (std::uint32_t z = 1; z <= 8; ++z)
    for (auto v : {Variant::kArbiter, Variant::kArbiterless}) {
      auto s = honest();
      s.z = z;
      s.variant = v;
      s.seed = 100 + z;
      auto doc = run_json(s);
      ASSERT_EQ(doc["status"], "VALID") << z;
      EXPECT_EQ(doc["deltas"]["client"], -5 * static_cast<int>(z));
      EXPECT_EQ(doc["deltas"]["server"], 5 * static_cast<int>(z));
    }
}

TEST(Expected, ClosedForms) {
  auto p = expected_payout(Variant::kArbiter, {}, 3, 5, 2, 21, 6);
  EXPECT_EQ((std::tuple{p.client, p.server, *p.arbiter}), Triple(6u, 21u, 0u));
  p = expected_payout(Variant::kArbiter, {0, 0, 1, 0}, 3, 5, 2, 21, 6);
  EXPECT_EQ((std::tuple{p.client, p.server, *p.arbiter}), Triple(11u, 14u, 2u));
  p = expected_payout(Variant::kArbiter, {0, 1, 0, 0}, 3, 5, 2, 21, 6);
  EXPECT_EQ((std::tuple{p.client, p.server, *p.arbiter}), Triple(4u, 21u, 2u));
  p = expected_payout(Variant::kArbiterless, {0, 0, 1, 0}, 3, 5, 2, 21, 6);
  EXPECT_EQ((std::pair{p.client, p.server}), Duo(13u, 14u));
  p = expected_payout(Variant::kArbiterless, {1, 0, 0, 0}, 3, 5, 2, 21, 6);
  EXPECT_EQ((std::pair{p.client, p.server}), Duo(4u, 23u));
  p = expected_payout(Variant::kArbiterless, {1, 0, 0, 0}, 1, 5, 2, 7, 2);
  EXPECT_EQ((std::pair{p.client, p.server}), Duo(0u, 9u));
  EXPECT_FALSE(p.arbiter);
  EXPECT_EQ(code_of([&] { expected_payout(Variant::kArbiter, {2, 2, 0, 0}, 3, 5, 2, 21, 6); }),
            ErrorCode::kCounterOutOfBounds);
}

TEST(Verify, AcceptsOwnReports) {
  auto r = run(honest());
  auto v = verify_report(r.report);
  EXPECT_TRUE(v.valid);
  EXPECT_TRUE(v.problems.empty());
}

TEST(Verify, DetectsTampering) {
  const auto doc = json::parse(run(honest()).report);
  auto expect_invalid = [](json d, const char* what) {
    auto v = verify_report(d.dump());
    EXPECT_FALSE(v.valid) << what;
    EXPECT_FALSE(v.problems.empty()) << what;
  };
  json d = doc;
  d["payout"]["actual"]["client"] = 7;
  expect_invalid(d, "actual payout");
  d = doc;
  d["counters"]["y_s"] = 1;
  expect_invalid(d, "counters");
  d = doc;
  d["conservation"]["supply_after"] = 1;
  expect_invalid(d, "supply");
  d = doc;
  d["balances"]["final"]["server"] = 0;
  expect_invalid(d, "final balance");
  d = doc;
  d["trace"].erase(1);
  expect_invalid(d, "trace gap");
  d = doc;
  d["status"] = "INVALID";
  expect_invalid(d, "status");
  d = doc;
  d.erase("payout");
  expect_invalid(d, "missing field");
  EXPECT_FALSE(verify_report("{").valid);
}
