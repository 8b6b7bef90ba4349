#include <gtest/gtest.h>

#include <map>
#include <random>

#include "minilab/core/json.hpp"
#include "minilab/core/validate.hpp"
#include "support/fakes.hpp"

using namespace minilab;
using testing_support::make_spec;

namespace {

std::vector<std::string> codes(const ValidationReport& r) {
  std::vector<std::string> out;
  for (const auto& v : r) out.push_back(v.code);
  return out;
}

template <typename T>
T round_trip(const T& v) {
  const Json j = v;
  return Json::parse(j.dump()).get<T>();
}

}  // namespace

TEST(Time, Rfc3339RoundTrip) {
  EXPECT_EQ(to_rfc3339(at_seconds(0)), "1970-01-01T00:00:00Z");
  EXPECT_EQ(to_rfc3339(at_seconds(1735689600)), "2025-01-01T00:00:00Z");
  for (std::int64_t s : {0LL, 86399LL, 951782400LL, 1735689600LL, 4102444799LL}) {
    EXPECT_EQ(to_seconds(parse_rfc3339(to_rfc3339(at_seconds(s)))), s);
  }
  EXPECT_EQ(testing_support::error_code_of([] { parse_rfc3339("yesterday"); }), "PARSE_ERROR");
}

TEST(ValidateSpec, CanonicalFourStepSpecIsValid) {
  EXPECT_TRUE(validate_campaign_spec(make_spec()).empty());
}

TEST(ValidateSpec, EmptySequence) {
  auto s = make_spec();
  s.steps.clear();
  EXPECT_EQ(codes(validate_campaign_spec(s)), std::vector<std::string>{"EMPTY_SEQUENCE"});
}

TEST(ValidateSpec, ArmWeightSum) {
  auto s = make_spec({0}, {{"A", 0.6}, {"B", 0.6}});
  EXPECT_EQ(codes(validate_campaign_spec(s)), std::vector<std::string>{"ARM_WEIGHT_SUM"});
}

TEST(ValidateSpec, WeightSumToleranceIs1e9) {
  auto s = make_spec({0}, {{"A", 0.5 + 4e-10}, {"B", 0.5}});
  EXPECT_TRUE(validate_campaign_spec(s).empty());
  s.variant_arms[0].weight = 0.5 + 2e-9;
  EXPECT_EQ(codes(validate_campaign_spec(s)), std::vector<std::string>{"ARM_WEIGHT_SUM"});
}

TEST(ValidateSpec, ReportsEveryViolation) {
  auto s = make_spec({0, -5}, {{"A", 0.5}, {"A", 0.5}});
  s.steps[1].index = 3;
  const auto c = codes(validate_campaign_spec(s));
  EXPECT_NE(std::find(c.begin(), c.end(), "STEP_INDEX_GAP"), c.end());
  EXPECT_NE(std::find(c.begin(), c.end(), "NEGATIVE_DELAY"), c.end());
  EXPECT_NE(std::find(c.begin(), c.end(), "DUPLICATE_ARM"), c.end());
}

TEST(ValidateSpec, RequireValidThrowsFirstCode) {
  auto s = make_spec();
  s.steps.clear();
  EXPECT_EQ(testing_support::error_code_of([&] { require_valid(s); }), "EMPTY_SEQUENCE");
}

TEST(AssignArm, SingleArmAlwaysWins) {
  const std::vector<VariantArm> arms{{"only", "b", 1.0}};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(assign_arm("lead-" + std::to_string(i), arms, 99), "only");
}

TEST(AssignArm, EvenSplitWithinOnePointFive) {
  const auto spec = make_spec();
  std::map<std::string, int> n;
  for (int i = 0; i < 10000; ++i) ++n[assign_arm("lead-" + std::to_string(i), spec.variant_arms, 7)];
  EXPECT_NEAR(100.0 * n["A"] / 10000.0, 50.0, 1.5);
  EXPECT_NEAR(100.0 * n["B"] / 10000.0, 50.0, 1.5);
}

TEST(AssignArm, RepeatableAndOrderIndependent) {
  const auto spec = make_spec({0}, {{"A", 0.2}, {"B", 0.3}, {"C", 0.5}});
  const std::string first = assign_arm("lead-42", spec.variant_arms, 5);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(assign_arm("lead-42", spec.variant_arms, 5), first);
  // Assigning other leads in between changes nothing.
  for (int i = 0; i < 50; ++i) assign_arm("x" + std::to_string(i), spec.variant_arms, 5);
  EXPECT_EQ(assign_arm("lead-42", spec.variant_arms, 5), first);
}

TEST(AssignArm, FollowsUnevenWeights) {
  const auto spec = make_spec({0}, {{"A", 0.2}, {"B", 0.8}});
  int a = 0;
  for (int i = 0; i < 20000; ++i) a += assign_arm("l" + std::to_string(i), spec.variant_arms, 1) == "A";
  EXPECT_NEAR(100.0 * a / 20000.0, 20.0, 1.0);
}

TEST(AssignArm, EmptyArmsIsAnError) {
  EXPECT_EQ(testing_support::error_code_of([] { assign_arm("x", {}, 0); }), "NO_ARMS");
}

TEST(Serialization, SpecRoundTrip) {
  auto s = make_spec();
  s.research_sources = {"https://example.com/{company}"};
  s.assignment_seed = 0xfeedfacecafebeefULL;
  EXPECT_EQ(round_trip(s), s);
  const Json j = s;
  EXPECT_EQ(j.at("steps").at(1).at("delay").get<std::int64_t>(), 3 * 86400);
  EXPECT_EQ(j.at("steps").at(2).at("channel"), "linkedin");
}

TEST(Serialization, MessageEventLeadMemoryRoundTrip) {
  MessageRecord m;
  m.id = "lead-1:s0";
  m.step_index = 0;
  m.subject = "Hi";
  m.body = "Body with \"quotes\" and\nnewlines";
  m.timestamp = at_seconds(1234);
  m.model_backend = "gpt-4o";
  m.usage = UsageRecord{10, 20, "gpt-4o", at_seconds(1234)};
  EXPECT_EQ(round_trip(m), m);

  MessageRecord inbound;
  inbound.id = "lead-1:in0";
  inbound.direction = Direction::inbound;
  inbound.body = "Sure";
  EXPECT_EQ(round_trip(inbound), inbound);

  EngagementEvent e{"lead-1", EventKind::reply, at_seconds(99), "lead-1:s0", std::string("yes")};
  EXPECT_EQ(round_trip(e), e);

  Lead l = testing_support::make_lead("lead-1", "A");
  EXPECT_EQ(round_trip(l), l);

  AgentMemory mem;
  mem.lead_id = "lead-1";
  mem.history = {m};
  mem.inbound = {inbound};
  mem.research_dossier = ResearchDossier{"lead-1", "summary", {{"file:///x", at_seconds(5), "text"}}, "b", {1, 2, "b", {}}};
  EXPECT_EQ(round_trip(mem), mem);
}

TEST(Serialization, RandomSpecsRoundTrip) {
  std::mt19937_64 rng(11);
  auto text = [&](std::size_t n) {
    std::string s;
    static const std::vector<std::string> alphabet{" ", "a", "b", "X", "\n", "\t", "\"", "\\", "é", "漢"};
    for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  for (int t = 0; t < 200; ++t) {
    CampaignSpec s;
    s.id = "c" + std::to_string(t);
    s.name = text(rng() % 20);
    s.value_proposition = text(rng() % 40);
    for (std::size_t i = 0, n = rng() % 4; i < n; ++i) s.pain_points.push_back(text(rng() % 10));
    const std::size_t steps = 1 + rng() % 6;
    for (std::size_t i = 0; i < steps; ++i) {
      s.steps.push_back({i, rng() % 2 ? Channel::email : Channel::linkedin,
                         Duration{static_cast<std::int64_t>(rng() % 1000000)}, text(rng() % 30)});
    }
    s.variant_arms.push_back({"A", "b1", 0.25});
    s.variant_arms.push_back({"B", "b2", 0.75});
    s.assignment_seed = rng();
    ASSERT_EQ(round_trip(s), s);
  }
}

TEST(Serialization, UnknownEnumIsParseError) {
  Json j = EngagementEvent{"l", EventKind::open, at_seconds(0), "m", std::nullopt};
  j["kind"] = "bounce";
  EXPECT_THROW(j.get<EngagementEvent>(), std::exception);
}
