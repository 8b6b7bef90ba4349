#include <gtest/gtest.h>

#include <chrono>

#include "minilab/core/json.hpp"
#include "minilab/metrics/kpi.hpp"
#include "minilab/sim/profile.hpp"
#include "minilab/sim/simulator.hpp"
#include "support/fakes.hpp"

using namespace minilab;
using namespace minilab::sim;
using testing_support::data_path;
using testing_support::error_code_of;
using testing_support::FakeClient;
using testing_support::make_spec;

namespace {

MessageRecord outbound(const std::string& id, std::int64_t t) {
  MessageRecord m;
  m.id = id;
  m.direction = Direction::outbound;
  m.timestamp = at_seconds(t);
  m.step_index = 0;
  return m;
}

BehaviorProfile profile(double open, double click, double reply, double unsub) {
  BehaviorProfile p;
  p.p_open = open;
  p.p_click_given_open = click;
  p.p_reply_given_open = reply;
  p.p_unsub_given_open = unsub;
  return p;
}

Lead who(const std::string& id) {
  Lead l;
  l.id = id;
  return l;
}

std::vector<EventKind> kinds(const std::vector<EngagementEvent>& evs) {
  std::vector<EventKind> out;
  for (const auto& e : evs) out.push_back(e.kind);
  return out;
}

CampaignSpec default_spec() { return json_util::load_file(data_path("campaigns/default.json")).get<CampaignSpec>(); }

PriceTable zero_prices(const CampaignSpec& spec) {
  PriceTable p;
  for (const auto& a : spec.variant_arms) p[a.backend_name] = make_price("0", "0");
  return p;
}

}  // namespace

TEST(SimMessage, AllZeroProfileOnlyDelivers) {
  for (int i = 0; i < 200; ++i) {
    const auto evs = simulate_message(who("l" + std::to_string(i)), outbound("m", 100), profile(0, 0, 0, 0), 7);
    ASSERT_EQ(evs.size(), 1u);
    EXPECT_EQ(evs[0].kind, EventKind::delivered);
    EXPECT_EQ(evs[0].timestamp, at_seconds(100));
  }
}

TEST(SimMessage, ForcedOpenAndReply) {
  for (int i = 0; i < 200; ++i) {
    const auto evs = simulate_message(who("l" + std::to_string(i)), outbound("m", 100), profile(1, 0, 1, 0), 7);
    ASSERT_EQ(kinds(evs), (std::vector<EventKind>{EventKind::delivered, EventKind::open, EventKind::reply}));
    EXPECT_LE(evs[0].timestamp, evs[1].timestamp);
    EXPECT_LE(evs[1].timestamp, evs[2].timestamp);
    EXPECT_EQ(evs[2].body, kCannedReply);
    const BehaviorProfile p;
    EXPECT_GE(evs[1].timestamp - evs[0].timestamp, p.open_latency.min);
    EXPECT_LE(evs[1].timestamp - evs[0].timestamp, p.open_latency.max);
  }
}

TEST(SimMessage, RejectsInbound) {
  auto m = outbound("m", 0);
  m.direction = Direction::inbound;
  EXPECT_EQ(error_code_of([&] { simulate_message(who("l"), m, profile(1, 1, 1, 1), 1); }), "INVALID_MESSAGE");
}

TEST(SimMessage, OpenRateWithinBinomialBound) {
  const auto p = profile(0.35, 0.10, 0.18, 0.02);
  std::int64_t opens = 0;
  for (int i = 0; i < 10000; ++i) {
    MessageDraws d;
    simulate_message(who("lead-" + std::to_string(i)), outbound("m" + std::to_string(i), 0), p, 42, &d);
    opens += d.opened;
  }
  EXPECT_NEAR(100.0 * double(opens) / 10000.0, 35.0, 1.5);
}

TEST(SimMessage, StreamsAreIndependentAndDeterministic) {
  const auto p = profile(0.5, 0.5, 0.5, 0.5);
  const Lead a = who("alice");
  const auto first = simulate_message(a, outbound("x", 0), p, 9);
  EXPECT_EQ(simulate_message(a, outbound("x", 0), p, 9), first);
  EXPECT_NE(stream_key(9, "alice", "x"), stream_key(9, "bob", "x"));
  EXPECT_NE(stream_key(9, "alice", "x"), stream_key(10, "alice", "x"));
  EXPECT_NE(stream_key(9, "alice", "x"), stream_key(9, "alice", "y"));
}

TEST(SimMessage, ConditionalStructureHolds) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 3000; ++i) {
    const auto p = profile(u(rng), u(rng), u(rng), u(rng));
    MessageDraws d;
    const auto evs = simulate_message(who("l" + std::to_string(i)), outbound("m", 1000), p, rng(), &d);
    bool opened = false;
    ASSERT_EQ(evs.front().kind, EventKind::delivered);
    for (std::size_t k = 1; k < evs.size(); ++k) {
      ASSERT_LE(evs[k - 1].timestamp, evs[k].timestamp);
      if (evs[k].kind == EventKind::open) opened = true;
      if (evs[k].kind == EventKind::click || evs[k].kind == EventKind::reply || evs[k].kind == EventKind::unsubscribe) {
        ASSERT_TRUE(opened) << "engagement without a prior open";
      }
    }
    ASSERT_EQ(d.opened, opened);
    if (!d.opened) {
      ASSERT_FALSE(d.clicked || d.replied || d.unsubscribed);
    }
  }
}

TEST(SimProfile, CalibrationFromRates) {
  const auto p = calibrate_from_rates(33.2, 3.2, 5.7);
  EXPECT_NEAR(p.p_open, 0.332, 1e-15);
  EXPECT_NEAR(p.p_click_given_open, 0.032 / 0.332, 1e-12);
  EXPECT_NEAR(p.p_click_given_open, 0.0964, 1e-4);
  EXPECT_NEAR(p.p_reply_given_open, 0.1717, 1e-4);
  EXPECT_EQ(p.p_unsub_given_open, 0.01);
  EXPECT_EQ(error_code_of([] { calibrate_from_rates(5, 6, 1); }), "INVALID_PROFILE");
  EXPECT_EQ(error_code_of([] { validate_profile(profile(1.2, 0, 0, 0)); }), "INVALID_PROFILE");
}

TEST(SimProfile, BundledProfilesLoad) {
  const auto profiles = load_profiles(data_path("profiles/table1.json"));
  ASSERT_TRUE(profiles.count("table1-gpt4o"));
  ASSERT_TRUE(profiles.count("table1-gemma12b-lora"));
  EXPECT_NEAR(profiles.at("table1-gpt4o").p_open, 0.332, 1e-12);
  for (const auto& [name, p] : profiles) EXPECT_NO_THROW(validate_profile(p, name));
  const Json j = profiles.at("table1-gpt4o");
  EXPECT_EQ(profile_from_json(j, "x"), profiles.at("table1-gpt4o"));
}

TEST(SimProfile, ArmResolution) {
  const auto spec = make_spec();
  ProfileMap pm{{"A", profile(0.1, 0, 0, 0)}, {"fallback", profile(0.2, 0, 0, 0)}};
  const auto resolved = resolve_arm_profiles(spec, pm, std::string("fallback"));
  EXPECT_EQ(resolved.at("A").p_open, 0.1);
  EXPECT_EQ(resolved.at("B").p_open, 0.2);
  EXPECT_EQ(error_code_of([&] { resolve_arm_profiles(spec, pm); }), "MISSING_PROFILE");
}

TEST(SimExperiment, NoLeadsNoDeliveries) {
  FakeClient client;
  const auto spec = make_spec();
  const ProfileMap pm{{"A", profile(0.3, 0, 0, 0)}, {"B", profile(0.3, 0, 0, 0)}};
  EXPECT_EQ(error_code_of([&] { run_experiment(spec, 0, pm, 1, client, zero_prices(spec)); }), "NO_DELIVERIES");
  EXPECT_EQ(error_code_of([&] { run_experiment(spec, 5, {{"A", profile(0.3, 0, 0, 0)}}, 1, client, zero_prices(spec)); }),
            "MISSING_PROFILE");
}

TEST(SimExperiment, IdenticalArmsAgree) {
  FakeClient client;
  const auto spec = make_spec();
  const auto p = calibrate_from_rates(33.2, 3.2, 5.7);
  const auto r = run_experiment(spec, 2000, {{"A", p}, {"B", p}}, 42, client, zero_prices(spec));
  ASSERT_EQ(r.arms.size(), 2u);
  ASSERT_TRUE(r.arms[0].kpi && r.arms[1].kpi);
  EXPECT_LT(std::abs(r.arms[0].kpi->open_rate - r.arms[1].kpi->open_rate), 3.0);
  EXPECT_EQ(r.arms[0].leads + r.arms[1].leads, 2000u);
}

TEST(SimExperiment, CalibratedToGpt4oRow) {
  FakeClient client;
  const auto spec = default_spec();
  const auto profiles = resolve_arm_profiles(spec, load_profiles(data_path("profiles/table1.json")),
                                             std::string("table1-gpt4o"));
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment(spec, 2000, profiles, 42, client, zero_prices(spec));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_NEAR(r.overall.open_rate, 33.2, 2.5);
  EXPECT_NEAR(r.overall.ctr, 3.2, 1.0);
  EXPECT_LT(secs, 60.0);
}

TEST(SimExperiment, DeterministicAndKpiConsistent) {
  const auto spec = make_spec({0, 3600, 7200});
  const auto p = profile(0.4, 0.2, 0.3, 0.05);
  ExperimentOptions opts;
  opts.keep_log = true;
  FakeClient c1, c2;
  const auto a = run_experiment(spec, 300, {{"A", p}, {"B", p}}, 77, c1, zero_prices(spec), opts);
  const auto b = run_experiment(spec, 300, {{"A", p}, {"B", p}}, 77, c2, zero_prices(spec), opts);
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(a.state, b.state);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) ASSERT_EQ(a.log[i].dump(), b.log[i].dump());

  // Different seed, different events.
  FakeClient c3;
  EXPECT_NE(run_experiment(spec, 300, {{"A", p}, {"B", p}}, 78, c3, zero_prices(spec)).events, a.events);

  // KPIs over the emitted events equal the internal counters.
  const auto k = metrics::kpi_rates(a.events);
  EXPECT_EQ(k.delivered, a.counters.delivered);
  EXPECT_EQ(k.opens, a.counters.opens);
  EXPECT_EQ(k.clicks, a.counters.clicks);
  EXPECT_EQ(k.replies, a.counters.replies);
  EXPECT_EQ(k.unsubscribes, a.counters.unsubscribes);
  EXPECT_EQ(k, a.overall);
  EXPECT_EQ(a.overall, metrics::kpi_rates(engine::all_events(a.state)));
  EXPECT_EQ(engine::replay(a.log), a.state);
  EXPECT_EQ(a.failed_leads, 0u);
}

TEST(SimExperiment, LeadStreamsDoNotShiftWhenLeadsAreAdded) {
  const auto spec = make_spec({0}, {{"A", 1.0}});
  const auto p = profile(0.5, 0.3, 0.3, 0.1);
  FakeClient c1, c2;
  const auto small = run_experiment(spec, 50, {{"A", p}}, 5, c1, zero_prices(spec));
  const auto big = run_experiment(spec, 80, {{"A", p}}, 5, c2, zero_prices(spec));
  for (const auto& [id, ls] : small.state.leads) {
    EXPECT_EQ(ls.events, big.state.leads.at(id).events) << id;
  }
}

TEST(SimExperiment, CostsComeFromUsage) {
  FakeClient client;
  const auto spec = make_spec({0, 60});
  const PriceTable prices{{"backend-A", make_price("1", "1")}, {"backend-B", make_price("2", "2")}};
  const auto p = profile(0.3, 0.1, 0.2, 0.0);
  const auto r = run_experiment(spec, 40, {{"A", p}, {"B", p}}, 3, client, prices);
  const auto costs = engine::campaign_costs(r.state, prices);
  EXPECT_EQ(r.total_cost, costs.total);
  EXPECT_EQ(r.arms[0].cost, costs.per_arm.at("A"));
  EXPECT_GT(r.total_cost.units(), 0);
}
