#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minilab/engine/state.hpp"
#include "minilab/gateway/gateway.hpp"
#include "minilab/metrics/kpi.hpp"
#include "minilab/sim/profile.hpp"

namespace minilab::sim {

// RNG stream for one (seed, lead, message). Adding leads or messages never
// shifts another stream.
std::uint64_t stream_key(std::uint64_t seed, const std::string& lead_id, const std::string& message_id);

struct MessageDraws {
  bool opened = false;
  bool clicked = false;
  bool replied = false;
  bool unsubscribed = false;
};

// delivered at send time, then open/click/reply/unsubscribe as drawn, sorted
// by timestamp. A fixed number of draws is consumed regardless of outcome.
std::vector<EngagementEvent> simulate_message(const Lead& lead, const MessageRecord& message,
                                              const BehaviorProfile& profile, std::uint64_t seed,
                                              MessageDraws* draws = nullptr);

inline const std::string kCannedReply =
    "Thanks for reaching out. This sounds relevant; can you share a bit more detail?";

struct SimCounters {
  std::int64_t delivered = 0;
  std::int64_t opens = 0;
  std::int64_t clicks = 0;
  std::int64_t replies = 0;
  std::int64_t unsubscribes = 0;

  void add(const MessageDraws& d);
  bool operator==(const SimCounters&) const = default;
};

struct ExperimentOptions {
  Instant start = at_seconds(1735689600);  // 2025-01-01T00:00:00Z
  std::string lead_prefix = "lead-";
  std::size_t max_iterations = 10'000'000;
  bool keep_log = false;
};

struct ArmOutcome {
  std::string arm_id;
  std::string backend;
  std::size_t leads = 0;
  SimCounters counters;
  std::optional<metrics::KpiReport> kpi;  // absent when the arm delivered nothing
  Money cost;
  std::optional<Money> mean_cost_per_lead;
};

struct ExperimentResult {
  std::vector<ArmOutcome> arms;  // spec order
  SimCounters counters;
  metrics::KpiReport overall;
  Money total_cost;  // leads plus campaign templates
  std::optional<Money> mean_cost_per_lead;
  std::vector<EngagementEvent> events;  // every emitted event, emission order
  std::size_t steps_sent = 0;
  std::size_t replies_sent = 0;
  std::size_t failed_leads = 0;
  std::size_t iterations = 0;
  Instant finished_at{};
  engine::CampaignState state;
  std::vector<Json> log;  // only with keep_log
};

// Picks a profile per arm: the arm's own id in `profiles` first, then
// `fallback` by name. MISSING_PROFILE otherwise.
ProfileMap resolve_arm_profiles(const CampaignSpec& spec, const ProfileMap& profiles,
                                const std::optional<std::string>& fallback = std::nullopt);

// Adds n synthetic leads, then alternates event ingestion and ticks in
// simulated time until no action or event remains. Only sequence steps are
// simulated; agent replies are sent but draw no engagement.
// Errors: MISSING_PROFILE, NO_DELIVERIES (nothing delivered, e.g. n = 0),
// SIMULATION_STALLED.
ExperimentResult run_experiment(const CampaignSpec& spec, std::size_t n_leads, const ProfileMap& arm_profiles,
                                std::uint64_t seed, ChatClient& client, const PriceTable& prices,
                                const ExperimentOptions& opts = {});

Lead synthetic_lead(const std::string& prefix, std::size_t index);

}  // namespace minilab::sim
