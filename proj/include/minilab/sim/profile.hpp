#pragma once

#include <map>
#include <string>

#include "minilab/core/json.hpp"
#include "minilab/time.hpp"

namespace minilab::sim {

struct LatencyRange {
  Duration min{0};
  Duration max{0};

  bool operator==(const LatencyRange&) const = default;
};

// Conditional behaviour of one recipient population. Click, reply and
// unsubscribe are only drawn after an open; their latencies count from the
// open. Unsubscribe reuses the click latency.
struct BehaviorProfile {
  double p_open = 0.0;
  double p_click_given_open = 0.0;
  double p_reply_given_open = 0.0;
  double p_unsub_given_open = 0.01;
  LatencyRange open_latency{Duration{600}, Duration{48 * 3600}};
  LatencyRange click_latency{Duration{30}, Duration{4 * 3600}};
  LatencyRange reply_latency{Duration{1800}, Duration{72 * 3600}};

  bool operator==(const BehaviorProfile&) const = default;
};

using ProfileMap = std::map<std::string, BehaviorProfile>;

// INVALID_PROFILE when a probability is outside [0, 1] or a latency range is
// inverted or negative.
void validate_profile(const BehaviorProfile& p, const std::string& name = {});

// From unconditional rates in percent: p_open = open/100,
// p_click_given_open = ctr/open, p_reply_given_open = reply/open.
// INVALID_PROFILE when a conditional would exceed 1.
BehaviorProfile calibrate_from_rates(double open_pct, double ctr_pct, double reply_pct,
                                     double p_unsub_given_open = 0.01);

void to_json(Json& j, const BehaviorProfile& p);

// Either explicit conditionals, or {"calibrate": {"open_rate", "ctr",
// "response_rate"}} in percent. Latency objects use min_s/max_s.
BehaviorProfile profile_from_json(const Json& j, const std::string& name);

ProfileMap parse_profiles(const Json& j);
ProfileMap load_profiles(const std::string& path);

}  // namespace minilab::sim
