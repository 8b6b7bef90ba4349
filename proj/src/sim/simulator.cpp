#include "minilab/sim/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <random>

#include "minilab/engine/campaign.hpp"
#include "minilab/error.hpp"
#include "minilab/hash.hpp"

namespace minilab::sim {

namespace {

class Stream {
 public:
  explicit Stream(std::uint64_t key) : rng_(key) {}
  double uniform() { return unit_interval(rng_()); }
  bool bernoulli(double p) { return uniform() < p; }
  Duration latency(const LatencyRange& r) {
    const auto span = static_cast<double>((r.max - r.min).count() + 1);
    auto offset = static_cast<std::int64_t>(uniform() * span);
    offset = std::min<std::int64_t>(offset, (r.max - r.min).count());
    return r.min + Duration{offset};
  }

 private:
  std::mt19937_64 rng_;
};

struct Queued {
  EngagementEvent event;
  std::uint64_t seq = 0;
};

struct Later {
  bool operator()(const Queued& a, const Queued& b) const {
    if (a.event.timestamp != b.event.timestamp) return a.event.timestamp > b.event.timestamp;
    return a.seq > b.seq;
  }
};

}  // namespace

std::uint64_t stream_key(std::uint64_t seed, const std::string& lead_id, const std::string& message_id) {
  return splitmix64(splitmix64(seed) ^ splitmix64(fnv1a64(lead_id) ^ splitmix64(fnv1a64(message_id))));
}

void SimCounters::add(const MessageDraws& d) {
  delivered += 1;
  opens += d.opened;
  clicks += d.clicked;
  replies += d.replied;
  unsubscribes += d.unsubscribed;
}

std::vector<EngagementEvent> simulate_message(const Lead& lead, const MessageRecord& message,
                                              const BehaviorProfile& profile, std::uint64_t seed,
                                              MessageDraws* draws) {
  if (message.direction != Direction::outbound) throw Error("INVALID_MESSAGE", "only outbound messages are simulated");
  Stream s(stream_key(seed, lead.id, message.id));
  // Draw order is fixed so every outcome consumes the same stream positions.
  const bool opened = s.bernoulli(profile.p_open);
  const Duration open_lat = s.latency(profile.open_latency);
  const bool clicked = s.bernoulli(profile.p_click_given_open);
  const Duration click_lat = s.latency(profile.click_latency);
  const bool replied = s.bernoulli(profile.p_reply_given_open);
  const Duration reply_lat = s.latency(profile.reply_latency);
  const bool unsub = s.bernoulli(profile.p_unsub_given_open);
  const Duration unsub_lat = s.latency(profile.click_latency);

  std::vector<EngagementEvent> out;
  auto emit = [&](EventKind k, Instant t) {
    EngagementEvent e;
    e.lead_id = lead.id;
    e.kind = k;
    e.timestamp = t;
    e.message_ref = message.id;
    if (k == EventKind::reply) e.body = kCannedReply;
    out.push_back(std::move(e));
  };
  emit(EventKind::delivered, message.timestamp);
  MessageDraws d;
  if (opened) {
    d.opened = true;
    const Instant t_open = message.timestamp + open_lat;
    emit(EventKind::open, t_open);
    if (clicked) {
      d.clicked = true;
      emit(EventKind::click, t_open + click_lat);
    }
    if (replied) {
      d.replied = true;
      emit(EventKind::reply, t_open + reply_lat);
    }
    if (unsub) {
      d.unsubscribed = true;
      emit(EventKind::unsubscribe, t_open + unsub_lat);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EngagementEvent& a, const EngagementEvent& b) { return a.timestamp < b.timestamp; });
  if (draws) *draws = d;
  return out;
}

ProfileMap resolve_arm_profiles(const CampaignSpec& spec, const ProfileMap& profiles,
                                const std::optional<std::string>& fallback) {
  ProfileMap out;
  for (const auto& arm : spec.variant_arms) {
    if (auto it = profiles.find(arm.arm_id); it != profiles.end()) {
      out[arm.arm_id] = it->second;
    } else if (fallback) {
      auto fb = profiles.find(*fallback);
      if (fb == profiles.end()) throw Error("MISSING_PROFILE", "no profile named '" + *fallback + "'");
      out[arm.arm_id] = fb->second;
    } else {
      throw Error("MISSING_PROFILE", "arm '" + arm.arm_id + "' has no behaviour profile");
    }
  }
  return out;
}

Lead synthetic_lead(const std::string& prefix, std::size_t index) {
  char num[32];
  std::snprintf(num, sizeof num, "%05zu", index);
  Lead l;
  l.id = prefix + num;
  l.profile = {{"name", "Lead " + std::to_string(index)},
               {"company", "Company " + std::to_string(index)},
               {"role", "Head of Growth"}};
  return l;
}

ExperimentResult run_experiment(const CampaignSpec& spec, std::size_t n_leads, const ProfileMap& arm_profiles,
                                std::uint64_t seed, ChatClient& client, const PriceTable& prices,
                                const ExperimentOptions& opts) {
  for (const auto& arm : spec.variant_arms) {
    auto it = arm_profiles.find(arm.arm_id);
    if (it == arm_profiles.end()) throw Error("MISSING_PROFILE", "arm '" + arm.arm_id + "' has no behaviour profile");
    validate_profile(it->second, arm.arm_id);
  }

  engine::CampaignOptions copts;
  copts.keep_log = opts.keep_log;
  auto campaign = engine::Campaign::create(spec, opts.start, client, copts);
  for (std::size_t i = 0; i < n_leads; ++i) campaign.add_lead(synthetic_lead(opts.lead_prefix, i + 1), opts.start);

  ExperimentResult res;
  std::map<std::string, SimCounters> arm_counters;
  std::priority_queue<Queued, std::vector<Queued>, Later> queue;
  std::uint64_t seq = 0;

  while (true) {
    if (res.iterations++ >= opts.max_iterations) {
      throw Error("SIMULATION_STALLED", "no quiescence after " + std::to_string(opts.max_iterations) + " iterations");
    }
    const auto wake = engine::next_wakeup(campaign.state());
    if (!wake && queue.empty()) break;
    Instant t = wake.value_or(Instant::max());
    if (!queue.empty()) t = std::min(t, queue.top().event.timestamp);

    while (!queue.empty() && queue.top().event.timestamp <= t) {
      campaign.ingest_event(queue.top().event);
      queue.pop();
    }
    for (const MessageRecord& m : campaign.tick(t)) {
      const engine::LeadState& ls = campaign.lead(m.id.substr(0, m.id.rfind(':')));
      if (!m.step_index) {
        ++res.replies_sent;
        continue;
      }
      ++res.steps_sent;
      MessageDraws d;
      for (auto& ev : simulate_message(ls.lead, m, arm_profiles.at(ls.lead.arm_id), seed, &d)) {
        res.events.push_back(ev);
        queue.push({std::move(ev), seq++});
      }
      res.counters.add(d);
      arm_counters[ls.lead.arm_id].add(d);
    }
    res.finished_at = t;
  }

  res.state = campaign.state();
  if (opts.keep_log) res.log = campaign.log();
  for (const auto& [id, ls] : res.state.leads) res.failed_leads += ls.cursor.kind == engine::CursorKind::failed;

  const auto all = engine::all_events(res.state);
  res.overall = metrics::kpi_rates(all);  // NO_DELIVERIES when nothing went out

  const auto costs = engine::campaign_costs(res.state, prices);
  res.total_cost = costs.total;
  res.mean_cost_per_lead = costs.mean_per_lead;
  for (const auto& arm : spec.variant_arms) {
    ArmOutcome a;
    a.arm_id = arm.arm_id;
    a.backend = arm.backend_name;
    a.counters = arm_counters[arm.arm_id];
    if (auto it = costs.leads_per_arm.find(arm.arm_id); it != costs.leads_per_arm.end()) a.leads = it->second;
    if (auto it = costs.per_arm.find(arm.arm_id); it != costs.per_arm.end()) a.cost = it->second;
    if (a.leads > 0) a.mean_cost_per_lead = a.cost.divided_by(static_cast<std::int64_t>(a.leads));
    if (a.counters.delivered > 0) {
      a.kpi = metrics::kpi_from_counts(a.counters.delivered, a.counters.opens, a.counters.clicks, a.counters.replies,
                                       a.counters.unsubscribes);
    }
    res.arms.push_back(std::move(a));
  }
  return res;
}

}  // namespace minilab::sim
