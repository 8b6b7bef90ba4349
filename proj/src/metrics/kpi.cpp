#include "minilab/metrics/kpi.hpp"

#include <set>
#include <string>
#include <utility>

#include "minilab/error.hpp"

namespace minilab::metrics {

KpiReport kpi_from_counts(std::int64_t delivered, std::int64_t opens, std::int64_t clicks,
                          std::int64_t replies, std::int64_t unsubscribes) {
  if (delivered <= 0) throw Error("NO_DELIVERIES", "no delivered messages to rate against");
  const double d = static_cast<double>(delivered);
  KpiReport r{delivered, opens, clicks, replies, unsubscribes};
  r.open_rate = 100.0 * static_cast<double>(opens) / d;
  r.ctr = 100.0 * static_cast<double>(clicks) / d;
  r.reply_rate = 100.0 * static_cast<double>(replies) / d;
  r.unsub_rate = 100.0 * static_cast<double>(unsubscribes) / d;
  return r;
}

KpiReport kpi_rates(std::span<const EngagementEvent> events) {
  using Key = std::pair<std::string, std::string>;  // (lead, message)
  std::set<Key> delivered, opens, clicks, replies, unsubs;
  for (const auto& e : events) {
    if (e.kind == EventKind::delivered) delivered.emplace(e.lead_id, e.message_ref);
  }
  for (const auto& e : events) {
    Key key{e.lead_id, e.message_ref};
    if (!delivered.contains(key)) continue;
    switch (e.kind) {
      case EventKind::open: opens.insert(std::move(key)); break;
      case EventKind::click: clicks.insert(std::move(key)); break;
      case EventKind::reply: replies.insert(std::move(key)); break;
      case EventKind::unsubscribe: unsubs.insert(std::move(key)); break;
      case EventKind::delivered: break;
    }
  }
  return kpi_from_counts(static_cast<std::int64_t>(delivered.size()), static_cast<std::int64_t>(opens.size()),
                         static_cast<std::int64_t>(clicks.size()), static_cast<std::int64_t>(replies.size()),
                         static_cast<std::int64_t>(unsubs.size()));
}

}  // namespace minilab::metrics
