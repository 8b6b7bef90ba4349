#pragma once

#include <cstdint>
#include <span>

#include "minilab/core/types.hpp"

namespace minilab::metrics {

struct KpiReport {
  std::int64_t delivered = 0;
  std::int64_t opens = 0;
  std::int64_t clicks = 0;
  std::int64_t replies = 0;  // delivered messages with at least one reply
  std::int64_t unsubscribes = 0;
  double open_rate = 0.0;  // percentages of delivered
  double ctr = 0.0;
  double reply_rate = 0.0;
  double unsub_rate = 0.0;

  bool operator==(const KpiReport&) const = default;
};

// Deduplicates per (lead, kind, message), ignores engagement on messages with
// no delivered event, and rates everything against delivered. Clicks are not
// capped by opens. NO_DELIVERIES when nothing was delivered.
KpiReport kpi_rates(std::span<const EngagementEvent> events);

// Rates from already-deduplicated counts.
KpiReport kpi_from_counts(std::int64_t delivered, std::int64_t opens, std::int64_t clicks,
                          std::int64_t replies, std::int64_t unsubscribes);

}  // namespace minilab::metrics
