#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "minilab/core/types.hpp"
#include "minilab/gateway/money.hpp"

namespace minilab {

// Currency per one million tokens.
struct Price {
  Money input_price;
  Money output_price;
};

using PriceTable = std::map<std::string, Price, std::less<>>;

// Throws PARSE_ERROR when a price is negative or finer than 1e-6.
Price make_price(const std::string& input_per_million, const std::string& output_per_million);

// prompt/1e6 * input + completion/1e6 * output, exact. UNKNOWN_BACKEND when
// the backend has no price.
Money cost_of(const UsageRecord& usage, const PriceTable& prices);

struct LedgerEntry {
  std::string lead_id;  // empty for campaign-level usage
  UsagePurpose purpose = UsagePurpose::other;
  UsageRecord usage;
};

struct LeadCosts {
  std::map<std::string, Money> per_lead;
  std::optional<Money> mean;  // over leads; absent when no lead has usage
  Money unattributed;         // campaign-level usage (empty lead id)
  Money total;
};

LeadCosts ledger_per_lead(std::span<const LedgerEntry> ledger, const PriceTable& prices);

}  // namespace minilab
