#include "minilab/gateway/pricing.hpp"

#include "minilab/error.hpp"

namespace minilab {

namespace {

constexpr std::int64_t kMicro = Money::kUnitsPerWhole / 1'000'000;

Money checked_price(const std::string& text) {
  const Money m = Money::parse(text);
  if (m.units() < 0) throw Error("PARSE_ERROR", "price must be non-negative: " + text);
  if (m.units() % kMicro != 0) throw Error("PARSE_ERROR", "price finer than 1e-6: " + text);
  return m;
}

}  // namespace

Price make_price(const std::string& input_per_million, const std::string& output_per_million) {
  return Price{checked_price(input_per_million), checked_price(output_per_million)};
}

Money cost_of(const UsageRecord& usage, const PriceTable& prices) {
  const auto it = prices.find(usage.backend_name);
  if (it == prices.end()) {
    throw Error("UNKNOWN_BACKEND", "no price for backend '" + usage.backend_name + "'");
  }
  // units per token = price units / 1e6; exact because prices are whole micros.
  const std::int64_t in_per_token = it->second.input_price.units() / 1'000'000;
  const std::int64_t out_per_token = it->second.output_price.units() / 1'000'000;
  return Money::from_units(usage.prompt_tokens * in_per_token +
                           usage.completion_tokens * out_per_token);
}

LeadCosts ledger_per_lead(std::span<const LedgerEntry> ledger, const PriceTable& prices) {
  LeadCosts out;
  for (const auto& entry : ledger) {
    const Money c = cost_of(entry.usage, prices);
    if (entry.lead_id.empty()) {
      out.unattributed += c;
    } else {
      out.per_lead[entry.lead_id] += c;
    }
    out.total += c;
  }
  if (!out.per_lead.empty()) {
    out.mean = (out.total - out.unattributed).divided_by(static_cast<std::int64_t>(out.per_lead.size()));
  }
  return out;
}

}  // namespace minilab
