#pragma once

#include <memory>
#include <string>
#include <vector>

#include "minilab/core/json.hpp"
#include "minilab/gateway/gateway.hpp"
#include "minilab/gateway/pricing.hpp"

namespace minilab {

// Backend registry file:
//   {"backends": [{"name", "base_url", "model", "temperature", "timeout_ms",
//                  "max_concurrency", "api_key_env"}],
//    "prices": {"<backend>": {"input_price": "2.5", "output_price": "10"}}}
// Prices are per million tokens, given as decimal strings or numbers.
struct Registry {
  std::vector<BackendConfig> backends;
  PriceTable prices;
};

Registry parse_registry(const Json& j);
PriceTable parse_price_table(const Json& prices);

// {"prices": {...}, "entries": [{"lead_id", "purpose", "usage": UsageRecord}]}
struct LedgerFile {
  PriceTable prices;
  std::vector<LedgerEntry> entries;
};

LedgerFile parse_ledger_file(const Json& j);
LedgerFile load_ledger_file(const std::string& path);

Registry load_registry(const std::string& path);
Json to_json(const Registry& r);

// Registers every backend with a transport chosen from its base_url.
std::unique_ptr<ModelGateway> make_gateway(const Registry& registry, RetryPolicy retry = {});

}  // namespace minilab
