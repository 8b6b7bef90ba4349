#include "minilab/gateway/registry.hpp"

#include "minilab/error.hpp"

namespace minilab {

namespace {

std::string price_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return Money::from_double(v.get<double>(), 6).to_string();
  throw Error("PARSE_ERROR", "price must be a string or number");
}

}  // namespace

Registry parse_registry(const Json& j) {
  Registry out;
  try {
    for (const auto& b : j.at("backends")) {
      BackendConfig cfg;
      cfg.name = b.at("name").get<std::string>();
      cfg.base_url = b.at("base_url").get<std::string>();
      cfg.model = b.value("model", cfg.name);
      cfg.temperature = b.value("temperature", cfg.temperature);
      cfg.timeout = std::chrono::milliseconds(b.value("timeout_ms", std::int64_t{60000}));
      cfg.max_concurrency = b.value("max_concurrency", cfg.max_concurrency);
      cfg.api_key_env = b.value("api_key_env", "");
      if (auto problems = validate_backend_config(cfg); !problems.empty()) {
        throw Error("INVALID_BACKEND", problems.front());
      }
      out.backends.push_back(std::move(cfg));
    }
    if (auto it = j.find("prices"); it != j.end()) out.prices = parse_price_table(*it);
  } catch (const nlohmann::json::exception& e) {
    throw Error("PARSE_ERROR", std::string("backend registry: ") + e.what());
  }
  return out;
}

PriceTable parse_price_table(const Json& prices) {
  PriceTable out;
  try {
    for (const auto& [name, p] : prices.items()) {
      out[name] = make_price(price_text(p.at("input_price")), price_text(p.at("output_price")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("PARSE_ERROR", std::string("price table: ") + e.what());
  }
  return out;
}

LedgerFile parse_ledger_file(const Json& j) {
  LedgerFile out;
  try {
    out.prices = parse_price_table(j.at("prices"));
    for (const auto& e : j.at("entries")) {
      LedgerEntry le;
      le.lead_id = e.value("lead_id", "");
      le.purpose = parse_usage_purpose(e.value("purpose", "other"));
      le.usage = e.at("usage").get<UsageRecord>();
      out.entries.push_back(std::move(le));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("PARSE_ERROR", std::string("ledger file: ") + e.what());
  }
  return out;
}

LedgerFile load_ledger_file(const std::string& path) { return parse_ledger_file(json_util::load_file(path)); }

Registry load_registry(const std::string& path) { return parse_registry(json_util::load_file(path)); }

Json to_json(const Registry& r) {
  Json backends = Json::array();
  for (const auto& b : r.backends) {
    backends.push_back(Json{{"name", b.name},
                            {"base_url", b.base_url},
                            {"model", b.model},
                            {"temperature", b.temperature},
                            {"timeout_ms", b.timeout.count()},
                            {"max_concurrency", b.max_concurrency},
                            {"api_key_env", b.api_key_env}});
  }
  Json prices = Json::object();
  for (const auto& [name, p] : r.prices) {
    prices[name] = Json{{"input_price", p.input_price.to_string()}, {"output_price", p.output_price.to_string()}};
  }
  return Json{{"backends", backends}, {"prices", prices}};
}

std::unique_ptr<ModelGateway> make_gateway(const Registry& registry, RetryPolicy retry) {
  auto gw = std::make_unique<ModelGateway>(retry);
  for (const auto& cfg : registry.backends) gw->register_backend(cfg, make_transport_for(cfg));
  return gw;
}

}  // namespace minilab
