#include "minilab/lora/catalog.hpp"

#include "minilab/core/json.hpp"

namespace minilab::lora {

std::vector<ModelEntry> load_catalog(const std::string& path) {
  const Json j = json_util::load_file(path);
  std::vector<ModelEntry> out;
  try {
    for (const auto& m : j.at("models")) {
      ModelEntry e;
      e.name = m.at("name").get<std::string>();
      e.family = m.value("family", "");
      e.params = json_util::get_optional<double>(m, "params");
      e.params_label = m.value("params_label", "");
      e.context = m.value("context", "");
      e.type = m.value("type", "");
      e.hidden_size = json_util::get_optional<std::int64_t>(m, "hidden_size");
      e.intermediate_size = json_util::get_optional<std::int64_t>(m, "intermediate_size");
      e.lora_rank = json_util::get_optional<std::int64_t>(m, "lora_rank");
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    json_util::throw_parse_error(path.c_str(), e.what());
  }
  return out;
}

std::vector<CatalogRatio> catalog_reduction_report(const std::vector<ModelEntry>& catalog) {
  std::vector<CatalogRatio> out;
  for (const auto& m : catalog) {
    if (!m.params || !m.hidden_size) continue;
    const LoraSpec spec = rank_for_model(*m.params);
    const LayerShape square{m.name, *m.hidden_size, *m.hidden_size};
    CatalogRatio r{m.name, *m.hidden_size, spec.rank, reduction_ratio(square, spec), std::nullopt};
    if (m.intermediate_size) r.mlp_reduction = reduction_ratio({m.name, *m.hidden_size, *m.intermediate_size}, spec);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace minilab::lora
