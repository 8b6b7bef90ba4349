#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minilab/lora/lora.hpp"

namespace minilab::lora {

// One model from the teacher/learner lists. Teachers have no published size.
struct ModelEntry {
  std::string name;
  std::string family;
  std::optional<double> params;  // absent when only a bound is published
  std::string params_label;      // as printed, e.g. ">100B", "1.7B"
  std::string context;           // as printed, e.g. "128K"
  std::string type;              // "teacher" | "learner"
  std::optional<std::int64_t> hidden_size;        // public model config, learners only
  std::optional<std::int64_t> intermediate_size;  // MLP width, same source
  std::optional<std::int64_t> lora_rank;          // rank configured for this model
};

std::vector<ModelEntry> load_catalog(const std::string& path);

struct CatalogRatio {
  std::string model;
  std::int64_t hidden_size = 0;
  std::int64_t rank = 0;           // from rank_for_model
  double square_reduction = 0.0;   // hidden × hidden (attention projections)
  std::optional<double> mlp_reduction;  // hidden × intermediate
};

// Rule-assigned rank and reduction ratios for every learner with a hidden size.
std::vector<CatalogRatio> catalog_reduction_report(const std::vector<ModelEntry>& catalog);

}  // namespace minilab::lora
