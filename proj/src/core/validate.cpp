#include "minilab/core/validate.hpp"

#include <cmath>
#include <set>

#include "minilab/error.hpp"
#include "minilab/hash.hpp"

namespace minilab {

ValidationReport validate_campaign_spec(const CampaignSpec& spec) {
  ValidationReport out;
  auto add = [&out](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };

  if (spec.id.empty()) add("MISSING_ID", "campaign id is empty");

  if (spec.steps.empty()) add("EMPTY_SEQUENCE", "campaign has no steps");
  for (std::size_t i = 0; i < spec.steps.size(); ++i) {
    const auto& step = spec.steps[i];
    if (step.index != i) {
      add("STEP_INDEX_GAP", "step at position " + std::to_string(i) + " has index " +
                                std::to_string(step.index));
    }
    if (step.delay.count() < 0) {
      add("NEGATIVE_DELAY", "step " + std::to_string(i) + " has a negative delay");
    }
  }

  if (spec.variant_arms.empty()) add("NO_ARMS", "at least one variant arm is required");
  std::set<std::string> seen;
  double sum = 0.0;
  for (const auto& arm : spec.variant_arms) {
    if (arm.arm_id.empty()) add("MISSING_ARM_ID", "variant arm without id");
    if (!seen.insert(arm.arm_id).second) add("DUPLICATE_ARM", "arm '" + arm.arm_id + "' repeated");
    if (arm.backend_name.empty()) add("MISSING_BACKEND", "arm '" + arm.arm_id + "' names no backend");
    if (!(arm.weight > 0.0) || !std::isfinite(arm.weight)) {
      add("ARM_WEIGHT_NONPOSITIVE", "arm '" + arm.arm_id + "' weight must be positive");
    }
    sum += arm.weight;
  }
  if (!spec.variant_arms.empty() && std::abs(sum - 1.0) > kArmWeightTolerance) {
    add("ARM_WEIGHT_SUM", "arm weights sum to " + std::to_string(sum) + ", expected 1");
  }
  return out;
}

void require_valid(const CampaignSpec& spec) {
  const auto report = validate_campaign_spec(spec);
  if (!report.empty()) throw Error(report.front().code, report.front().message);
}

const std::string& assign_arm(const std::string& lead_id, std::span<const VariantArm> arms,
                              std::uint64_t seed) {
  if (arms.empty()) throw Error("NO_ARMS", "cannot assign a lead without arms");
  const double u = unit_interval(splitmix64(fnv1a64(lead_id) ^ splitmix64(seed)));
  double total = 0.0;
  for (const auto& arm : arms) total += arm.weight;
  double cumulative = 0.0;
  for (const auto& arm : arms) {
    cumulative += arm.weight / total;
    if (u < cumulative) return arm.arm_id;
  }
  return arms.back().arm_id;
}

}  // namespace minilab
