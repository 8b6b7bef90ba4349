#pragma once

#include <span>
#include <string>
#include <vector>

#include "minilab/core/types.hpp"

namespace minilab {

struct Violation {
  std::string code;  // EMPTY_SEQUENCE, STEP_INDEX_GAP, ARM_WEIGHT_SUM, ...
  std::string message;
};

using ValidationReport = std::vector<Violation>;

// Lists every violated CampaignSpec invariant; empty means valid.
ValidationReport validate_campaign_spec(const CampaignSpec& spec);

// Throws Error carrying the first violation's code when the spec is invalid.
void require_valid(const CampaignSpec& spec);

inline constexpr double kArmWeightTolerance = 1e-9;

// Deterministic weighted assignment: a keyed hash of (lead_id, seed) mapped
// onto the arms' cumulative weights. Order-independent and restart-safe.
const std::string& assign_arm(const std::string& lead_id, std::span<const VariantArm> arms,
                              std::uint64_t seed);

}  // namespace minilab
