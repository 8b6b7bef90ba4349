#pragma once

#include <optional>
#include <string>

#include "minilab/core/types.hpp"
#include "minilab/gateway/types.hpp"

namespace minilab::engine {

// Fixed order: system (campaign instructions, then step instructions), lead
// context (profile, dossier), history oldest-first with outbound as assistant
// and inbound as user, then the task line.
ChatRequest build_step_prompt(const CampaignSpec& spec, std::size_t step, const Lead& lead,
                              const AgentMemory& memory);

ChatRequest build_reply_prompt(const CampaignSpec& spec, const Lead& lead, const AgentMemory& memory);

// Campaign-level template for one arm; no lead context.
ChatRequest build_template_prompt(const CampaignSpec& spec, const VariantArm& arm);

std::string campaign_instructions(const CampaignSpec& spec);

struct SplitDraft {
  std::optional<std::string> subject;
  std::string body;
};

// A leading "Subject: ..." line is pulled out for email; everything else is body.
SplitDraft split_subject(const std::string& text, Channel channel);

}  // namespace minilab::engine
