#include "minilab/engine/prompt.hpp"

#include <algorithm>

namespace minilab::engine {

namespace {

void append_list(std::string& out, const char* title, const std::vector<std::string>& items) {
  if (items.empty()) return;
  out += title;
  out += ":\n";
  for (const auto& it : items) out += "- " + it + "\n";
}

std::string lead_context(const Lead& lead, const AgentMemory& memory) {
  std::string out = "Lead profile:\n";
  for (const auto& [k, v] : lead.profile) out += k + ": " + v + "\n";
  if (memory.research_dossier && !memory.research_dossier->summary.empty()) {
    out += "\nResearch dossier:\n" + memory.research_dossier->summary + "\n";
  }
  return out;
}

void append_history(std::vector<ChatMessage>& msgs, const AgentMemory& memory) {
  std::vector<const MessageRecord*> all;
  for (const auto& m : memory.history) all.push_back(&m);
  for (const auto& m : memory.inbound) all.push_back(&m);
  // Ties keep outbound before inbound, each in append order.
  std::stable_sort(all.begin(), all.end(),
                   [](const MessageRecord* a, const MessageRecord* b) { return a->timestamp < b->timestamp; });
  for (const MessageRecord* m : all) {
    std::string content;
    if (m->subject) content += "Subject: " + *m->subject + "\n\n";
    content += m->body;
    msgs.push_back({m->direction == Direction::outbound ? Role::assistant : Role::user, std::move(content)});
  }
}

}  // namespace

std::string campaign_instructions(const CampaignSpec& spec) {
  std::string out;
  if (!spec.outreach_instructions.empty()) out += spec.outreach_instructions + "\n";
  if (!spec.value_proposition.empty()) out += "\nValue proposition: " + spec.value_proposition + "\n";
  append_list(out, "\nPain points", spec.pain_points);
  return out;
}

ChatRequest build_step_prompt(const CampaignSpec& spec, std::size_t step, const Lead& lead,
                              const AgentMemory& memory) {
  const SequenceStep& s = spec.steps.at(step);
  ChatRequest req;
  req.tag = {lead.id, UsagePurpose::draft};
  req.messages.push_back({Role::system, campaign_instructions(spec) + "\nStep " + std::to_string(step + 1) + " of " +
                                            std::to_string(spec.steps.size()) + " (" + to_string(s.channel) +
                                            "): " + s.instructions});
  req.messages.push_back({Role::user, lead_context(lead, memory)});
  append_history(req.messages, memory);
  std::string task = "Draft step " + std::to_string(step + 1) + " as a " + to_string(s.channel) + " message";
  if (s.channel == Channel::email) task += ". Start with a line \"Subject: ...\"";
  req.messages.push_back({Role::user, task + "."});
  return req;
}

ChatRequest build_reply_prompt(const CampaignSpec& spec, const Lead& lead, const AgentMemory& memory) {
  ChatRequest req;
  req.tag = {lead.id, UsagePurpose::reply};
  req.messages.push_back({Role::system, campaign_instructions(spec) +
                                            "\nThe lead has replied. Answer their message directly and helpfully."});
  req.messages.push_back({Role::user, lead_context(lead, memory)});
  append_history(req.messages, memory);
  std::string task = "Reply to the lead's latest message";
  if (!memory.inbound.empty()) task += ":\n" + memory.inbound.back().body;
  req.messages.push_back({Role::user, task});
  return req;
}

ChatRequest build_template_prompt(const CampaignSpec& spec, const VariantArm& arm) {
  ChatRequest req;
  req.tag = {"", UsagePurpose::template_draft};
  std::string system = campaign_instructions(spec);
  if (!spec.steps.empty()) system += "\nStep 1 (" + std::string(to_string(spec.steps[0].channel)) + "): " + spec.steps[0].instructions;
  req.messages.push_back({Role::system, system});
  std::string user = "Campaign: " + spec.name + "\nVariant: " + arm.arm_id + "\n";
  append_list(user, "Research goals", spec.research_goals);
  user += "Draft a template first message with placeholders for the lead's name and company.";
  req.messages.push_back({Role::user, user});
  return req;
}

SplitDraft split_subject(const std::string& text, Channel channel) {
  static const std::string kPrefix = "Subject:";
  if (channel != Channel::email || text.compare(0, kPrefix.size(), kPrefix) != 0) return {std::nullopt, text};
  const auto eol = text.find('\n');
  std::string subject = text.substr(kPrefix.size(), eol == std::string::npos ? std::string::npos : eol - kPrefix.size());
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  std::string body = eol == std::string::npos ? std::string{} : text.substr(eol + 1);
  const auto start = body.find_first_not_of("\r\n");
  body = start == std::string::npos ? std::string{} : body.substr(start);
  return {trim(subject), body};
}

}  // namespace minilab::engine
