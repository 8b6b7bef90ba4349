#include "minilab/core/json.hpp"

#include <fstream>
#include <sstream>

#include "minilab/error.hpp"

namespace minilab {

using json_util::get_optional;
using json_util::put_optional;

namespace {

Instant instant_at(const Json& j, const char* key) { return at_seconds(j.at(key).get<std::int64_t>()); }

}  // namespace

void to_json(Json& j, const UsageRecord& v) {
  j = Json{{"prompt_tokens", v.prompt_tokens},
           {"completion_tokens", v.completion_tokens},
           {"backend_name", v.backend_name},
           {"timestamp", to_seconds(v.timestamp)}};
}

void from_json(const Json& j, UsageRecord& v) {
  v.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
  v.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
  v.backend_name = j.value("backend_name", "");
  v.timestamp = at_seconds(j.value("timestamp", std::int64_t{0}));
  if (v.prompt_tokens < 0 || v.completion_tokens < 0) {
    throw Error("PARSE_ERROR", "token counts must be non-negative");
  }
}

void to_json(Json& j, const SequenceStep& v) {
  j = Json{{"index", v.index},
           {"channel", to_string(v.channel)},
           {"delay", v.delay.count()},
           {"instructions", v.instructions}};
}

void from_json(const Json& j, SequenceStep& v) {
  v.index = j.at("index").get<std::size_t>();
  v.channel = parse_channel(j.at("channel").get<std::string>());
  v.delay = Duration{j.at("delay").get<std::int64_t>()};
  v.instructions = j.value("instructions", "");
}

void to_json(Json& j, const VariantArm& v) {
  j = Json{{"arm_id", v.arm_id}, {"backend_name", v.backend_name}, {"weight", v.weight}};
}

void from_json(const Json& j, VariantArm& v) {
  v.arm_id = j.at("arm_id").get<std::string>();
  v.backend_name = j.at("backend_name").get<std::string>();
  v.weight = j.at("weight").get<double>();
}

void to_json(Json& j, const CampaignSpec& v) {
  j = Json{{"id", v.id},
           {"name", v.name},
           {"value_proposition", v.value_proposition},
           {"pain_points", v.pain_points},
           {"research_goals", v.research_goals},
           {"outreach_instructions", v.outreach_instructions},
           {"steps", v.steps},
           {"variant_arms", v.variant_arms}};
  if (!v.research_sources.empty()) j["research_sources"] = v.research_sources;
  if (v.assignment_seed != 0) j["assignment_seed"] = v.assignment_seed;
}

void from_json(const Json& j, CampaignSpec& v) {
  v.id = j.at("id").get<std::string>();
  v.name = j.value("name", "");
  v.value_proposition = j.value("value_proposition", "");
  v.pain_points = j.value("pain_points", std::vector<std::string>{});
  v.research_goals = j.value("research_goals", std::vector<std::string>{});
  v.outreach_instructions = j.value("outreach_instructions", "");
  v.steps = j.at("steps").get<std::vector<SequenceStep>>();
  v.variant_arms = j.at("variant_arms").get<std::vector<VariantArm>>();
  v.research_sources = j.value("research_sources", std::vector<std::string>{});
  v.assignment_seed = j.value("assignment_seed", std::uint64_t{0});
}

void to_json(Json& j, const Lead& v) {
  j = Json{{"id", v.id}, {"profile", v.profile}, {"arm_id", v.arm_id}};
}

void from_json(const Json& j, Lead& v) {
  v.id = j.at("id").get<std::string>();
  v.profile = j.value("profile", std::map<std::string, std::string>{});
  v.arm_id = j.value("arm_id", "");
}

void to_json(Json& j, const MessageRecord& v) {
  j = Json{{"id", v.id},
           {"direction", to_string(v.direction)},
           {"channel", to_string(v.channel)},
           {"body", v.body},
           {"timestamp", to_seconds(v.timestamp)}};
  put_optional(j, "step_index", v.step_index);
  put_optional(j, "subject", v.subject);
  put_optional(j, "model_backend", v.model_backend);
  put_optional(j, "usage", v.usage);
}

void from_json(const Json& j, MessageRecord& v) {
  v.id = j.at("id").get<std::string>();
  v.direction = parse_direction(j.at("direction").get<std::string>());
  v.channel = parse_channel(j.at("channel").get<std::string>());
  v.body = j.at("body").get<std::string>();
  v.timestamp = instant_at(j, "timestamp");
  v.step_index = get_optional<std::size_t>(j, "step_index");
  v.subject = get_optional<std::string>(j, "subject");
  v.model_backend = get_optional<std::string>(j, "model_backend");
  v.usage = get_optional<UsageRecord>(j, "usage");
}

void to_json(Json& j, const SourceDocument& v) {
  j = Json{{"url", v.url}, {"fetched_at", to_seconds(v.fetched_at)}, {"text", v.text}};
}

void from_json(const Json& j, SourceDocument& v) {
  v.url = j.at("url").get<std::string>();
  v.fetched_at = instant_at(j, "fetched_at");
  v.text = j.at("text").get<std::string>();
}

void to_json(Json& j, const ResearchDossier& v) {
  j = Json{{"lead_id", v.lead_id},
           {"summary", v.summary},
           {"sources", v.sources},
           {"model_backend", v.model_backend},
           {"usage", v.usage}};
}

void from_json(const Json& j, ResearchDossier& v) {
  v.lead_id = j.at("lead_id").get<std::string>();
  v.summary = j.at("summary").get<std::string>();
  v.sources = j.at("sources").get<std::vector<SourceDocument>>();
  v.model_backend = j.value("model_backend", "");
  v.usage = j.at("usage").get<UsageRecord>();
}

void to_json(Json& j, const AgentMemory& v) {
  j = Json{{"lead_id", v.lead_id}, {"history", v.history}, {"inbound", v.inbound}};
  put_optional(j, "research_dossier", v.research_dossier);
}

void from_json(const Json& j, AgentMemory& v) {
  v.lead_id = j.at("lead_id").get<std::string>();
  v.history = j.at("history").get<std::vector<MessageRecord>>();
  v.inbound = j.at("inbound").get<std::vector<MessageRecord>>();
  v.research_dossier = get_optional<ResearchDossier>(j, "research_dossier");
}

void to_json(Json& j, const EngagementEvent& v) {
  j = Json{{"lead_id", v.lead_id},
           {"kind", to_string(v.kind)},
           {"timestamp", to_seconds(v.timestamp)},
           {"message_ref", v.message_ref}};
  put_optional(j, "body", v.body);
}

void from_json(const Json& j, EngagementEvent& v) {
  v.lead_id = j.at("lead_id").get<std::string>();
  v.kind = parse_event_kind(j.at("kind").get<std::string>());
  v.timestamp = instant_at(j, "timestamp");
  v.message_ref = j.at("message_ref").get<std::string>();
  v.body = get_optional<std::string>(j, "body");
}

namespace json_util {

void throw_parse_error(const char* what, const std::string& detail) {
  throw Error("PARSE_ERROR", std::string(what) + ": " + detail);
}

Json parse_text(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw_parse_error(what, e.what());
  }
}

Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("FILE_NOT_FOUND", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path.c_str());
}

}  // namespace json_util
}  // namespace minilab
