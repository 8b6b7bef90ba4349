#pragma once

#include <optional>
#include <string>

#include <json.hpp>
#include "minilab/core/types.hpp"

namespace minilab {

using Json = nlohmann::json;

// JSON forms mirror the struct field names. Durations and instants are
// integer seconds; absent optionals are omitted.
void to_json(Json& j, const UsageRecord& v);
void from_json(const Json& j, UsageRecord& v);
void to_json(Json& j, const SequenceStep& v);
void from_json(const Json& j, SequenceStep& v);
void to_json(Json& j, const VariantArm& v);
void from_json(const Json& j, VariantArm& v);
void to_json(Json& j, const CampaignSpec& v);
void from_json(const Json& j, CampaignSpec& v);
void to_json(Json& j, const Lead& v);
void from_json(const Json& j, Lead& v);
void to_json(Json& j, const MessageRecord& v);
void from_json(const Json& j, MessageRecord& v);
void to_json(Json& j, const SourceDocument& v);
void from_json(const Json& j, SourceDocument& v);
void to_json(Json& j, const ResearchDossier& v);
void from_json(const Json& j, ResearchDossier& v);
void to_json(Json& j, const AgentMemory& v);
void from_json(const Json& j, AgentMemory& v);
void to_json(Json& j, const EngagementEvent& v);
void from_json(const Json& j, EngagementEvent& v);

namespace json_util {

[[noreturn]] void throw_parse_error(const char* what, const std::string& detail);

// Wraps nlohmann parse/type errors into Error{"PARSE_ERROR"}.
template <typename T>
T decode(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw_parse_error(what, e.what());
  }
}

Json parse_text(const std::string& text, const char* what);
Json load_file(const std::string& path);

template <typename T>
void put_optional(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->template get<T>();
}

}  // namespace json_util
}  // namespace minilab
