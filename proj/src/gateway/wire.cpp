#include "minilab/gateway/wire.hpp"

#include "minilab/core/json.hpp"
#include "minilab/error.hpp"

namespace minilab {

const char* to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "?";
}

Role parse_role(const std::string& s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  throw Error("PARSE_ERROR", "unknown role '" + s + "'");
}

std::vector<std::string> validate_backend_config(const BackendConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.name.empty()) out.push_back("backend name is empty");
  if (cfg.base_url.empty()) out.push_back("backend '" + cfg.name + "' has no base_url");
  if (cfg.max_concurrency < 1) out.push_back("max_concurrency must be >= 1");
  if (!(cfg.temperature >= 0.0 && cfg.temperature <= 2.0)) out.push_back("temperature must be in [0, 2]");
  if (cfg.timeout.count() <= 0) out.push_back("timeout must be positive");
  return out;
}

void validate_chat_request(const ChatRequest& req) {
  if (req.messages.empty()) throw Error("INVALID_REQUEST", "chat request has no messages");
  if (req.messages.front().role == Role::assistant) {
    throw Error("INVALID_REQUEST", "first message must be system or user");
  }
}

namespace wire {

std::string encode_chat_request(const BackendConfig& cfg, const ChatRequest& req) {
  Json messages = Json::array();
  for (const auto& m : req.messages) {
    messages.push_back(Json{{"role", to_string(m.role)}, {"content", m.content}});
  }
  return Json{{"model", cfg.model}, {"messages", messages}, {"temperature", cfg.temperature}}.dump();
}

ChatRequest decode_chat_request(const std::string& body) {
  const Json j = json_util::parse_text(body, "chat request");
  ChatRequest req;
  try {
    for (const auto& m : j.at("messages")) {
      req.messages.push_back({parse_role(m.at("role").get<std::string>()),
                              m.at("content").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("PARSE_ERROR", std::string("chat request: ") + e.what());
  }
  return req;
}

DecodedCompletion decode_chat_response(const std::string& body) {
  DecodedCompletion out;
  try {
    const Json j = Json::parse(body);
    out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
      out.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
      out.completion_tokens = u->value("completion_tokens", std::int64_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("BACKEND_ERROR", std::string("malformed completion body: ") + e.what(), 200);
  }
  if (out.prompt_tokens < 0 || out.completion_tokens < 0) {
    throw Error("BACKEND_ERROR", "negative token counts in usage", 200);
  }
  return out;
}

std::string encode_chat_response(const std::string& text, std::int64_t prompt_tokens,
                                 std::int64_t completion_tokens, const std::string& model) {
  return Json{{"object", "chat.completion"},
              {"model", model},
              {"choices", Json::array({Json{{"index", 0},
                                            {"message", {{"role", "assistant"}, {"content", text}}},
                                            {"finish_reason", "stop"}}})},
              {"usage",
               {{"prompt_tokens", prompt_tokens},
                {"completion_tokens", completion_tokens},
                {"total_tokens", prompt_tokens + completion_tokens}}}}
      .dump();
}

std::int64_t estimate_tokens(const std::string& text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

}  // namespace wire
}  // namespace minilab
