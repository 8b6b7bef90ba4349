#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minilab/core/types.hpp"

namespace minilab {

enum class Role { system, user, assistant };

const char* to_string(Role r);
Role parse_role(const std::string& s);

struct ChatMessage {
  Role role = Role::user;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

// Attribution carried alongside a request for the usage ledger; never sent
// over the wire.
struct UsageTag {
  std::string lead_id;
  UsagePurpose purpose = UsagePurpose::other;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  UsageTag tag;
};

struct ChatResponse {
  std::string text;
  UsageRecord usage;
  int attempts = 1;
};

struct BackendConfig {
  std::string name;
  std::string base_url;  // http(s)://host[:port][/prefix] or mock://<kind>
  std::string model;
  double temperature = 0.7;
  std::chrono::milliseconds timeout{60000};
  int max_concurrency = 4;
  std::string api_key_env;  // name of the environment variable holding the key
};

// Empty when valid, otherwise one message per broken invariant.
std::vector<std::string> validate_backend_config(const BackendConfig& cfg);
void validate_chat_request(const ChatRequest& req);

}  // namespace minilab
