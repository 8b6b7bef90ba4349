#pragma once

#include <string>

#include "minilab/gateway/types.hpp"

namespace minilab::wire {

// {"model", "messages": [{"role", "content"}], "temperature"}
std::string encode_chat_request(const BackendConfig& cfg, const ChatRequest& req);

// Reads choices[0].message.content and usage.{prompt,completion}_tokens.
// Missing usage counts as zero. Throws BACKEND_ERROR on a malformed body.
struct DecodedCompletion {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};
DecodedCompletion decode_chat_response(const std::string& body);

// Shapes a completion body the way an OpenAI-compatible server would.
std::string encode_chat_response(const std::string& text, std::int64_t prompt_tokens,
                                 std::int64_t completion_tokens, const std::string& model);

// Chat messages of an encoded request; used by mock servers.
ChatRequest decode_chat_request(const std::string& body);

// Rough 4-characters-per-token estimate used by offline backends.
std::int64_t estimate_tokens(const std::string& text);

}  // namespace minilab::wire
