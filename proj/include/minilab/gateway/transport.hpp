#pragma once

#include <memory>
#include <string>

#include "minilab/gateway/types.hpp"

namespace minilab {

struct TransportResponse {
  int status = 0;  // HTTP status; 0 when the connection itself failed
  std::string body;
};

// One POST of an OpenAI-compatible chat-completions body. Implementations must
// give up after cfg.timeout and throw Error{"TIMEOUT"}.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual TransportResponse post(const BackendConfig& cfg, const std::string& body) = 0;
};

// POST {base_url}/chat/completions over HTTP; bearer key read from the
// environment variable named by cfg.api_key_env.
std::shared_ptr<ChatTransport> make_http_transport();

// Offline backend that writes deterministic template drafts from the prompt
// (mock://template). Used by the simulator and the serve command's demo mode.
std::shared_ptr<ChatTransport> make_template_transport();

// Echoes the last user message back (mock://echo).
std::shared_ptr<ChatTransport> make_echo_transport();

// Picks a transport from the base_url scheme.
std::shared_ptr<ChatTransport> make_transport_for(const BackendConfig& cfg);

}  // namespace minilab
