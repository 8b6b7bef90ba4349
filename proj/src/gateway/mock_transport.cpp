#include <sstream>

#include "minilab/error.hpp"
#include "minilab/gateway/transport.hpp"
#include "minilab/gateway/wire.hpp"

namespace minilab {

namespace {

std::string find_field(const ChatRequest& req, const std::string& key) {
  const std::string needle = key + ": ";
  for (const auto& m : req.messages) {
    std::istringstream lines(m.content);
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind(needle, 0) == 0) return line.substr(needle.size());
    }
  }
  return {};
}

std::string last_user(const ChatRequest& req) {
  for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
    if (it->role == Role::user) return it->content;
  }
  return {};
}

std::size_t prompt_chars(const ChatRequest& req) {
  std::size_t n = 0;
  for (const auto& m : req.messages) n += m.content.size();
  return n;
}

class TemplateTransport final : public ChatTransport {
 public:
  TransportResponse post(const BackendConfig& cfg, const std::string& body) override {
    const ChatRequest req = wire::decode_chat_request(body);
    const std::string task = last_user(req);
    std::string name = find_field(req, "name");
    std::string company = find_field(req, "company");
    if (name.empty()) name = "there";
    if (company.empty()) company = "your team";

    std::string text;
    if (task.find("research summary") != std::string::npos) {
      text = "Research summary for " + name + " at " + company + ".";
      if (const auto pos = task.find("Sources:"); pos != std::string::npos) {
        std::string excerpt = task.substr(pos + 8, 300);
        for (char& c : excerpt) {
          if (c == '\n') c = ' ';
        }
        text += " Key findings:" + excerpt;
      }
    } else if (task.find("Reply to") != std::string::npos) {
      text = "Hi " + name + ",\n\nThanks for getting back to me. Happy to share more about how " +
             "we can help " + company + ". Would a short call next week work?\n\nBest,\nThe team";
    } else {
      text = "Subject: An idea for " + company + "\n\nHi " + name + ",\n\n" +
             "I noticed what " + company + " is working on and thought our approach could help. " +
             task.substr(0, std::min<std::size_t>(task.size(), 120)) + "\n\nBest,\nThe team";
    }
    const auto prompt_tokens = static_cast<std::int64_t>((prompt_chars(req) + 3) / 4);
    return {200, wire::encode_chat_response(text, prompt_tokens, wire::estimate_tokens(text), cfg.model)};
  }
};

class EchoTransport final : public ChatTransport {
 public:
  TransportResponse post(const BackendConfig& cfg, const std::string& body) override {
    const ChatRequest req = wire::decode_chat_request(body);
    const std::string text = last_user(req);
    const auto prompt_tokens = static_cast<std::int64_t>((prompt_chars(req) + 3) / 4);
    return {200, wire::encode_chat_response(text, prompt_tokens, wire::estimate_tokens(text), cfg.model)};
  }
};

}  // namespace

std::shared_ptr<ChatTransport> make_template_transport() { return std::make_shared<TemplateTransport>(); }

std::shared_ptr<ChatTransport> make_echo_transport() { return std::make_shared<EchoTransport>(); }

std::shared_ptr<ChatTransport> make_transport_for(const BackendConfig& cfg) {
  if (cfg.base_url.rfind("mock://template", 0) == 0) return make_template_transport();
  if (cfg.base_url.rfind("mock://echo", 0) == 0) return make_echo_transport();
  if (cfg.base_url.rfind("http://", 0) == 0 || cfg.base_url.rfind("https://", 0) == 0) {
    return make_http_transport();
  }
  throw Error("INVALID_BACKEND", "unsupported base_url scheme: " + cfg.base_url);
}

}  // namespace minilab
