#include <chrono>
#include <cstdlib>

#include "httplib.h"
#include "minilab/error.hpp"
#include "minilab/gateway/transport.hpp"

namespace minilab {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("INVALID_BACKEND", "bad base_url: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

class HttpTransport final : public ChatTransport {
 public:
  TransportResponse post(const BackendConfig& cfg, const std::string& body) override {
    const SplitUrl url = split_url(cfg.base_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.origin.rfind("https://", 0) == 0) {
      throw Error("INVALID_BACKEND", "built without TLS support: " + cfg.base_url);
    }
#endif
    httplib::Client client(url.origin);
    const auto timeout = cfg.timeout;
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!cfg.api_key_env.empty()) {
      if (const char* key = std::getenv(cfg.api_key_env.c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
      }
    }

    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(url.prefix + "/chat/completions", headers, body, "application/json");
    if (!res) {
      const auto elapsed = std::chrono::steady_clock::now() - started;
      const bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                             (res.error() == httplib::Error::Read && elapsed >= timeout * 9 / 10);
      if (timed_out) {
        throw Error("TIMEOUT", "backend '" + cfg.name + "' did not answer within " +
                                   std::to_string(timeout.count()) + "ms");
      }
      return {0, httplib::to_string(res.error())};
    }
    return {res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<ChatTransport> make_http_transport() { return std::make_shared<HttpTransport>(); }

}  // namespace minilab
