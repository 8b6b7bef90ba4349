#include <httplib.h>

#include "minilab/error.hpp"
#include "minilab/server/api.hpp"

namespace minilab::server {

struct HttpServer::Impl {
  httplib::Server http;
};

HttpServer::HttpServer(const ApiRouter& router, std::string ui_dir) : impl_(std::make_unique<Impl>()) {
  auto adapt = [&router](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    r.body = req.body;
    const ApiResponse out = router.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  const std::string any = R"(/v1/.*)";
  impl_->http.Get(any, adapt);
  impl_->http.Post(any, adapt);
  if (!ui_dir.empty()) impl_->http.set_mount_point("/ui", ui_dir);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->http.bind_to_any_port(host);
  } else if (!impl_->http.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error("BIND_FAILED", "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->http.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace minilab::server
