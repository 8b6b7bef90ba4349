#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "minilab/core/json.hpp"
#include "minilab/curation/curation.hpp"
#include "minilab/engine/service.hpp"
#include "minilab/gateway/pricing.hpp"

namespace minilab::server {

struct ApiRequest {
  std::string method;  // "GET", "POST"
  std::string path;    // without query string
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;

  Json json() const { return Json::parse(body); }
};

struct ApiDeps {
  engine::CampaignService* campaigns = nullptr;
  curation::CurationStore* curation = nullptr;
  const PriceTable* prices = nullptr;  // enables cost figures in /kpis
  std::function<Instant()> clock;      // default: wall clock
};

// REST surface for the campaign engine and the curation service, independent
// of the HTTP library. Errors come back as {"error": {"code", "message"}}.
//
//   POST /v1/campaigns                          spec, or {"spec", "now"}
//   GET  /v1/campaigns
//   POST /v1/campaigns/{id}/leads               lead, or {"lead", "now"}
//   POST /v1/campaigns/{id}/tick                {"now"}
//   GET  /v1/campaigns/{id}/state
//   GET  /v1/campaigns/{id}/kpis
//   POST /v1/campaigns/{id}/arms/{arm}/pause
//   POST /v1/campaigns/{id}/arms/{arm}/resume
//   GET  /v1/campaigns/{id}/leads/{lead}        memory plus merged timeline
//   POST /v1/campaigns/{id}/leads/{lead}/reply  {"now"}
//   POST /v1/events                             event (+ optional campaign_id)
//   POST /v1/jobs                               {"context", "teacher_backend", "n_candidates"}
//   GET  /v1/review/queue?limit=
//   POST /v1/review/{candidate_id}/decision     ReviewDecision
//   GET  /v1/review/stats
//   GET  /v1/gold/export?format=jsonl|manifest&campaign_id=&teacher_backend=&from=&to=
//
// "now" is integer seconds or RFC3339; absent means the clock.
class ApiRouter {
 public:
  explicit ApiRouter(ApiDeps deps);
  ApiResponse handle(const ApiRequest& req) const;

 private:
  ApiDeps deps_;
};

int http_status_for(const std::string& error_code);

// Blocking HTTP server around an ApiRouter. The HTTP library stays inside
// the implementation file.
class HttpServer {
 public:
  explicit HttpServer(const ApiRouter& router, std::string ui_dir = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port (an ephemeral one when port is 0). BIND_FAILED.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace minilab::server
