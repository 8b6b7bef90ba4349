#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>

#include "minilab/curation/curation.hpp"
#include "minilab/engine/service.hpp"
#include "minilab/server/api.hpp"
#include "support/fakes.hpp"

using namespace minilab;
using namespace minilab::server;
using testing_support::FakeClient;
using testing_support::make_lead;
using testing_support::make_spec;

namespace {

class ApiTest : public ::testing::Test {
 protected:
  ApiTest()
      : campaigns(client, {}),
        store(client),
        router(ApiDeps{&campaigns, &store, &prices, [this] { return at_seconds(clock_s); }}) {}

  ApiResponse call(const std::string& method, const std::string& path, const Json& body = nullptr,
                   std::map<std::string, std::string> query = {}) {
    return router.handle({method, path, std::move(query), body.is_null() ? "" : body.dump()});
  }

  void create_campaign_with_leads() {
    ASSERT_EQ(call("POST", "/v1/campaigns", Json{{"spec", make_spec({0, 60})}, {"now", 0}}).status, 201);
    ASSERT_EQ(call("POST", "/v1/campaigns/test-campaign/leads", Json{{"lead", make_lead("a1", "A")}, {"now", 0}}).status,
              201);
    ASSERT_EQ(call("POST", "/v1/campaigns/test-campaign/leads", make_lead("b1", "B")).status, 201);
  }

  FakeClient client;
  PriceTable prices{{"backend-A", make_price("1", "2")}, {"backend-B", make_price("0.5", "0.5")}};
  engine::CampaignService campaigns;
  curation::CurationStore store;
  std::int64_t clock_s = 0;
  ApiRouter router;
};

}  // namespace

TEST_F(ApiTest, Health) {
  const auto r = call("GET", "/v1/health");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.json().at("status"), "ok");
  EXPECT_EQ(call("GET", "/v2/health").status, 404);
  EXPECT_EQ(call("DELETE", "/v1/campaigns").status, 404);
}

TEST_F(ApiTest, CampaignLifecycle) {
  create_campaign_with_leads();
  EXPECT_EQ(call("GET", "/v1/campaigns").json().at("campaigns"), Json::array({"test-campaign"}));
  const auto sent = call("POST", "/v1/campaigns/test-campaign/tick", Json{{"now", "1970-01-01T00:00:00Z"}});
  ASSERT_EQ(sent.status, 200);
  EXPECT_EQ(sent.json().at("sent").size(), 2u);
  const auto state = call("GET", "/v1/campaigns/test-campaign/state").json();
  EXPECT_EQ(state.at("leads").size(), 2u);
  EXPECT_EQ(state.get<engine::CampaignState>(), campaigns.snapshot("test-campaign"));
}

TEST_F(ApiTest, ErrorsMapToStatusCodes) {
  create_campaign_with_leads();
  auto dup = call("POST", "/v1/campaigns", make_spec());
  EXPECT_EQ(dup.status, 409);
  EXPECT_EQ(dup.json().at("error").at("code"), "DUPLICATE_CAMPAIGN");
  EXPECT_EQ(call("POST", "/v1/campaigns/test-campaign/leads", make_lead("a1", "A")).status, 409);
  EXPECT_EQ(call("GET", "/v1/campaigns/nope/state").json().at("error").at("code"), "UNKNOWN_CAMPAIGN");
  EXPECT_EQ(call("GET", "/v1/campaigns/nope/state").status, 404);
  EXPECT_EQ(call("GET", "/v1/campaigns/test-campaign/leads/ghost").status, 404);
  EXPECT_EQ(router.handle({"POST", "/v1/campaigns", {}, "{not json"}).json().at("error").at("code"), "PARSE_ERROR");
  EXPECT_EQ(router.handle({"POST", "/v1/campaigns", {}, "{not json"}).status, 400);
  auto spec = make_spec();
  spec.id = "other";
  spec.steps.clear();
  EXPECT_EQ(call("POST", "/v1/campaigns", spec).json().at("error").at("code"), "EMPTY_SEQUENCE");
  EXPECT_EQ(call("POST", "/v1/campaigns/test-campaign/leads/a1/reply").status, 409);
  EXPECT_EQ(call("POST", "/v1/campaigns/test-campaign/tick", Json{{"now", "soon"}}).status, 400);
  EXPECT_EQ(http_status_for("TIMEOUT"), 502);
  EXPECT_EQ(http_status_for("IO_ERROR"), 500);
  EXPECT_EQ(http_status_for("INVALID_RATING"), 400);
}

TEST_F(ApiTest, PauseHaltsSendsAndResumeRestarts) {
  create_campaign_with_leads();
  const auto paused = call("POST", "/v1/campaigns/test-campaign/arms/A/pause");
  ASSERT_EQ(paused.status, 200);
  EXPECT_EQ(paused.json(), (Json{{"arm_id", "A"}, {"paused", true}}));
  for (int t = 0; t < 5; ++t) {
    const auto sent = call("POST", "/v1/campaigns/test-campaign/tick", Json{{"now", t * 100}}).json().at("sent");
    for (const auto& m : sent) EXPECT_NE(m.at("id").get<std::string>().rfind("a1:", 0), 0u);
  }
  EXPECT_TRUE(call("GET", "/v1/campaigns/test-campaign/leads/a1").json().at("memory").at("history").empty());
  const auto kpis = call("GET", "/v1/campaigns/test-campaign/kpis").json();
  EXPECT_TRUE(kpis.at("arms").at(0).at("paused").get<bool>());
  EXPECT_FALSE(kpis.at("arms").at(1).at("paused").get<bool>());

  EXPECT_EQ(call("POST", "/v1/campaigns/test-campaign/arms/A/resume").json().at("paused"), false);
  const auto sent = call("POST", "/v1/campaigns/test-campaign/tick", Json{{"now", 1000}}).json().at("sent");
  ASSERT_EQ(sent.size(), 1u);
  EXPECT_EQ(sent[0].at("id"), "a1:s0");
  EXPECT_EQ(call("POST", "/v1/campaigns/test-campaign/arms/Z/pause").status, 404);
}

TEST_F(ApiTest, KpisWithCosts) {
  create_campaign_with_leads();
  call("POST", "/v1/campaigns/test-campaign/tick", Json{{"now", 0}});
  EXPECT_EQ(call("POST", "/v1/events", Json{{"lead_id", "a1"}, {"kind", "delivered"}, {"timestamp", 1},
                                           {"message_ref", "a1:s0"}})
                .json()
                .at("stored"),
            true);
  call("POST", "/v1/events",
       Json{{"lead_id", "a1"}, {"kind", "open"}, {"timestamp", 2}, {"message_ref", "a1:s0"}, {"campaign_id", "test-campaign"}});
  const auto k = call("GET", "/v1/campaigns/test-campaign/kpis").json();
  const auto& a = k.at("arms").at(0);
  EXPECT_EQ(a.at("kpi").at("delivered"), 1);
  EXPECT_EQ(a.at("kpi").at("open_rate"), 100.0);
  EXPECT_TRUE(k.at("arms").at(1).at("kpi").is_null());
  const auto costs = engine::campaign_costs(campaigns.snapshot("test-campaign"), prices);
  EXPECT_EQ(a.at("cost"), costs.per_arm.at("A").to_string());
  EXPECT_EQ(k.at("cost_per_lead"), costs.mean_per_lead->to_string());
}

TEST_F(ApiTest, LeadViewWithTimelineAndReply) {
  create_campaign_with_leads();
  call("POST", "/v1/campaigns/test-campaign/tick", Json{{"now", 0}});
  call("POST", "/v1/events", Json{{"lead_id", "a1"}, {"kind", "delivered"}, {"timestamp", 0}, {"message_ref", "a1:s0"}});
  call("POST", "/v1/events",
       Json{{"lead_id", "a1"}, {"kind", "reply"}, {"timestamp", 30}, {"message_ref", "a1:s0"}, {"body", "yes please"}});
  const auto reply = call("POST", "/v1/campaigns/test-campaign/leads/a1/reply", Json{{"now", 40}});
  ASSERT_EQ(reply.status, 200);
  EXPECT_EQ(reply.json().at("id"), "a1:r1");
  const auto view = call("GET", "/v1/campaigns/test-campaign/leads/a1").json();
  const auto& tl = view.at("timeline");
  ASSERT_EQ(tl.size(), 3u);
  EXPECT_EQ(tl[0].at("id"), "a1:s0");
  EXPECT_EQ(tl[1].at("body"), "yes please");
  EXPECT_EQ(tl[2].at("id"), "a1:r1");
  EXPECT_EQ(view.at("cursor"), 1);
}

TEST_F(ApiTest, ReviewLoopExportsEditedTexts) {
  const Json job = call("POST", "/v1/jobs",
                        Json{{"context", {{"value_proposition", "vp"}, {"instructions", "write"}}},
                             {"teacher_backend", "teacher"},
                             {"n_candidates", 10},
                             {"now", 0}})
                       .json();
  ASSERT_EQ(job.at("candidates").size(), 10u);
  const auto queue = call("GET", "/v1/review/queue", nullptr, {{"limit", "100"}}).json().at("items");
  ASSERT_EQ(queue.size(), 10u);
  EXPECT_EQ(queue[0].at("teacher_backend"), "teacher");
  EXPECT_EQ(call("GET", "/v1/review/queue", nullptr, {{"limit", "3"}}).json().at("items").size(), 3u);

  // 3 edits, 2 rejects, 5 plain accepts.
  for (int i = 0; i < 10; ++i) {
    Json d{{"reviewer_id", "rev" + std::to_string(i % 3)}, {"ratings", {{"quality", 4}, {"relevance", 4}, {"accuracy", 5}}}};
    if (i < 3) {
      d["verdict"] = "accept_with_edit";
      d["edited_text"] = "edited text " + std::to_string(i);
    } else if (i < 5) {
      d["verdict"] = "reject";
    } else {
      d["verdict"] = "accept";
    }
    clock_s = 100 + i;
    const auto r = call("POST", "/v1/review/" + queue[i].at("id").get<std::string>() + "/decision", d);
    ASSERT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.json().at("status"), "applied");
  }
  const auto again = call("POST", "/v1/review/" + queue[0].at("id").get<std::string>() + "/decision",
                          Json{{"reviewer_id", "late"}, {"verdict", "reject"}, {"ratings", {{"quality", 1}, {"relevance", 1}, {"accuracy", 1}}}});
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(again.json().at("candidate").at("decision").at("reviewer_id"), "rev0");

  const auto ex = call("GET", "/v1/gold/export");
  EXPECT_EQ(ex.content_type, "application/x-ndjson");
  std::vector<Json> lines;
  std::istringstream in(ex.body);
  for (std::string l; std::getline(in, l);) lines.push_back(Json::parse(l));
  ASSERT_EQ(lines.size(), 8u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(lines[static_cast<std::size_t>(i)].at("output"), "edited text " + std::to_string(i));
  const auto manifest = call("GET", "/v1/gold/export", nullptr, {{"format", "manifest"}}).json();
  EXPECT_EQ(manifest.at("count"), 8);
  EXPECT_EQ(manifest.at("edited"), 3);
  EXPECT_DOUBLE_EQ(manifest.at("accept_rate").get<double>(), 80.0);
  const auto stats = call("GET", "/v1/review/stats").json();
  EXPECT_EQ(stats.at("pending_review"), 0);
  EXPECT_EQ(stats.at("decided"), 10);
  const auto window =
      call("GET", "/v1/gold/export", nullptr, {{"from", "1970-01-01T00:01:45Z"}, {"format", "manifest"}}).json();
  EXPECT_EQ(window.at("count"), 5);  // decisions at 105..109
}

TEST_F(ApiTest, DecisionValidation) {
  const Json job = call("POST", "/v1/jobs", Json{{"teacher_backend", "teacher"}, {"n_candidates", 1}}).json();
  const std::string id = job.at("candidate_ids").at(0);
  EXPECT_EQ(call("POST", "/v1/review/" + id + "/decision", Json{{"verdict", "maybe"}}).json().at("error").at("code"),
            "INVALID_DECISION");
  EXPECT_EQ(call("POST", "/v1/review/" + id + "/decision", Json{{"reviewer_id", "r"}, {"verdict", "accept_with_edit"}})
                .json()
                .at("error")
                .at("code"),
            "INVALID_DECISION");
  EXPECT_EQ(call("POST", "/v1/review/nope/decision",
                 Json{{"reviewer_id", "r"}, {"verdict", "accept"}, {"ratings", {{"quality", 3}, {"relevance", 3}, {"accuracy", 3}}}})
                .status,
            404);
  EXPECT_EQ(call("POST", "/v1/jobs", Json{{"teacher_backend", "teacher"}, {"n_candidates", 0}}).status, 400);
  EXPECT_EQ(call("GET", "/v1/gold/export", nullptr, {{"format", "csv"}}).status, 400);
}

TEST(ApiRouterAlone, MissingServicesAre404) {
  ApiRouter router(ApiDeps{});
  EXPECT_EQ(router.handle({"GET", "/v1/campaigns", {}, ""}).status, 404);
  EXPECT_EQ(router.handle({"GET", "/v1/review/stats", {}, ""}).status, 404);
  EXPECT_EQ(router.handle({"GET", "/v1/health", {}, ""}).status, 200);
}

TEST(HttpServerTest, ServesRouterOverHttp) {
  FakeClient client;
  engine::CampaignService campaigns(client, {});
  curation::CurationStore store(client);
  ApiRouter router(ApiDeps{&campaigns, &store, nullptr, [] { return at_seconds(0); }});
  HttpServer server(router);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });

  httplib::Client http("127.0.0.1", port);
  http.set_connection_timeout(5);
  // listen() may not be accepting yet on the first request.
  httplib::Result health;
  for (int i = 0; i < 50 && !health; ++i) {
    health = http.Get("/v1/health");
    if (!health) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  auto created = http.Post("/v1/campaigns", Json(make_spec()).dump(), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  auto paused = http.Post("/v1/campaigns/test-campaign/arms/B/pause", "", "application/json");
  ASSERT_TRUE(paused);
  EXPECT_EQ(Json::parse(paused->body).at("paused"), true);
  auto missing = http.Get("/v1/campaigns/ghost/state");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto queue = http.Get("/v1/review/queue?limit=5");
  ASSERT_TRUE(queue);
  EXPECT_EQ(Json::parse(queue->body).at("items").size(), 0u);

  server.stop();
  t.join();

  HttpServer second(router);
  EXPECT_EQ(testing_support::error_code_of([&] { second.bind("256.0.0.1", 1); }), "BIND_FAILED");
}
