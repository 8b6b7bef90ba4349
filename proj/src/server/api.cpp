#include "minilab/server/api.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "minilab/error.hpp"

namespace minilab::server {

namespace {

std::vector<std::string> segments(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

ApiResponse json_response(int status, const Json& j) { return {status, "application/json", j.dump()}; }

ApiResponse error_response(const Error& e) {
  Json err{{"code", e.code()}, {"message", e.what()}};
  if (e.detail() != 0) err["detail"] = e.detail();
  return json_response(http_status_for(e.code()), Json{{"error", err}});
}

Json body_json(const ApiRequest& req) {
  if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  return json_util::parse_text(req.body, "request body");
}

Instant parse_instant(const Json& v) {
  if (v.is_number_integer()) return at_seconds(v.get<std::int64_t>());
  if (v.is_string()) return parse_rfc3339(v.get<std::string>());
  throw Error("PARSE_ERROR", "time must be integer seconds or an RFC3339 string");
}

std::optional<std::string> query(const ApiRequest& req, const char* key) {
  auto it = req.query.find(key);
  if (it == req.query.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

Json timeline(const engine::LeadState& ls) {
  std::vector<const MessageRecord*> all;
  for (const auto& m : ls.memory.history) all.push_back(&m);
  for (const auto& m : ls.memory.inbound) all.push_back(&m);
  std::stable_sort(all.begin(), all.end(),
                   [](const MessageRecord* a, const MessageRecord* b) { return a->timestamp < b->timestamp; });
  Json out = Json::array();
  for (const auto* m : all) out.push_back(*m);
  return out;
}

Json candidate_view(const curation::Candidate& c, const curation::CurationStore& store) {
  Json j = c;
  if (auto job = store.job(c.job_id)) {
    j["context"] = job->context;
    j["teacher_backend"] = job->teacher_backend;
  }
  return j;
}

}  // namespace

int http_status_for(const std::string& code) {
  static const std::set<std::string> not_found = {"UNKNOWN_CAMPAIGN", "UNKNOWN_LEAD", "UNKNOWN_MESSAGE",
                                                   "UNKNOWN_ARM", "UNKNOWN_CANDIDATE", "UNKNOWN_BACKEND",
                                                   "NOT_FOUND"};
  static const std::set<std::string> conflict = {"DUPLICATE_CAMPAIGN", "DUPLICATE_LEAD", "ALREADY_DECIDED",
                                                  "WRONG_STATE", "NOT_DELIVERED", "AMBIGUOUS_LEAD"};
  static const std::set<std::string> upstream = {"TIMEOUT", "BACKEND_ERROR", "EXHAUSTED_RETRIES"};
  if (not_found.count(code)) return 404;
  if (conflict.count(code)) return 409;
  if (upstream.count(code)) return 502;
  if (code == "IO_ERROR" || code == "INTERNAL") return 500;
  if (code == "METHOD_NOT_ALLOWED") return 405;
  return 400;
}

ApiRouter::ApiRouter(ApiDeps deps) : deps_(std::move(deps)) {
  if (!deps_.clock) deps_.clock = [] { return wall_clock_now(); };
}

ApiResponse ApiRouter::handle(const ApiRequest& req) const {
  try {
    const auto seg = segments(req.path);
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    auto now_from = [&](const Json& j) {
      auto it = j.find("now");
      return (it == j.end() || it->is_null()) ? deps_.clock() : parse_instant(*it);
    };
    auto need_campaigns = [&]() -> engine::CampaignService& {
      if (!deps_.campaigns) throw Error("NOT_FOUND", "campaign service is not enabled");
      return *deps_.campaigns;
    };
    auto need_curation = [&]() -> curation::CurationStore& {
      if (!deps_.curation) throw Error("NOT_FOUND", "curation service is not enabled");
      return *deps_.curation;
    };
    auto no_route = [&]() -> ApiResponse {
      throw Error("NOT_FOUND", "no route for " + req.method + " " + req.path);
    };

    if (seg.size() == 2 && seg[0] == "v1" && seg[1] == "health" && get) {
      return json_response(200, Json{{"status", "ok"}});
    }
    if (seg.size() < 2 || seg[0] != "v1") return no_route();

    // Campaign engine
    if (seg[1] == "campaigns") {
      auto& svc = need_campaigns();
      if (seg.size() == 2 && post) {
        const Json j = body_json(req);
        const Json& spec_json = j.contains("spec") ? j.at("spec") : j;
        const auto spec = json_util::decode<CampaignSpec>(spec_json, "campaign spec");
        return json_response(201, svc.create_campaign(spec, now_from(j)));
      }
      if (seg.size() == 2 && get) return json_response(200, Json{{"campaigns", svc.campaign_ids()}});
      const std::string& id = seg[2];
      if (seg.size() == 4 && seg[3] == "state" && get) return json_response(200, svc.snapshot(id));
      if (seg.size() == 4 && seg[3] == "tick" && post) {
        const Json j = body_json(req);
        return json_response(200, Json{{"sent", svc.tick(id, now_from(j))}});
      }
      if (seg.size() == 4 && seg[3] == "leads" && post) {
        const Json j = body_json(req);
        const auto lead = json_util::decode<Lead>(j.contains("lead") ? j.at("lead") : j, "lead");
        return json_response(201, svc.add_lead(id, lead, now_from(j)));
      }
      if (seg.size() == 4 && seg[3] == "kpis" && get) {
        Json arms = Json::array();
        std::optional<engine::CampaignCosts> costs;
        if (deps_.prices) {
          try {
            costs = engine::campaign_costs(svc.snapshot(id), *deps_.prices);
          } catch (const Error& e) {
            if (e.code() != "UNKNOWN_BACKEND") throw;
          }
        }
        for (const auto& a : svc.arm_kpis(id)) {
          Json k{{"arm_id", a.arm_id}, {"paused", a.paused}, {"leads", a.leads}, {"kpi", nullptr}};
          if (a.kpi) {
            k["kpi"] = Json{{"delivered", a.kpi->delivered},   {"opens", a.kpi->opens},
                            {"clicks", a.kpi->clicks},         {"replies", a.kpi->replies},
                            {"unsubscribes", a.kpi->unsubscribes}, {"open_rate", a.kpi->open_rate},
                            {"ctr", a.kpi->ctr},               {"reply_rate", a.kpi->reply_rate},
                            {"unsub_rate", a.kpi->unsub_rate}};
          }
          if (costs && a.leads > 0) {
            const Money c = costs->per_arm[a.arm_id];
            k["cost"] = c.to_string();
            k["cost_per_lead"] = c.divided_by(static_cast<std::int64_t>(a.leads)).to_string();
          }
          arms.push_back(std::move(k));
        }
        Json out{{"campaign_id", id}, {"arms", arms}};
        if (costs && costs->mean_per_lead) out["cost_per_lead"] = costs->mean_per_lead->to_string();
        return json_response(200, out);
      }
      if (seg.size() == 6 && seg[3] == "arms" && post && (seg[5] == "pause" || seg[5] == "resume")) {
        if (seg[5] == "pause") {
          svc.pause_arm(id, seg[4]);
        } else {
          svc.resume_arm(id, seg[4]);
        }
        return json_response(200, Json{{"arm_id", seg[4]}, {"paused", seg[5] == "pause"}});
      }
      if (seg.size() == 5 && seg[3] == "leads" && get) {
        const auto ls = svc.lead(id, seg[4]);
        Json j = ls;
        j["timeline"] = timeline(ls);
        return json_response(200, j);
      }
      if (seg.size() == 6 && seg[3] == "leads" && seg[5] == "reply" && post) {
        const Json j = body_json(req);
        return json_response(200, Json(svc.draft_reply(id, seg[4], now_from(j))));
      }
      return no_route();
    }

    if (seg.size() == 2 && seg[1] == "events" && post) {
      auto& svc = need_campaigns();
      const Json j = body_json(req);
      const auto ev = json_util::decode<EngagementEvent>(j, "event");
      std::optional<std::string> cid;
      if (auto it = j.find("campaign_id"); it != j.end() && it->is_string()) cid = it->get<std::string>();
      const bool stored = svc.ingest_event(cid, ev);
      return json_response(200, Json{{"stored", stored}});
    }

    // Curation
    if (seg.size() == 2 && seg[1] == "jobs" && post) {
      auto& store = need_curation();
      const Json j = body_json(req);
      const auto ctx = json_util::decode<curation::PromptContext>(j.value("context", Json::object()), "context");
      const std::string backend = j.value("teacher_backend", "");
      const auto n = j.value("n_candidates", std::int64_t{1});
      if (n < 0) throw Error("INVALID_JOB", "n_candidates must be at least 1");
      const auto job = store.enqueue_job(ctx, backend, static_cast<std::size_t>(n), now_from(j));
      Json cands = Json::array();
      for (const auto& cid : job.candidate_ids) cands.push_back(*store.candidate(cid));
      Json out = job;
      out["candidates"] = cands;
      return json_response(201, out);
    }
    if (seg[1] == "review") {
      auto& store = need_curation();
      if (seg.size() == 3 && seg[2] == "queue" && get) {
        std::size_t limit = 20;
        if (auto l = query(req, "limit")) {
          try {
            limit = std::stoul(*l);
          } catch (const std::exception&) {
            throw Error("INVALID_ARGUMENT", "limit must be a non-negative integer");
          }
        }
        Json items = Json::array();
        for (const auto& c : store.queue(limit)) items.push_back(candidate_view(c, store));
        return json_response(200, Json{{"items", items}});
      }
      if (seg.size() == 3 && seg[2] == "stats" && get) return json_response(200, curation::to_json_value(store.queue_stats()));
      if (seg.size() == 4 && seg[3] == "decision" && post) {
        Json j = body_json(req);
        if (!j.contains("decided_at") || j.at("decided_at").is_null()) j["decided_at"] = to_seconds(deps_.clock());
        if (!j.contains("version")) j["version"] = 1;
        curation::ReviewDecision d;
        try {
          d = j.get<curation::ReviewDecision>();
        } catch (const nlohmann::json::exception& e) {
          throw Error("INVALID_DECISION", e.what());
        }
        const auto res = store.submit_decision(seg[2], d);
        if (res.status == curation::DecisionStatus::already_decided) {
          return json_response(409, Json{{"error", {{"code", "ALREADY_DECIDED"}, {"message", "candidate already decided"}}},
                                         {"candidate", res.candidate}});
        }
        return json_response(200, Json{{"status", "applied"}, {"candidate", res.candidate}});
      }
      return no_route();
    }
    if (seg.size() == 3 && seg[1] == "gold" && seg[2] == "export" && get) {
      auto& store = need_curation();
      curation::ExportFilter f;
      f.campaign_id = query(req, "campaign_id");
      f.teacher_backend = query(req, "teacher_backend");
      if (auto v = query(req, "from")) f.decided_from = parse_rfc3339(*v);
      if (auto v = query(req, "to")) f.decided_to = parse_rfc3339(*v);
      const auto res = store.export_gold(f);
      const std::string format = query(req, "format").value_or("jsonl");
      if (format == "manifest") return json_response(200, res.manifest);
      if (format != "jsonl") throw Error("INVALID_ARGUMENT", "format must be jsonl or manifest");
      return {200, "application/x-ndjson", res.jsonl};
    }
    return no_route();
  } catch (const Error& e) {
    return error_response(e);
  } catch (const nlohmann::json::exception& e) {
    return error_response(Error("PARSE_ERROR", e.what()));
  } catch (const std::exception& e) {
    return error_response(Error("INTERNAL", e.what()));
  }
}

}  // namespace minilab::server
