#include "minilab/curation/curation.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <tuple>

#include "minilab/error.hpp"

namespace minilab::curation {

namespace {

std::string numbered(const char* prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

std::uint64_t number_of(const std::string& id) {
  const auto dash = id.rfind('-');
  if (dash == std::string::npos) return 0;
  try {
    return std::stoull(id.substr(dash + 1));
  } catch (const std::exception&) {
    return 0;
  }
}

bool is_accept(Verdict v) { return v != Verdict::reject; }

void append_list(std::string& out, const char* title, const std::vector<std::string>& items) {
  if (items.empty()) return;
  out += title;
  out += ":\n";
  for (const auto& it : items) out += "- " + it + "\n";
}

std::optional<double> mean_of(double sum, std::size_t n) {
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

const char* to_string(JobStatus s) {
  switch (s) {
    case JobStatus::pending: return "pending";
    case JobStatus::generated: return "generated";
    case JobStatus::reviewed: return "reviewed";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::accept: return "accept";
    case Verdict::accept_with_edit: return "accept_with_edit";
    case Verdict::reject: return "reject";
  }
  return "?";
}

JobStatus parse_job_status(const std::string& s) {
  if (s == "pending") return JobStatus::pending;
  if (s == "generated") return JobStatus::generated;
  if (s == "reviewed") return JobStatus::reviewed;
  throw Error("PARSE_ERROR", "unknown job status '" + s + "'");
}

Verdict parse_verdict(const std::string& s) {
  if (s == "accept") return Verdict::accept;
  if (s == "accept_with_edit") return Verdict::accept_with_edit;
  if (s == "reject") return Verdict::reject;
  throw Error("INVALID_DECISION", "unknown verdict '" + s + "'");
}

void to_json(Json& j, const PromptContext& v) {
  j = Json{{"value_proposition", v.value_proposition},
           {"pain_points", v.pain_points},
           {"research_goals", v.research_goals},
           {"dossier_excerpt", v.dossier_excerpt},
           {"instructions", v.instructions}};
  if (!v.campaign_id.empty()) j["campaign_id"] = v.campaign_id;
}

void from_json(const Json& j, PromptContext& v) {
  v.campaign_id = j.value("campaign_id", "");
  v.value_proposition = j.value("value_proposition", "");
  v.pain_points = j.value("pain_points", std::vector<std::string>{});
  v.research_goals = j.value("research_goals", std::vector<std::string>{});
  v.dossier_excerpt = j.value("dossier_excerpt", "");
  v.instructions = j.value("instructions", "");
}

void to_json(Json& j, const GenerationFailure& v) {
  j = Json{{"index", v.index}, {"code", v.code}, {"message", v.message}};
}

void from_json(const Json& j, GenerationFailure& v) {
  v.index = j.at("index").get<std::size_t>();
  v.code = j.at("code").get<std::string>();
  v.message = j.value("message", "");
}

void to_json(Json& j, const GenerationJob& v) {
  j = Json{{"id", v.id},
           {"context", v.context},
           {"teacher_backend", v.teacher_backend},
           {"n_candidates", v.n_candidates},
           {"status", to_string(v.status)},
           {"created_at", to_seconds(v.created_at)},
           {"candidate_ids", v.candidate_ids},
           {"failures", v.failures}};
}

void from_json(const Json& j, GenerationJob& v) {
  v.id = j.at("id").get<std::string>();
  v.context = j.at("context").get<PromptContext>();
  v.teacher_backend = j.at("teacher_backend").get<std::string>();
  v.n_candidates = j.at("n_candidates").get<std::size_t>();
  v.status = parse_job_status(j.at("status").get<std::string>());
  v.created_at = at_seconds(j.at("created_at").get<std::int64_t>());
  v.candidate_ids = j.value("candidate_ids", std::vector<std::string>{});
  v.failures = j.value("failures", std::vector<GenerationFailure>{});
}

void to_json(Json& j, const Ratings& v) {
  j = Json{{"quality", v.quality}, {"relevance", v.relevance}, {"accuracy", v.accuracy}};
}

void from_json(const Json& j, Ratings& v) {
  v.quality = j.at("quality").get<int>();
  v.relevance = j.at("relevance").get<int>();
  v.accuracy = j.at("accuracy").get<int>();
}

void to_json(Json& j, const ReviewDecision& v) {
  j = Json{{"reviewer_id", v.reviewer_id},
           {"verdict", to_string(v.verdict)},
           {"ratings", v.ratings},
           {"decided_at", to_rfc3339(v.decided_at)},
           {"version", v.version}};
  if (v.edited_text) j["edited_text"] = *v.edited_text;
}

void from_json(const Json& j, ReviewDecision& v) {
  v.reviewer_id = j.at("reviewer_id").get<std::string>();
  v.verdict = parse_verdict(j.at("verdict").get<std::string>());
  v.edited_text = json_util::get_optional<std::string>(j, "edited_text");
  v.ratings = j.at("ratings").get<Ratings>();
  const Json& at = j.at("decided_at");
  v.decided_at = at.is_string() ? parse_rfc3339(at.get<std::string>()) : at_seconds(at.get<std::int64_t>());
  v.version = j.value("version", 1);
}

void to_json(Json& j, const Candidate& v) {
  j = Json{{"id", v.id},
           {"job_id", v.job_id},
           {"text", v.text},
           {"usage", v.usage},
           {"created_at", to_seconds(v.created_at)},
           {"decision", v.decision ? Json(*v.decision) : Json(nullptr)}};
}

void from_json(const Json& j, Candidate& v) {
  v.id = j.at("id").get<std::string>();
  v.job_id = j.at("job_id").get<std::string>();
  v.text = j.at("text").get<std::string>();
  v.usage = j.at("usage").get<UsageRecord>();
  v.created_at = at_seconds(j.at("created_at").get<std::int64_t>());
  v.decision = json_util::get_optional<ReviewDecision>(j, "decision");
}

void to_json(Json& j, const GoldPair& v) {
  j = Json{{"instruction", v.instruction},
           {"input", v.input},
           {"output", v.output},
           {"meta",
            {{"teacher_backend", v.teacher_backend},
             {"reviewer_id", v.reviewer_id},
             {"job_id", v.job_id},
             {"decided_at", to_rfc3339(v.decided_at)}}},
           {"candidate_id", v.candidate_id},
           {"edited", v.edited}};
}

std::string gold_jsonl_line(const GoldPair& g) {
  nlohmann::ordered_json meta;
  meta["teacher_backend"] = g.teacher_backend;
  meta["reviewer_id"] = g.reviewer_id;
  meta["job_id"] = g.job_id;
  meta["decided_at"] = to_rfc3339(g.decided_at);
  nlohmann::ordered_json line;
  line["instruction"] = g.instruction;
  line["input"] = g.input;
  line["output"] = g.output;
  line["meta"] = std::move(meta);
  return line.dump();
}

GoldPair parse_gold_jsonl_line(const std::string& line) {
  auto fail = [](const std::string& why) -> GoldPair { throw Error("INVALID_GOLD_LINE", why); };
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    return fail(e.what());
  }
  static const std::vector<std::string> kTop = {"instruction", "input", "output", "meta"};
  static const std::vector<std::string> kMeta = {"teacher_backend", "reviewer_id", "job_id", "decided_at"};
  auto exact_keys = [](const nlohmann::ordered_json& o, const std::vector<std::string>& keys) {
    if (!o.is_object() || o.size() != keys.size()) return false;
    std::size_t i = 0;
    for (auto it = o.begin(); it != o.end(); ++it, ++i) {
      if (it.key() != keys[i]) return false;
    }
    return true;
  };
  if (!exact_keys(j, kTop)) return fail("top-level keys must be instruction, input, output, meta");
  const auto& meta = j["meta"];
  if (!exact_keys(meta, kMeta)) return fail("meta keys must be teacher_backend, reviewer_id, job_id, decided_at");
  for (const auto& k : {"instruction", "input", "output"}) {
    if (!j[k].is_string()) return fail(std::string(k) + " must be a string");
  }
  for (const auto& k : kMeta) {
    if (!meta[k].is_string()) return fail("meta." + k + " must be a string");
  }
  GoldPair g;
  g.instruction = j["instruction"].get<std::string>();
  g.input = j["input"].get<std::string>();
  g.output = j["output"].get<std::string>();
  if (g.output.empty()) return fail("output is empty");
  g.teacher_backend = meta["teacher_backend"].get<std::string>();
  g.reviewer_id = meta["reviewer_id"].get<std::string>();
  g.job_id = meta["job_id"].get<std::string>();
  try {
    g.decided_at = parse_rfc3339(meta["decided_at"].get<std::string>());
  } catch (const Error& e) {
    return fail(std::string("decided_at: ") + e.what());
  }
  return g;
}

std::string assemble_instruction(const PromptContext& ctx) {
  std::string out = ctx.instructions.empty()
                        ? "Write a tailored cold outreach email to the prospect described below."
                        : ctx.instructions;
  out += "\nUse the research to personalise the message. Start with a line \"Subject: ...\".";
  return out;
}

std::string assemble_input(const PromptContext& ctx) {
  std::string out;
  if (!ctx.value_proposition.empty()) out += "Value proposition: " + ctx.value_proposition + "\n";
  append_list(out, "Pain points", ctx.pain_points);
  append_list(out, "Research goals", ctx.research_goals);
  if (!ctx.dossier_excerpt.empty()) out += "Prospect research:\n" + ctx.dossier_excerpt + "\n";
  return out;
}

ChatRequest build_generation_request(const PromptContext& ctx) {
  ChatRequest req;
  req.tag = {"", UsagePurpose::curation};
  req.messages.push_back({Role::system, assemble_instruction(ctx)});
  req.messages.push_back({Role::user, assemble_input(ctx)});
  return req;
}

void validate_decision(const ReviewDecision& d) {
  if (d.reviewer_id.empty()) throw Error("INVALID_DECISION", "reviewer_id is required");
  if (d.version != 1) throw Error("INVALID_DECISION", "decision version must be 1");
  for (int r : {d.ratings.quality, d.ratings.relevance, d.ratings.accuracy}) {
    if (r < 1 || r > 5) throw Error("INVALID_DECISION", "ratings must be integers in 1..5");
  }
  const bool edit = d.verdict == Verdict::accept_with_edit;
  if (edit && (!d.edited_text || d.edited_text->empty())) {
    throw Error("INVALID_DECISION", "accept_with_edit requires a non-empty edited_text");
  }
  if (!edit && d.edited_text) throw Error("INVALID_DECISION", "edited_text is only allowed with accept_with_edit");
}

Json to_json_value(const QueueStats& s) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  return Json{{"pending_review", s.pending_review},
              {"decided", s.decided},
              {"per_reviewer", s.per_reviewer},
              {"mean_ratings",
               {{"quality", opt(s.mean_quality)},
                {"relevance", opt(s.mean_relevance)},
                {"accuracy", opt(s.mean_accuracy)}}}};
}

CurationStore::CurationStore(ChatClient& client, CurationOptions opts) : client_(client), opts_(std::move(opts)) {}

std::size_t CurationStore::load() {
  std::unique_lock lk(mu_);
  if (opts_.log_path.empty()) return 0;
  std::size_t n = 0;
  if (std::filesystem::exists(opts_.log_path)) {
    std::ifstream in(opts_.log_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      apply(json_util::parse_text(line, opts_.log_path.c_str()));
      ++n;
    }
  }
  log_.open(opts_.log_path, std::ios::app);
  return n;
}

void CurationStore::append_log(const Json& e) {
  if (opts_.log_path.empty()) return;
  if (!log_.is_open()) log_.open(opts_.log_path, std::ios::app);
  log_ << e.dump() << '\n';
  log_.flush();
  if (!log_) throw Error("IO_ERROR", "failed to append to " + opts_.log_path);
}

GoldPair CurationStore::make_gold(const Candidate& c, const GenerationJob& job) const {
  const ReviewDecision& d = *c.decision;
  GoldPair g;
  g.instruction = assemble_instruction(job.context);
  g.input = assemble_input(job.context);
  g.output = d.verdict == Verdict::accept_with_edit ? *d.edited_text : c.text;
  g.teacher_backend = job.teacher_backend;
  g.reviewer_id = d.reviewer_id;
  g.job_id = job.id;
  g.decided_at = d.decided_at;
  g.candidate_id = c.id;
  g.edited = d.verdict == Verdict::accept_with_edit;
  return g;
}

void CurationStore::refresh_job_status(GenerationJob& job) {
  if (job.status != JobStatus::generated || job.candidate_ids.empty()) return;
  const bool all = std::all_of(job.candidate_ids.begin(), job.candidate_ids.end(),
                               [&](const std::string& id) { return candidates_.at(id).decision.has_value(); });
  if (all) job.status = JobStatus::reviewed;
}

void CurationStore::apply(const Json& e) {
  const std::string type = e.at("type").get<std::string>();
  if (type == "job") {
    GenerationJob job = e.at("job").get<GenerationJob>();
    for (const auto& cj : e.at("candidates")) {
      Candidate c = cj.get<Candidate>();
      next_candidate_ = std::max(next_candidate_, number_of(c.id) + 1);
      candidate_order_.push_back(c.id);
      candidates_[c.id] = std::move(c);
    }
    next_job_ = std::max(next_job_, number_of(job.id) + 1);
    jobs_[job.id] = std::move(job);
  } else if (type == "decision") {
    Candidate& c = candidates_.at(e.at("candidate_id").get<std::string>());
    if (c.decision) return;
    c.decision = e.at("decision").get<ReviewDecision>();
    GenerationJob& job = jobs_.at(c.job_id);
    if (is_accept(c.decision->verdict)) gold_[c.id] = make_gold(c, job);
    refresh_job_status(job);
  } else {
    throw Error("PARSE_ERROR", "unknown curation log entry '" + type + "'");
  }
}

GenerationJob CurationStore::enqueue_job(const PromptContext& ctx, const std::string& teacher_backend,
                                         std::size_t n_candidates, Instant now) {
  if (n_candidates == 0) throw Error("INVALID_JOB", "n_candidates must be at least 1");
  if (teacher_backend.empty()) throw Error("INVALID_JOB", "teacher_backend is required");
  if (auto* gw = dynamic_cast<ModelGateway*>(&client_); gw && !gw->has_backend(teacher_backend)) {
    throw Error("UNKNOWN_BACKEND", "backend '" + teacher_backend + "' is not registered");
  }

  const ChatRequest req = build_generation_request(ctx);
  std::vector<std::pair<std::string, UsageRecord>> texts;
  std::vector<GenerationFailure> failures;
  for (std::size_t i = 0; i < n_candidates; ++i) {
    try {
      ChatResponse r = client_.complete(teacher_backend, req);
      r.usage.timestamp = now;
      texts.emplace_back(std::move(r.text), r.usage);
    } catch (const Error& e) {
      failures.push_back({i, e.code(), e.what()});
    }
  }

  std::unique_lock lk(mu_);
  GenerationJob job;
  job.id = numbered("job", next_job_);
  job.context = ctx;
  job.teacher_backend = teacher_backend;
  job.n_candidates = n_candidates;
  job.status = JobStatus::generated;
  job.created_at = now;
  job.failures = std::move(failures);
  Json cands = Json::array();
  for (auto& [text, usage] : texts) {
    Candidate c;
    c.id = numbered("cand", next_candidate_ + job.candidate_ids.size());
    c.job_id = job.id;
    c.text = std::move(text);
    c.usage = usage;
    c.created_at = now;
    job.candidate_ids.push_back(c.id);
    cands.push_back(c);
  }
  const Json entry{{"type", "job"}, {"job", job}, {"candidates", cands}};
  append_log(entry);
  apply(entry);
  return job;
}

DecisionResult CurationStore::submit_decision(const std::string& candidate_id, const ReviewDecision& decision) {
  validate_decision(decision);
  std::unique_lock lk(mu_);
  auto it = candidates_.find(candidate_id);
  if (it == candidates_.end()) throw Error("UNKNOWN_CANDIDATE", "no candidate '" + candidate_id + "'");
  if (it->second.decision) return {DecisionStatus::already_decided, it->second};
  const Json entry{{"type", "decision"}, {"candidate_id", candidate_id}, {"decision", decision}};
  append_log(entry);
  apply(entry);
  return {DecisionStatus::applied, it->second};
}

std::vector<Candidate> CurationStore::queue(std::size_t limit) const {
  std::shared_lock lk(mu_);
  std::vector<Candidate> out;
  for (const auto& id : candidate_order_) {
    if (out.size() >= limit) break;
    const Candidate& c = candidates_.at(id);
    if (!c.decision) out.push_back(c);
  }
  return out;
}

QueueStats CurationStore::queue_stats() const {
  std::shared_lock lk(mu_);
  QueueStats s;
  double q = 0, r = 0, a = 0;
  for (const auto& [id, c] : candidates_) {
    if (!c.decision) {
      ++s.pending_review;
      continue;
    }
    ++s.decided;
    ++s.per_reviewer[c.decision->reviewer_id];
    q += c.decision->ratings.quality;
    r += c.decision->ratings.relevance;
    a += c.decision->ratings.accuracy;
  }
  s.mean_quality = mean_of(q, s.decided);
  s.mean_relevance = mean_of(r, s.decided);
  s.mean_accuracy = mean_of(a, s.decided);
  return s;
}

StoreCounts CurationStore::counts() const {
  std::shared_lock lk(mu_);
  StoreCounts s;
  s.candidates = candidates_.size();
  for (const auto& [id, c] : candidates_) {
    if (!c.decision) {
      ++s.undecided;
    } else if (c.decision->verdict == Verdict::accept) {
      ++s.accepted;
    } else if (c.decision->verdict == Verdict::accept_with_edit) {
      ++s.edited;
    } else {
      ++s.rejected;
    }
  }
  s.gold = gold_.size();
  return s;
}

ExportResult CurationStore::export_gold(const ExportFilter& filter) const {
  std::shared_lock lk(mu_);
  auto matches = [&](const Candidate& c) {
    const GenerationJob& job = jobs_.at(c.job_id);
    if (filter.campaign_id && job.context.campaign_id != *filter.campaign_id) return false;
    if (filter.teacher_backend && job.teacher_backend != *filter.teacher_backend) return false;
    if (c.decision) {
      if (filter.decided_from && c.decision->decided_at < *filter.decided_from) return false;
      if (filter.decided_to && !(c.decision->decided_at < *filter.decided_to)) return false;
    }
    return true;
  };

  ExportResult out;
  std::size_t decided = 0, accepted = 0, edited = 0, rejected = 0;
  std::map<std::string, std::size_t> reviewers;
  for (const auto& [id, c] : candidates_) {
    if (!c.decision || !matches(c)) continue;
    ++decided;
    switch (c.decision->verdict) {
      case Verdict::accept: ++accepted; break;
      case Verdict::accept_with_edit: ++edited; break;
      case Verdict::reject: ++rejected; break;
    }
    if (auto g = gold_.find(id); g != gold_.end()) {
      out.pairs.push_back(g->second);
      ++reviewers[g->second.reviewer_id];
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const GoldPair& a, const GoldPair& b) {
    return std::tie(a.decided_at, a.candidate_id) < std::tie(b.decided_at, b.candidate_id);
  });
  for (const auto& g : out.pairs) out.jsonl += gold_jsonl_line(g) + "\n";

  Json f = Json::object();
  if (filter.campaign_id) f["campaign_id"] = *filter.campaign_id;
  if (filter.teacher_backend) f["teacher_backend"] = *filter.teacher_backend;
  if (filter.decided_from) f["from"] = to_rfc3339(*filter.decided_from);
  if (filter.decided_to) f["to"] = to_rfc3339(*filter.decided_to);
  out.manifest = Json{{"count", out.pairs.size()},
                      {"reviewers", reviewers},
                      {"decided", decided},
                      {"accepted", accepted},
                      {"edited", edited},
                      {"rejected", rejected},
                      {"accept_rate", decided ? Json(100.0 * static_cast<double>(accepted + edited) /
                                                     static_cast<double>(decided))
                                              : Json(nullptr)},
                      {"filter", f}};
  return out;
}

std::optional<Candidate> CurationStore::candidate(const std::string& id) const {
  std::shared_lock lk(mu_);
  auto it = candidates_.find(id);
  if (it == candidates_.end()) return std::nullopt;
  return it->second;
}

std::optional<GenerationJob> CurationStore::job(const std::string& id) const {
  std::shared_lock lk(mu_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

std::vector<Candidate> CurationStore::candidates() const {
  std::shared_lock lk(mu_);
  std::vector<Candidate> out;
  for (const auto& id : candidate_order_) out.push_back(candidates_.at(id));
  return out;
}

std::vector<GoldPair> CurationStore::gold() const {
  std::shared_lock lk(mu_);
  std::vector<GoldPair> out;
  for (const auto& [id, g] : gold_) out.push_back(g);
  return out;
}

}  // namespace minilab::curation
