#include "minilab/engine/state.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "minilab/error.hpp"

namespace minilab::engine {

namespace {

Json opt_instant(const std::optional<Instant>& t) { return t ? Json(to_seconds(*t)) : Json(nullptr); }

std::optional<Instant> get_instant(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return at_seconds(it->get<std::int64_t>());
}

Instant instant_at(const Json& j, const char* key) { return at_seconds(j.at(key).get<std::int64_t>()); }

const char* to_string(ActionKind k) { return k == ActionKind::send_step ? "send_step" : "send_reply"; }

ActionKind parse_action_kind(const std::string& s) {
  if (s == "send_step") return ActionKind::send_step;
  if (s == "send_reply") return ActionKind::send_reply;
  throw Error("PARSE_ERROR", "unknown action kind '" + s + "'");
}

LeadState& lead_of(CampaignState& state, const std::string& id) {
  auto it = state.leads.find(id);
  if (it == state.leads.end()) throw Error("UNKNOWN_LEAD", "no lead '" + id + "'");
  return it->second;
}

// Moves the cursor to the first unsent step, due `now + delay`, or DONE.
void resume_sequence(const CampaignSpec& spec, LeadState& ls, Instant now) {
  ls.pending.reset();
  if (ls.next_step < spec.steps.size()) {
    const Instant due = now + spec.steps[ls.next_step].delay;
    ls.cursor = Cursor::at(ls.next_step);
    ls.next_due = due;
    ls.pending = ScheduledAction{ls.lead.id, ActionKind::send_step, ls.next_step, due, now};
  } else {
    ls.cursor = Cursor::done();
    ls.next_due.reset();
  }
}

bool same_event(const EngagementEvent& a, const EngagementEvent& b) {
  return a.kind == b.kind && a.message_ref == b.message_ref && a.lead_id == b.lead_id;
}

void apply_event(CampaignState& state, const EngagementEvent& ev) {
  LeadState& ls = lead_of(state, ev.lead_id);
  if (is_idempotent(ev.kind)) {
    for (const auto& e : ls.events) {
      if (same_event(e, ev)) return;
    }
  }
  ls.events.push_back(ev);

  if (ev.kind == EventKind::unsubscribe) {
    ls.unsubscribed = true;
    ls.cursor = Cursor::done();
    ls.next_due.reset();
    ls.pending.reset();
    return;
  }
  if (ev.kind != EventKind::reply) return;

  MessageRecord in;
  in.id = ev.lead_id + ":in" + std::to_string(ls.memory.inbound.size() + 1);
  in.direction = Direction::inbound;
  if (const MessageRecord* ref = find_message(ls, ev.message_ref)) in.channel = ref->channel;
  in.body = ev.body.value_or("");
  in.timestamp = ev.timestamp;
  ls.memory.inbound.push_back(std::move(in));

  if (ls.unsubscribed) return;
  if (ls.cursor.kind == CursorKind::step || ls.cursor.kind == CursorKind::done) {
    ls.cursor = Cursor::paused();
    ls.next_due.reset();
    ls.failed_attempts = 0;
    ls.pending = ScheduledAction{ls.lead.id, ActionKind::send_reply, 0, ev.timestamp, ev.timestamp};
  }
}

}  // namespace

std::string to_string(const Cursor& c) {
  switch (c.kind) {
    case CursorKind::step: return std::to_string(c.step);
    case CursorKind::done: return "DONE";
    case CursorKind::paused_for_reply: return "PAUSED_FOR_REPLY";
    case CursorKind::failed: return "FAILED";
  }
  return "?";
}

Cursor parse_cursor(const std::string& s) {
  if (s == "DONE") return Cursor::done();
  if (s == "PAUSED_FOR_REPLY") return Cursor::paused();
  if (s == "FAILED") return Cursor::failed();
  if (!s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    return Cursor::at(std::stoul(s));
  }
  throw Error("PARSE_ERROR", "bad cursor '" + s + "'");
}

Json to_json_value(const Cursor& c) {
  if (c.kind == CursorKind::step) return Json(c.step);
  return Json(to_string(c));
}

static Cursor cursor_from_json(const Json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) return Cursor::at(j.get<std::size_t>());
  return parse_cursor(j.get<std::string>());
}

void to_json(Json& j, const ScheduledAction& a) {
  j = Json{{"lead_id", a.lead_id},
           {"kind", to_string(a.kind)},
           {"due", to_seconds(a.due)},
           {"created", to_seconds(a.created)}};
  if (a.kind == ActionKind::send_step) j["step_index"] = a.step_index;
}

void from_json(const Json& j, ScheduledAction& a) {
  a.lead_id = j.at("lead_id").get<std::string>();
  a.kind = parse_action_kind(j.at("kind").get<std::string>());
  a.step_index = j.value("step_index", std::size_t{0});
  a.due = instant_at(j, "due");
  a.created = instant_at(j, "created");
}

void to_json(Json& j, const LeadState& s) {
  j = Json{{"lead", s.lead},
           {"memory", s.memory},
           {"cursor", to_json_value(s.cursor)},
           {"next_due", opt_instant(s.next_due)},
           {"next_step", s.next_step},
           {"failed_attempts", s.failed_attempts},
           {"unsubscribed", s.unsubscribed},
           {"pending", s.pending ? Json(*s.pending) : Json(nullptr)},
           {"events", s.events}};
  if (s.research_error) j["research_error"] = *s.research_error;
}

void from_json(const Json& j, LeadState& s) {
  s.lead = j.at("lead").get<Lead>();
  s.memory = j.at("memory").get<AgentMemory>();
  s.cursor = cursor_from_json(j.at("cursor"));
  s.next_due = get_instant(j, "next_due");
  s.next_step = j.value("next_step", std::size_t{0});
  s.failed_attempts = j.value("failed_attempts", 0);
  s.unsubscribed = j.value("unsubscribed", false);
  s.pending = json_util::get_optional<ScheduledAction>(j, "pending");
  s.research_error = json_util::get_optional<std::string>(j, "research_error");
  s.events = j.value("events", std::vector<EngagementEvent>{});
}

void to_json(Json& j, const InitialDraft& d) {
  j = Json{{"arm_id", d.arm_id}, {"backend", d.backend}, {"status", d.pending() ? "pending" : "ready"}};
  if (d.message) j["message"] = *d.message;
  if (d.error) j["error"] = *d.error;
}

void from_json(const Json& j, InitialDraft& d) {
  d.arm_id = j.at("arm_id").get<std::string>();
  d.backend = j.value("backend", "");
  d.message = json_util::get_optional<MessageRecord>(j, "message");
  d.error = json_util::get_optional<std::string>(j, "error");
}

void to_json(Json& j, const CampaignState& s) {
  Json leads = Json::object();
  for (const auto& [id, ls] : s.leads) leads[id] = ls;
  j = Json{{"spec", s.spec},
           {"created_at", to_seconds(s.created_at)},
           {"drafts", s.drafts},
           {"leads", std::move(leads)},
           {"paused_arms", s.paused_arms}};
}

void from_json(const Json& j, CampaignState& s) {
  s.spec = j.at("spec").get<CampaignSpec>();
  s.created_at = instant_at(j, "created_at");
  s.drafts = j.at("drafts").get<std::vector<InitialDraft>>();
  s.leads.clear();
  for (const auto& [id, ls] : j.at("leads").items()) s.leads[id] = ls.get<LeadState>();
  s.paused_arms = j.value("paused_arms", std::set<std::string>{});
}

namespace entry {

Json created(const CampaignSpec& spec, Instant now, const std::vector<InitialDraft>& drafts) {
  return Json{{"type", "created"}, {"spec", spec}, {"now", to_seconds(now)}, {"drafts", drafts}};
}

Json lead_added(const Lead& lead, Instant now, const std::optional<ResearchDossier>& dossier,
                const std::optional<std::string>& research_error) {
  Json j{{"type", "lead_added"}, {"lead", lead}, {"now", to_seconds(now)}};
  j["dossier"] = dossier ? Json(*dossier) : Json(nullptr);
  if (research_error) j["research_error"] = *research_error;
  return j;
}

Json sent(const std::string& lead_id, const MessageRecord& msg, Instant now) {
  return Json{{"type", "sent"}, {"lead_id", lead_id}, {"message", msg}, {"now", to_seconds(now)}};
}

Json send_failed(const std::string& lead_id, Instant now, const std::string& code) {
  return Json{{"type", "send_failed"}, {"lead_id", lead_id}, {"now", to_seconds(now)}, {"code", code}};
}

Json event(const EngagementEvent& ev) { return Json{{"type", "event"}, {"event", ev}}; }

Json arm_paused(const std::string& arm_id) { return Json{{"type", "arm_paused"}, {"arm_id", arm_id}}; }
Json arm_resumed(const std::string& arm_id) { return Json{{"type", "arm_resumed"}, {"arm_id", arm_id}}; }

}  // namespace entry

Duration send_backoff(int failures) {
  if (failures < 1) failures = 1;
  return kSendBackoffBase * (std::int64_t{1} << std::min(failures - 1, 30));
}

void apply_entry(CampaignState& state, const Json& e) {
  const std::string type = e.at("type").get<std::string>();
  if (type == "created") {
    state = CampaignState{};
    state.spec = e.at("spec").get<CampaignSpec>();
    state.created_at = instant_at(e, "now");
    state.drafts = e.at("drafts").get<std::vector<InitialDraft>>();
  } else if (type == "lead_added") {
    LeadState ls;
    ls.lead = e.at("lead").get<Lead>();
    ls.memory.lead_id = ls.lead.id;
    ls.memory.research_dossier = json_util::get_optional<ResearchDossier>(e, "dossier");
    ls.research_error = json_util::get_optional<std::string>(e, "research_error");
    if (state.leads.count(ls.lead.id)) throw Error("DUPLICATE_LEAD", "lead '" + ls.lead.id + "' already present");
    resume_sequence(state.spec, ls, instant_at(e, "now"));
    state.leads.emplace(ls.lead.id, std::move(ls));
  } else if (type == "sent") {
    LeadState& ls = lead_of(state, e.at("lead_id").get<std::string>());
    MessageRecord msg = e.at("message").get<MessageRecord>();
    const Instant now = instant_at(e, "now");
    if (msg.step_index) ls.next_step = *msg.step_index + 1;
    ls.memory.history.push_back(std::move(msg));
    ls.failed_attempts = 0;
    resume_sequence(state.spec, ls, now);
  } else if (type == "send_failed") {
    LeadState& ls = lead_of(state, e.at("lead_id").get<std::string>());
    const Instant now = instant_at(e, "now");
    ls.failed_attempts += 1;
    if (ls.failed_attempts >= kMaxSendAttempts) {
      ls.cursor = Cursor::failed();
      ls.next_due.reset();
      ls.pending.reset();
    } else {
      const Instant due = now + send_backoff(ls.failed_attempts);
      if (ls.cursor.kind == CursorKind::step) ls.next_due = due;
      if (ls.pending) {
        ls.pending->due = due;
        ls.pending->created = now;
      }
    }
  } else if (type == "event") {
    apply_event(state, e.at("event").get<EngagementEvent>());
  } else if (type == "arm_paused") {
    state.paused_arms.insert(e.at("arm_id").get<std::string>());
  } else if (type == "arm_resumed") {
    state.paused_arms.erase(e.at("arm_id").get<std::string>());
  } else {
    throw Error("PARSE_ERROR", "unknown log entry type '" + type + "'");
  }
}

CampaignState replay(std::span<const Json> entries) {
  CampaignState state;
  if (entries.empty() || entries.front().value("type", "") != "created") {
    throw Error("PARSE_ERROR", "campaign log must start with a created entry");
  }
  try {
    for (const auto& e : entries) apply_entry(state, e);
  } catch (const nlohmann::json::exception& ex) {
    json_util::throw_parse_error("campaign log", ex.what());
  }
  return state;
}

std::vector<Json> read_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("FILE_NOT_FOUND", "cannot open " + path);
  std::vector<Json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(json_util::parse_text(line, (path + ":" + std::to_string(n)).c_str()));
  }
  return out;
}

std::optional<Instant> next_wakeup(const CampaignState& state) {
  std::optional<Instant> best;
  for (const auto& [id, ls] : state.leads) {
    if (!ls.pending || state.paused_arms.count(ls.lead.arm_id)) continue;
    if (!best || ls.pending->due < *best) best = ls.pending->due;
  }
  return best;
}

std::vector<EngagementEvent> all_events(const CampaignState& state) {
  std::vector<EngagementEvent> out;
  for (const auto& [id, ls] : state.leads) out.insert(out.end(), ls.events.begin(), ls.events.end());
  std::stable_sort(out.begin(), out.end(), [](const EngagementEvent& a, const EngagementEvent& b) {
    return std::tie(a.timestamp, a.lead_id, a.message_ref) < std::tie(b.timestamp, b.lead_id, b.message_ref);
  });
  return out;
}

bool was_delivered(const LeadState& lead, const std::string& message_id) {
  return std::any_of(lead.events.begin(), lead.events.end(), [&](const EngagementEvent& e) {
    return e.kind == EventKind::delivered && e.message_ref == message_id;
  });
}

const MessageRecord* find_message(const LeadState& lead, const std::string& message_id) {
  for (const auto* list : {&lead.memory.history, &lead.memory.inbound}) {
    for (const auto& m : *list) {
      if (m.id == message_id) return &m;
    }
  }
  return nullptr;
}

CampaignCosts campaign_costs(const CampaignState& state, const PriceTable& prices) {
  CampaignCosts out;
  for (const auto& d : state.drafts) {
    if (d.message && d.message->usage) out.drafts = out.drafts + cost_of(*d.message->usage, prices);
  }
  for (const auto& [id, ls] : state.leads) {
    Money c;
    if (ls.memory.research_dossier) c = c + cost_of(ls.memory.research_dossier->usage, prices);
    for (const auto& m : ls.memory.history) {
      if (m.usage) c = c + cost_of(*m.usage, prices);
    }
    out.per_lead[id] = c;
    out.per_arm[ls.lead.arm_id] = out.per_arm[ls.lead.arm_id] + c;
    out.leads_per_arm[ls.lead.arm_id] += 1;
    out.total = out.total + c;
  }
  if (!out.per_lead.empty()) out.mean_per_lead = out.total.divided_by(static_cast<std::int64_t>(out.per_lead.size()));
  out.total = out.total + out.drafts;
  return out;
}

}  // namespace minilab::engine
