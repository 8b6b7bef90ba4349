#include "minilab/engine/campaign.hpp"

#include "minilab/core/validate.hpp"
#include "minilab/engine/prompt.hpp"
#include "minilab/error.hpp"

namespace minilab::engine {

Campaign Campaign::create(const CampaignSpec& spec, Instant now, ChatClient& client, Options opts) {
  require_valid(spec);
  Campaign c(client, std::move(opts));
  std::vector<InitialDraft> drafts;
  for (const auto& arm : spec.variant_arms) {
    InitialDraft d{arm.arm_id, arm.backend_name, std::nullopt, std::nullopt};
    try {
      ChatResponse r = client.complete(arm.backend_name, build_template_prompt(spec, arm));
      r.usage.timestamp = now;
      MessageRecord m;
      m.id = "template:" + arm.arm_id;
      m.channel = spec.steps.front().channel;
      m.body = r.text;  // verbatim, no subject split
      m.timestamp = now;
      m.model_backend = arm.backend_name;
      m.usage = r.usage;
      d.message = std::move(m);
    } catch (const Error& e) {
      d.error = e.code();
    }
    drafts.push_back(std::move(d));
  }
  c.commit(entry::created(spec, now, drafts));
  return c;
}

Campaign Campaign::restore(std::span<const Json> log, ChatClient& client, Options opts) {
  Campaign c(client, std::move(opts));
  c.state_ = replay(log);
  if (c.opts_.keep_log) c.log_.assign(log.begin(), log.end());
  return c;
}

void Campaign::commit(Json e) {
  if (opts_.sink) opts_.sink(e);
  apply_entry(state_, e);
  if (opts_.keep_log) log_.push_back(std::move(e));
}

const LeadState& Campaign::lead(const std::string& lead_id) const {
  auto it = state_.leads.find(lead_id);
  if (it == state_.leads.end()) throw Error("UNKNOWN_LEAD", "no lead '" + lead_id + "'");
  return it->second;
}

const VariantArm& Campaign::arm(const std::string& arm_id) const {
  for (const auto& a : state_.spec.variant_arms) {
    if (a.arm_id == arm_id) return a;
  }
  throw Error("UNKNOWN_ARM", "no arm '" + arm_id + "'");
}

const LeadState& Campaign::add_lead(Lead lead, Instant now) {
  if (lead.id.empty()) throw Error("INVALID_LEAD", "lead id is empty");
  if (state_.leads.count(lead.id)) throw Error("DUPLICATE_LEAD", "lead '" + lead.id + "' already present");
  if (lead.arm_id.empty()) {
    lead.arm_id = assign_arm(lead.id, state_.spec.variant_arms, state_.spec.assignment_seed);
  }
  const VariantArm& a = arm(lead.arm_id);

  std::optional<ResearchDossier> dossier;
  std::optional<std::string> research_error;
  if (opts_.research) {
    const auto urls = research_urls_for(lead, state_.spec.research_sources);
    if (!urls.empty()) {
      const std::string backend = opts_.research->config().backend.empty() ? a.backend_name : std::string{};
      try {
        dossier = opts_.research->research_lead(lead, state_.spec.research_goals, urls, now, backend);
      } catch (const Error& e) {
        research_error = e.code();
      }
    }
  }
  const std::string id = lead.id;
  commit(entry::lead_added(lead, now, dossier, research_error));
  return state_.leads.at(id);
}

MessageRecord Campaign::send_step(const std::string& lead_id, std::size_t step, Instant now) {
  const LeadState& ls = lead(lead_id);
  const VariantArm& a = arm(ls.lead.arm_id);
  const SequenceStep& s = state_.spec.steps.at(step);
  ChatResponse r;
  try {
    r = client_->complete(a.backend_name, build_step_prompt(state_.spec, step, ls.lead, ls.memory));
  } catch (const Error& e) {
    commit(entry::send_failed(lead_id, now, e.code()));
    throw;
  }
  r.usage.timestamp = now;
  SplitDraft split = split_subject(r.text, s.channel);
  MessageRecord m;
  m.id = lead_id + ":s" + std::to_string(step);
  m.direction = Direction::outbound;
  m.channel = s.channel;
  m.step_index = step;
  m.subject = std::move(split.subject);
  m.body = std::move(split.body);
  m.timestamp = now;
  m.model_backend = a.backend_name;
  m.usage = r.usage;
  commit(entry::sent(lead_id, m, now));
  return m;
}

MessageRecord Campaign::send_reply(const std::string& lead_id, Instant now) {
  const LeadState& ls = lead(lead_id);
  const VariantArm& a = arm(ls.lead.arm_id);
  ChatResponse r;
  try {
    r = client_->complete(a.backend_name, build_reply_prompt(state_.spec, ls.lead, ls.memory));
  } catch (const Error& e) {
    commit(entry::send_failed(lead_id, now, e.code()));
    throw;
  }
  r.usage.timestamp = now;

  Channel channel = Channel::email;
  std::optional<std::string> last_subject;
  if (!ls.memory.inbound.empty()) channel = ls.memory.inbound.back().channel;
  std::size_t replies_sent = 0;
  for (const auto& m : ls.memory.history) {
    if (!m.step_index) ++replies_sent;
    if (m.channel == Channel::email && m.subject) last_subject = m.subject;
  }
  SplitDraft split = split_subject(r.text, channel);
  MessageRecord m;
  m.id = lead_id + ":r" + std::to_string(replies_sent + 1);
  m.direction = Direction::outbound;
  m.channel = channel;
  m.subject = split.subject;
  if (!m.subject && channel == Channel::email && last_subject) m.subject = "Re: " + *last_subject;
  m.body = std::move(split.body);
  m.timestamp = now;
  m.model_backend = a.backend_name;
  m.usage = r.usage;
  commit(entry::sent(lead_id, m, now));
  return m;
}

std::vector<MessageRecord> Campaign::tick(Instant now) {
  std::vector<MessageRecord> sent;
  // Collect first: sending mutates the map's values, not its keys, but this
  // keeps the loop obviously safe.
  std::vector<std::pair<std::string, ScheduledAction>> due;
  for (const auto& [id, ls] : state_.leads) {
    if (!ls.pending || ls.pending->due > now) continue;
    if (state_.paused_arms.count(ls.lead.arm_id)) continue;
    due.emplace_back(id, *ls.pending);
  }
  for (const auto& [id, action] : due) {
    try {
      if (action.kind == ActionKind::send_step) {
        sent.push_back(send_step(id, action.step_index, now));
      } else {
        sent.push_back(send_reply(id, now));
      }
    } catch (const Error&) {
      // already recorded as send_failed
    }
  }
  return sent;
}

bool Campaign::ingest_event(const EngagementEvent& ev) {
  const LeadState& ls = lead(ev.lead_id);
  const MessageRecord* msg = nullptr;
  for (const auto& m : ls.memory.history) {
    if (m.id == ev.message_ref) msg = &m;
  }
  if (!msg) throw Error("UNKNOWN_MESSAGE", "lead '" + ev.lead_id + "' has no outbound message '" + ev.message_ref + "'");
  if (ev.timestamp < msg->timestamp) {
    throw Error("INVALID_EVENT", std::string(to_string(ev.kind)) + " event precedes the send of " + ev.message_ref);
  }
  if (ev.kind != EventKind::delivered && !was_delivered(ls, ev.message_ref)) {
    throw Error("NOT_DELIVERED", "message " + ev.message_ref + " has no delivered event");
  }
  if (is_idempotent(ev.kind)) {
    for (const auto& e : ls.events) {
      if (e.kind == ev.kind && e.message_ref == ev.message_ref) return false;
    }
  }
  commit(entry::event(ev));
  return true;
}

MessageRecord Campaign::draft_reply(const std::string& lead_id, Instant now) {
  const LeadState& ls = lead(lead_id);
  if (ls.cursor.kind != CursorKind::paused_for_reply) {
    throw Error("WRONG_STATE", "lead '" + lead_id + "' is " + to_string(ls.cursor) + ", not PAUSED_FOR_REPLY");
  }
  return send_reply(lead_id, now);
}

void Campaign::pause_arm(const std::string& arm_id) {
  arm(arm_id);
  if (!state_.paused_arms.count(arm_id)) commit(entry::arm_paused(arm_id));
}

void Campaign::resume_arm(const std::string& arm_id) {
  arm(arm_id);
  if (state_.paused_arms.count(arm_id)) commit(entry::arm_resumed(arm_id));
}

}  // namespace minilab::engine
