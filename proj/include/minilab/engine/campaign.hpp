#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "minilab/engine/state.hpp"
#include "minilab/gateway/gateway.hpp"
#include "minilab/research/research.hpp"

namespace minilab::engine {

struct CampaignOptions {
  const ResearchProvider* research = nullptr;  // no research when null
  std::function<void(const Json&)> sink;
  bool keep_log = true;  // retain entries in memory for log()
};

// One campaign's state machine. Not thread-safe; CampaignService serialises
// access. Every mutation goes through a log entry, handed to the sink before
// it is applied.
class Campaign {
 public:
  using LogSink = std::function<void(const Json&)>;
  using Options = CampaignOptions;

  // Validates the spec (first violation is thrown) and drafts one template
  // per arm. A failing gateway leaves that arm's draft pending.
  static Campaign create(const CampaignSpec& spec, Instant now, ChatClient& client, Options opts = {});

  // Rebuilds from a log without calling the gateway.
  static Campaign restore(std::span<const Json> log, ChatClient& client, Options opts = {});

  const CampaignState& state() const { return state_; }
  const std::vector<Json>& log() const { return log_; }
  const LeadState& lead(const std::string& lead_id) const;

  // Resolves the arm (hash assignment when lead.arm_id is empty), researches
  // the lead when sources are configured, and schedules step 0.
  // Errors: INVALID_LEAD, DUPLICATE_LEAD, UNKNOWN_ARM.
  const LeadState& add_lead(Lead lead, Instant now);

  // Sends every due step or reply, at most one message per lead. Leads on
  // paused arms are skipped. Gateway failures reschedule with backoff.
  std::vector<MessageRecord> tick(Instant now);

  // Errors: UNKNOWN_LEAD, UNKNOWN_MESSAGE, NOT_DELIVERED (engagement on a
  // message with no delivered event), INVALID_EVENT (before the send).
  // Returns false for a duplicate of an idempotent event.
  bool ingest_event(const EngagementEvent& ev);

  // Errors: UNKNOWN_LEAD, WRONG_STATE unless PAUSED_FOR_REPLY; gateway
  // errors are recorded as a failed attempt and rethrown.
  MessageRecord draft_reply(const std::string& lead_id, Instant now);

  void pause_arm(const std::string& arm_id);
  void resume_arm(const std::string& arm_id);

 private:
  Campaign(ChatClient& client, Options opts) : client_(&client), opts_(std::move(opts)) {}

  void commit(Json e);
  const VariantArm& arm(const std::string& arm_id) const;
  MessageRecord send_step(const std::string& lead_id, std::size_t step, Instant now);
  MessageRecord send_reply(const std::string& lead_id, Instant now);

  ChatClient* client_;
  Options opts_;
  CampaignState state_;
  std::vector<Json> log_;
};

}  // namespace minilab::engine
