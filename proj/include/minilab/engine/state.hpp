#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "minilab/core/json.hpp"
#include "minilab/core/types.hpp"
#include "minilab/gateway/pricing.hpp"

namespace minilab::engine {

enum class CursorKind { step, done, paused_for_reply, failed };

struct Cursor {
  CursorKind kind = CursorKind::step;
  std::size_t step = 0;  // meaningful only for CursorKind::step

  static Cursor at(std::size_t i) { return {CursorKind::step, i}; }
  static Cursor done() { return {CursorKind::done, 0}; }
  static Cursor paused() { return {CursorKind::paused_for_reply, 0}; }
  static Cursor failed() { return {CursorKind::failed, 0}; }

  bool operator==(const Cursor&) const = default;
};

std::string to_string(const Cursor& c);  // "0", "3", "DONE", "PAUSED_FOR_REPLY", "FAILED"
Cursor parse_cursor(const std::string& s);

enum class ActionKind { send_step, send_reply };

struct ScheduledAction {
  std::string lead_id;
  ActionKind kind = ActionKind::send_step;
  std::size_t step_index = 0;  // send_step only
  Instant due{};
  Instant created{};

  bool operator==(const ScheduledAction&) const = default;
};

struct LeadState {
  Lead lead;  // arm already resolved
  AgentMemory memory;
  Cursor cursor;
  std::optional<Instant> next_due;  // absent iff cursor is DONE/PAUSED/FAILED
  std::size_t next_step = 0;        // first step not yet sent
  int failed_attempts = 0;          // consecutive gateway failures
  bool unsubscribed = false;
  std::optional<ScheduledAction> pending;
  std::optional<std::string> research_error;
  std::vector<EngagementEvent> events;  // idempotent kinds stored once

  bool operator==(const LeadState&) const = default;
};

// Campaign-level template per arm, generated once at creation for audit.
struct InitialDraft {
  std::string arm_id;
  std::string backend;
  std::optional<MessageRecord> message;  // absent while pending
  std::optional<std::string> error;      // gateway error code when pending

  bool pending() const { return !message.has_value(); }
  bool operator==(const InitialDraft&) const = default;
};

struct CampaignState {
  CampaignSpec spec;
  Instant created_at{};
  std::vector<InitialDraft> drafts;
  std::map<std::string, LeadState> leads;
  std::set<std::string> paused_arms;

  bool operator==(const CampaignState&) const = default;
};

Json to_json_value(const Cursor& c);
void to_json(Json& j, const ScheduledAction& a);
void from_json(const Json& j, ScheduledAction& a);
void to_json(Json& j, const LeadState& s);
void from_json(const Json& j, LeadState& s);
void to_json(Json& j, const InitialDraft& d);
void from_json(const Json& j, InitialDraft& d);
void to_json(Json& j, const CampaignState& s);
void from_json(const Json& j, CampaignState& s);

// Log entries. Each mutation of a campaign is one of these; apply_entry is
// the only code that changes CampaignState, so replaying a log rebuilds the
// state exactly.
namespace entry {
Json created(const CampaignSpec& spec, Instant now, const std::vector<InitialDraft>& drafts);
Json lead_added(const Lead& lead, Instant now, const std::optional<ResearchDossier>& dossier,
                const std::optional<std::string>& research_error);
Json sent(const std::string& lead_id, const MessageRecord& msg, Instant now);
Json send_failed(const std::string& lead_id, Instant now, const std::string& code);
Json event(const EngagementEvent& ev);
Json arm_paused(const std::string& arm_id);
Json arm_resumed(const std::string& arm_id);
}  // namespace entry

inline constexpr int kMaxSendAttempts = 5;
inline constexpr Duration kSendBackoffBase{30};

// Wait after the n-th consecutive failure (n >= 1): 30s, 60s, 120s, 240s.
Duration send_backoff(int failures);

void apply_entry(CampaignState& state, const Json& e);
CampaignState replay(std::span<const Json> entries);

// Each JSON line of a campaign log file, in order. Blank lines skipped.
std::vector<Json> read_log(const std::string& path);

// Earliest instant at which tick() would do something, over all leads.
std::optional<Instant> next_wakeup(const CampaignState& state);

// Every stored engagement event, ordered by (timestamp, lead, message, kind).
std::vector<EngagementEvent> all_events(const CampaignState& state);

bool was_delivered(const LeadState& lead, const std::string& message_id);

// Message lookup across history and inbound.
const MessageRecord* find_message(const LeadState& lead, const std::string& message_id);

struct CampaignCosts {
  std::map<std::string, Money> per_lead;  // every lead, zero when unused
  std::map<std::string, Money> per_arm;
  std::map<std::string, std::size_t> leads_per_arm;
  Money drafts;  // campaign-level templates
  Money total;
  std::optional<Money> mean_per_lead;
};

// Sums message, reply and research usage from the state itself.
CampaignCosts campaign_costs(const CampaignState& state, const PriceTable& prices);

}  // namespace minilab::engine
