#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minilab/time.hpp"

namespace minilab {

enum class Channel { email, linkedin };
enum class Direction { outbound, inbound };
enum class EventKind { delivered, open, click, reply, unsubscribe };

// What a model call was spent on; lets cost reports separate drafting from
// research and campaign-level template generation.
enum class UsagePurpose { draft, reply, research, template_draft, curation, other };

struct UsageRecord {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::string backend_name;
  Instant timestamp{};

  bool operator==(const UsageRecord&) const = default;
};

struct SequenceStep {
  std::size_t index = 0;
  Channel channel = Channel::email;
  Duration delay{0};  // relative to the previous step's send time
  std::string instructions;

  bool operator==(const SequenceStep&) const = default;
};

struct VariantArm {
  std::string arm_id;
  std::string backend_name;
  double weight = 1.0;

  bool operator==(const VariantArm&) const = default;
};

struct CampaignSpec {
  std::string id;
  std::string name;
  std::string value_proposition;
  std::vector<std::string> pain_points;
  std::vector<std::string> research_goals;
  std::string outreach_instructions;
  std::vector<SequenceStep> steps;
  std::vector<VariantArm> variant_arms;
  // Optional extensions: URL templates researched for every lead ("{key}" is
  // replaced from the lead profile) and the arm-assignment seed.
  std::vector<std::string> research_sources;
  std::uint64_t assignment_seed = 0;

  bool operator==(const CampaignSpec&) const = default;
};

struct Lead {
  std::string id;
  std::map<std::string, std::string> profile;  // name, role, company, profile_url, ...
  std::string arm_id;                          // empty = assign on add

  bool operator==(const Lead&) const = default;
};

struct MessageRecord {
  std::string id;
  Direction direction = Direction::outbound;
  Channel channel = Channel::email;
  std::optional<std::size_t> step_index;  // absent for ad-hoc replies
  std::optional<std::string> subject;     // email only
  std::string body;
  Instant timestamp{};
  std::optional<std::string> model_backend;
  std::optional<UsageRecord> usage;

  bool operator==(const MessageRecord&) const = default;
};

struct SourceDocument {
  std::string url;
  Instant fetched_at{};
  std::string text;

  bool operator==(const SourceDocument&) const = default;
};

struct ResearchDossier {
  std::string lead_id;
  std::string summary;
  std::vector<SourceDocument> sources;
  std::string model_backend;
  UsageRecord usage;

  bool operator==(const ResearchDossier&) const = default;
};

struct AgentMemory {
  std::string lead_id;
  std::optional<ResearchDossier> research_dossier;
  std::vector<MessageRecord> history;  // outbound, append-only
  std::vector<MessageRecord> inbound;  // replies, append-only

  bool operator==(const AgentMemory&) const = default;
};

struct EngagementEvent {
  std::string lead_id;
  EventKind kind = EventKind::delivered;
  Instant timestamp{};
  std::string message_ref;          // MessageRecord::id
  std::optional<std::string> body;  // reply text, reply events only

  bool operator==(const EngagementEvent&) const = default;
};

// open/click/unsubscribe/delivered are idempotent by (lead, kind, message);
// replies may repeat.
inline bool is_idempotent(EventKind kind) { return kind != EventKind::reply; }

const char* to_string(Channel c);
const char* to_string(Direction d);
const char* to_string(EventKind k);
const char* to_string(UsagePurpose p);

Channel parse_channel(const std::string& s);
Direction parse_direction(const std::string& s);
EventKind parse_event_kind(const std::string& s);
UsagePurpose parse_usage_purpose(const std::string& s);

}  // namespace minilab
