#include "minilab/core/types.hpp"

#include "minilab/error.hpp"

namespace minilab {

const char* to_string(Channel c) { return c == Channel::email ? "email" : "linkedin"; }

const char* to_string(Direction d) { return d == Direction::outbound ? "outbound" : "inbound"; }

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::delivered: return "delivered";
    case EventKind::open: return "open";
    case EventKind::click: return "click";
    case EventKind::reply: return "reply";
    case EventKind::unsubscribe: return "unsubscribe";
  }
  return "?";
}

const char* to_string(UsagePurpose p) {
  switch (p) {
    case UsagePurpose::draft: return "draft";
    case UsagePurpose::reply: return "reply";
    case UsagePurpose::research: return "research";
    case UsagePurpose::template_draft: return "template";
    case UsagePurpose::curation: return "curation";
    case UsagePurpose::other: return "other";
  }
  return "?";
}

Channel parse_channel(const std::string& s) {
  if (s == "email") return Channel::email;
  if (s == "linkedin") return Channel::linkedin;
  throw Error("PARSE_ERROR", "unknown channel '" + s + "'");
}

Direction parse_direction(const std::string& s) {
  if (s == "outbound") return Direction::outbound;
  if (s == "inbound") return Direction::inbound;
  throw Error("PARSE_ERROR", "unknown direction '" + s + "'");
}

EventKind parse_event_kind(const std::string& s) {
  for (auto k : {EventKind::delivered, EventKind::open, EventKind::click, EventKind::reply,
                 EventKind::unsubscribe}) {
    if (s == to_string(k)) return k;
  }
  throw Error("PARSE_ERROR", "unknown event kind '" + s + "'");
}

UsagePurpose parse_usage_purpose(const std::string& s) {
  for (auto p : {UsagePurpose::draft, UsagePurpose::reply, UsagePurpose::research,
                 UsagePurpose::template_draft, UsagePurpose::curation, UsagePurpose::other}) {
    if (s == to_string(p)) return p;
  }
  throw Error("PARSE_ERROR", "unknown usage purpose '" + s + "'");
}

}  // namespace minilab
