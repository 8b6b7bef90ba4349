#include "minilab/metrics/factual.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "minilab/error.hpp"

namespace minilab::metrics {

namespace {

enum class Kind { number, date, entity };

struct Claim {
  std::string text;
  Kind kind;
  std::vector<std::string> folded;
  std::string context;  // folded word preceding a number/date in the output
};

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

constexpr std::array<std::string_view, 12> kMonths = {"january", "february", "march",     "april",
                                                      "may",     "june",     "july",      "august",
                                                      "september", "october", "november", "december"};

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> words = {
      "the", "a",  "an",  "in",   "on",   "at",  "of",  "to",    "for",  "by", "and", "or",
      "our", "we", "i",   "it",   "this", "that", "its", "their", "with", "as", "is",  "was",
      "are", "be", "has", "have", "from", "about", "over", "than", "since", "nearly", "around",
      "approximately", "roughly", "some", "up"};
  return words;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Strips surrounding punctuation but keeps currency prefixes and percent.
std::string core_of(const std::string& raw) {
  std::size_t b = 0, e = raw.size();
  auto keep_front = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '$'; };
  auto keep_back = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '%'; };
  while (b < e && !keep_front(raw[b])) ++b;
  while (e > b && !keep_back(raw[e - 1])) --e;
  return raw.substr(b, e - b);
}

bool ends_sentence(const std::string& raw) {
  return !raw.empty() && (raw.back() == '.' || raw.back() == '!' || raw.back() == '?');
}

bool is_year(std::string_view t) {
  return t.size() == 4 && std::all_of(t.begin(), t.end(), is_digit) && (t[0] == '1' || t[0] == '2') &&
         (t.substr(0, 2) == "19" || t.substr(0, 2) == "20");
}

bool is_iso_date(std::string_view t) {
  return t.size() == 10 && t[4] == '-' && t[7] == '-' &&
         std::all_of(t.begin(), t.begin() + 4, is_digit) && is_digit(t[5]) && is_digit(t[6]) &&
         is_digit(t[8]) && is_digit(t[9]);
}

bool is_month(std::string_view t) {
  const std::string l = lower(t);
  return std::find(kMonths.begin(), kMonths.end(), l) != kMonths.end();
}

bool has_digit(std::string_view t) { return std::any_of(t.begin(), t.end(), is_digit); }

bool is_capitalised_word(const std::string& core) {
  return !core.empty() && std::isupper(static_cast<unsigned char>(core[0])) && !has_digit(core);
}

// Shape class used to decide whether two values are comparable.
std::string shape_of(const std::string& folded) {
  if (is_year(folded)) return "year";
  if (is_iso_date(folded)) return "date";
  if (folded.empty() || !is_digit(folded[0])) return {};
  std::size_t i = 0;
  while (i < folded.size() && (is_digit(folded[i]) || folded[i] == '.')) ++i;
  return "num:" + folded.substr(i);
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::vector<Claim> find_claims(const std::string& output) {
  std::vector<std::string> raw;
  {
    std::string cur;
    for (char c : output) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) raw.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) raw.push_back(std::move(cur));
  }

  std::vector<Claim> claims;
  std::string context;  // last non-stopword alphabetic word seen
  std::vector<std::string> run;

  auto flush_run = [&] {
    std::size_t start = 0;
    while (start < run.size() && stopwords().contains(lower(run[start]))) ++start;
    if (run.size() - start >= 2) {
      std::string text;
      for (std::size_t k = start; k < run.size(); ++k) text += (k > start ? " " : "") + run[k];
      claims.push_back({text, Kind::entity, fold_tokens(text), {}});
    }
    run.clear();
  };

  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string core = core_of(raw[i]);
    if (core.empty()) {
      flush_run();
      continue;
    }
    const bool next_is_year = i + 1 < raw.size() && is_year(core_of(raw[i + 1]));
    if (is_month(core) && next_is_year && !ends_sentence(raw[i])) {
      flush_run();
      const std::string text = core + " " + core_of(raw[i + 1]);
      claims.push_back({text, Kind::date, fold_tokens(text), context});
      ++i;
      continue;
    }
    if (has_digit(core)) {
      flush_run();
      const auto folded = fold_tokens(core);
      const bool dated = folded.size() == 1 && (is_year(folded[0]) || is_iso_date(core));
      claims.push_back({core, dated ? Kind::date : Kind::number, folded, context});
      continue;
    }
    if (is_capitalised_word(core)) {
      run.push_back(core);
    } else {
      flush_run();
    }
    if (ends_sentence(raw[i])) flush_run();
    const std::string l = lower(core);
    if (std::all_of(l.begin(), l.end(), is_alpha) && !stopwords().contains(l)) context = l;
  }
  flush_run();

  // Collapse repeats of the same folded claim.
  std::vector<Claim> unique;
  std::set<std::vector<std::string>> seen;
  for (auto& c : claims) {
    if (!c.folded.empty() && seen.insert(c.folded).second) unique.push_back(std::move(c));
  }
  return unique;
}

}  // namespace

const char* to_string(ClaimLabel l) {
  switch (l) {
    case ClaimLabel::supported: return "supported";
    case ClaimLabel::contradicted: return "contradicted";
    case ClaimLabel::unverifiable: return "unverifiable";
  }
  return "?";
}

ClaimLabel parse_claim_label(const std::string& s) {
  for (auto l : {ClaimLabel::supported, ClaimLabel::contradicted, ClaimLabel::unverifiable}) {
    if (s == to_string(l)) return l;
  }
  throw Error("PARSE_ERROR", "unknown claim label '" + s + "'");
}

std::optional<double> factual_accuracy(std::span<const ClaimVerdict> claims) {
  std::size_t supported = 0, verifiable = 0;
  for (const auto& c : claims) {
    if (c.label == ClaimLabel::unverifiable) continue;
    ++verifiable;
    if (c.label == ClaimLabel::supported) ++supported;
  }
  if (verifiable == 0) return std::nullopt;
  return 100.0 * static_cast<double>(supported) / static_cast<double>(verifiable);
}

std::vector<std::string> fold_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const auto uc = static_cast<unsigned char>(c);
    const bool between_digits = i > 0 && i + 1 < text.size() && is_digit(text[i - 1]) && is_digit(text[i + 1]);
    if (std::isalnum(uc) || uc >= 0x80) {
      cur += static_cast<char>(std::tolower(uc));
    } else if (c == '.' && between_digits) {
      cur += '.';
    } else if (c == ',' && between_digits) {
      // thousands separator
    } else if (c == '%' && !cur.empty() && is_digit(cur.back())) {
      cur += '%';
      flush();
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<ClaimVerdict> RuleBasedClaimExtractor::extract(const std::string& output,
                                                           std::span<const SourceDocument> sources) const {
  std::vector<std::vector<std::string>> folded_sources;
  folded_sources.reserve(sources.size());
  for (const auto& s : sources) folded_sources.push_back(fold_tokens(s.text));

  std::vector<ClaimVerdict> out;
  for (const auto& claim : find_claims(output)) {
    ClaimVerdict v{claim.text, ClaimLabel::unverifiable, std::nullopt};
    for (std::size_t s = 0; s < sources.size() && v.label == ClaimLabel::unverifiable; ++s) {
      if (contains_run(folded_sources[s], claim.folded)) {
        v.label = ClaimLabel::supported;
        v.source_ref = sources[s].url;
      }
    }
    const std::string claim_shape = claim.folded.size() == 1 ? shape_of(claim.folded[0]) : std::string{};
    if (v.label == ClaimLabel::unverifiable && claim.kind != Kind::entity && !claim.context.empty() &&
        !claim_shape.empty()) {
      for (std::size_t s = 0; s < sources.size() && v.label == ClaimLabel::unverifiable; ++s) {
        const auto& toks = folded_sources[s];
        for (std::size_t p = 0; p < toks.size() && v.label == ClaimLabel::unverifiable; ++p) {
          if (toks[p] != claim.context) continue;
          for (std::size_t q = p + 1; q < toks.size() && q <= p + 4; ++q) {
            if (shape_of(toks[q]) == claim_shape && toks[q] != claim.folded[0]) {
              v.label = ClaimLabel::contradicted;
              v.source_ref = sources[s].url;
              break;
            }
          }
        }
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<ClaimVerdict> extract_claims(const std::string& output, std::span<const SourceDocument> sources) {
  return RuleBasedClaimExtractor{}.extract(output, sources);
}

}  // namespace minilab::metrics
