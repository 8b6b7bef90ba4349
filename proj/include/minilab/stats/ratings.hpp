#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace minilab::stats {

struct RatingRecord {
  std::string item_id;
  std::string rater_id;
  int rating = 1;  // 1..5

  bool operator==(const RatingRecord&) const = default;
};

// (rating - 1) / 4 · 100; INVALID_RATING outside 1..5.
double rating_to_percent(int rating);

// Mean percent over the records of one item. EMPTY on no records.
double item_relevance(std::span<const RatingRecord> records);
std::map<std::string, double> relevance_by_item(std::span<const RatingRecord> records);

struct ChecklistComponent {
  std::string name;
  double weight = 0.0;
};

struct ChecklistSpec {
  std::vector<ChecklistComponent> components;
};

// The seven research-summary components at equal weight.
ChecklistSpec default_checklist();

// INVALID_CHECKLIST when weights are non-positive, names repeat, or weights
// do not sum to 1 within 1e-9.
void validate_checklist(const ChecklistSpec& spec);

// 100 · Σ weights of present components. Whether a component clears the
// quality bar is the reviewer's call. UNKNOWN_COMPONENT for foreign names.
double completeness_score(const std::set<std::string>& present, const ChecklistSpec& spec);

// One record per line, "item_id,rater_id,rating" (commas or whitespace);
// blank lines and lines starting with '#' are skipped.
std::vector<RatingRecord> load_ratings(const std::string& path);
std::vector<RatingRecord> parse_ratings(const std::string& text);

}  // namespace minilab::stats
