#include "minilab/stats/ratings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "minilab/error.hpp"

namespace minilab::stats {

double rating_to_percent(int rating) {
  if (rating < 1 || rating > 5) {
    throw Error("INVALID_RATING", "rating " + std::to_string(rating) + " is outside 1..5");
  }
  return static_cast<double>(rating - 1) / 4.0 * 100.0;
}

double item_relevance(std::span<const RatingRecord> records) {
  if (records.empty()) throw Error("EMPTY", "no ratings for item");
  double sum = 0.0;
  for (const auto& r : records) sum += rating_to_percent(r.rating);
  return sum / static_cast<double>(records.size());
}

std::map<std::string, double> relevance_by_item(std::span<const RatingRecord> records) {
  std::map<std::string, std::vector<RatingRecord>> grouped;
  for (const auto& r : records) grouped[r.item_id].push_back(r);
  std::map<std::string, double> out;
  for (const auto& [item, recs] : grouped) out[item] = item_relevance(recs);
  return out;
}

ChecklistSpec default_checklist() {
  static const char* names[] = {"executive summary", "company background", "market analysis", "competitors",
                                "finance",           "strategy",           "supporting data"};
  ChecklistSpec spec;
  for (const char* n : names) spec.components.push_back({n, 1.0 / 7.0});
  return spec;
}

void validate_checklist(const ChecklistSpec& spec) {
  if (spec.components.empty()) throw Error("INVALID_CHECKLIST", "checklist has no components");
  std::set<std::string> names;
  double sum = 0.0;
  for (const auto& c : spec.components) {
    if (!(c.weight > 0.0)) throw Error("INVALID_CHECKLIST", "component '" + c.name + "' has non-positive weight");
    if (!names.insert(c.name).second) throw Error("INVALID_CHECKLIST", "component '" + c.name + "' repeated");
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("INVALID_CHECKLIST", "weights sum to " + std::to_string(sum));
}

double completeness_score(const std::set<std::string>& present, const ChecklistSpec& spec) {
  validate_checklist(spec);
  double score = 0.0;
  for (const auto& name : present) {
    bool known = false;
    for (const auto& c : spec.components) {
      if (c.name == name) {
        score += c.weight;
        known = true;
        break;
      }
    }
    if (!known) throw Error("UNKNOWN_COMPONENT", "'" + name + "' is not a checklist component");
  }
  return 100.0 * score;
}

std::vector<RatingRecord> parse_ratings(const std::string& text) {
  std::vector<RatingRecord> out;
  std::istringstream lines(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(lines, line);) {
    ++lineno;
    for (char& c : line) {
      if (c == ',' || c == '\t' || c == '\r') c = ' ';
    }
    std::istringstream fields(line);
    std::string item;
    if (!(fields >> item) || item[0] == '#') continue;
    RatingRecord r;
    r.item_id = item;
    std::string rating_text, extra;
    if (!(fields >> r.rater_id >> rating_text) || (fields >> extra)) {
      throw Error("PARSE_ERROR", "ratings line " + std::to_string(lineno) + ": expected item,rater,rating");
    }
    try {
      std::size_t used = 0;
      r.rating = std::stoi(rating_text, &used);
      if (used != rating_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("PARSE_ERROR", "ratings line " + std::to_string(lineno) + ": rating is not an integer");
    }
    rating_to_percent(r.rating);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RatingRecord> load_ratings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("FILE_NOT_FOUND", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ratings(ss.str());
}

}  // namespace minilab::stats
