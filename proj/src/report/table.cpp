#include "minilab/report/table.hpp"

#include <cstdlib>
#include <sstream>

#include "minilab/error.hpp"

namespace minilab::report {

namespace {

[[noreturn]] void bad(const std::string& why) { throw Error("PARSE_ERROR", why); }

bool clean_cell(const std::string& s) {
  if (s.find_first_of("\n\r") != std::string::npos) return false;
  if (!s.empty() && (s.front() == ' ' || s.back() == ' ' || s.front() == '\t' || s.back() == '\t')) return false;
  return true;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Splits "| a | b |" into unescaped, trimmed cells.
std::vector<std::string> split_row(const std::string& line) {
  if (line.size() < 2 || line.front() != '|' || line.back() != '|') bad("table row must start and end with '|'");
  std::vector<std::string> cells;
  std::string cur;
  for (std::size_t i = 1; i + 1 < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && i + 2 < line.size()) {
      cur += line[++i];
    } else if (c == '|') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  for (auto& cell : cells) {
    if (cell.size() < 2 || cell.front() != ' ' || cell.back() != ' ') {
      if (cell == " " || cell.empty()) {
        cell.clear();
        continue;
      }
      bad("cell padding is malformed in: " + line);
    }
    cell = cell.substr(1, cell.size() - 2);
  }
  return cells;
}

std::string join_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += c.empty() ? std::string(" |") : " " + escape(c) + " |";
  return out;
}

bool is_group_row(const std::vector<std::string>& cells) {
  if (cells.empty()) return false;
  const std::string& first = cells.front();
  if (first.size() < 5 || first.compare(0, 2, "**") != 0 || first.compare(first.size() - 2, 2, "**") != 0) return false;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (!cells[i].empty()) return false;
  }
  return true;
}

}  // namespace

void to_json(Json& j, const TableFixture& t) {
  Json cols = Json::array();
  for (const auto& c : t.columns) cols.push_back({{"key", c.key}, {"label", c.label}});
  Json groups = Json::array();
  for (const auto& g : t.groups) groups.push_back({{"name", g.name}, {"rows", g.rows}});
  j = Json{{"id", t.id}, {"title", t.title}, {"columns", cols}, {"groups", groups}};
}

TableFixture parse_fixture(const Json& j) {
  TableFixture t;
  try {
    t.id = j.at("id").get<std::string>();
    t.title = j.at("title").get<std::string>();
    for (const auto& c : j.at("columns")) t.columns.push_back({c.at("key").get<std::string>(), c.at("label").get<std::string>()});
    for (const auto& g : j.at("groups")) {
      RowGroup rg{g.at("name").get<std::string>(), {}};
      for (const auto& r : g.at("rows")) rg.rows.push_back(r.get<Row>());
      t.groups.push_back(std::move(rg));
    }
  } catch (const nlohmann::json::exception& e) {
    json_util::throw_parse_error("table fixture", e.what());
  }
  if (t.columns.empty()) bad("fixture " + t.id + " has no columns");
  if (!clean_cell(t.title)) bad("fixture title must be a single trimmed line");
  for (const auto& c : t.columns) {
    if (c.key.empty() || !clean_cell(c.label) || c.label.empty()) bad("fixture " + t.id + " has a bad column");
  }
  for (const auto& g : t.groups) {
    if (g.name.empty() || !clean_cell(g.name)) bad("fixture " + t.id + " has a bad group name");
    for (const auto& r : g.rows) {
      if (r.size() != t.columns.size()) bad("row in group '" + g.name + "' does not have exactly the table's columns");
      for (const auto& c : t.columns) {
        auto it = r.find(c.key);
        if (it == r.end()) bad("row in group '" + g.name + "' lacks column '" + c.key + "'");
        if (!clean_cell(it->second)) bad("cell '" + it->second + "' has surrounding whitespace or a newline");
      }
      if (r.at(t.columns.front().key).empty()) bad("row in group '" + g.name + "' has no name");
    }
  }
  return t;
}

TableFixture load_fixture(const std::string& path) { return parse_fixture(json_util::load_file(path)); }

std::string render_markdown(const TableFixture& t) {
  std::string out = "## " + t.title + "\n\n";
  std::vector<std::string> header, rule;
  for (const auto& c : t.columns) {
    header.push_back(c.label);
    rule.push_back("---");
  }
  out += join_row(header) + "\n" + join_row(rule) + "\n";
  for (const auto& g : t.groups) {
    std::vector<std::string> cells(t.columns.size());
    cells[0] = "**" + g.name + "**";
    out += join_row(cells) + "\n";
    for (const auto& r : g.rows) {
      cells.clear();
      for (const auto& c : t.columns) cells.push_back(r.at(c.key));
      out += join_row(cells) + "\n";
    }
  }
  return out;
}

std::vector<std::string> column_keys(const TableFixture& t) {
  std::vector<std::string> out;
  for (const auto& c : t.columns) out.push_back(c.key);
  return out;
}

TableFixture parse_markdown(const std::string& text, const std::string& id, const std::vector<std::string>& keys) {
  std::istringstream in(text);
  std::string line;
  TableFixture t;
  t.id = id;
  if (!std::getline(in, line) || line.rfind("## ", 0) != 0) bad("expected '## title'");
  t.title = line.substr(3);
  if (!std::getline(in, line) || !line.empty()) bad("expected a blank line after the title");
  if (!std::getline(in, line)) bad("missing header row");
  const auto header = split_row(line);
  if (!std::getline(in, line)) bad("missing rule row");
  const auto rule = split_row(line);
  if (rule.size() != header.size()) bad("rule row width differs from header");
  if (!keys.empty() && keys.size() != header.size()) bad("expected " + std::to_string(keys.size()) + " columns");
  for (std::size_t i = 0; i < header.size(); ++i) {
    t.columns.push_back({keys.empty() ? "c" + std::to_string(i) : keys[i], header[i]});
  }
  while (std::getline(in, line)) {
    if (line.empty()) break;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) bad("row width differs from header: " + line);
    if (is_group_row(cells)) {
      t.groups.push_back({cells[0].substr(2, cells[0].size() - 4), {}});
      continue;
    }
    if (t.groups.empty()) bad("data row before any group row");
    Row r;
    for (std::size_t i = 0; i < cells.size(); ++i) r[t.columns[i].key] = cells[i];
    t.groups.back().rows.push_back(std::move(r));
  }
  return t;
}

const Row* find_row(const TableFixture& t, const std::string& name) {
  const std::string& key = t.columns.front().key;
  for (const auto& g : t.groups) {
    for (const auto& r : g.rows) {
      if (r.at(key) == name) return &r;
    }
  }
  return nullptr;
}

std::optional<std::size_t> group_of(const TableFixture& t, const std::string& name) {
  const std::string& key = t.columns.front().key;
  for (std::size_t i = 0; i < t.groups.size(); ++i) {
    for (const auto& r : t.groups[i].rows) {
      if (r.at(key) == name) return i;
    }
  }
  return std::nullopt;
}

std::optional<double> cell_number(const std::string& cell) {
  std::string s = cell;
  if (!s.empty() && s.front() == '$') s.erase(0, 1);
  if (!s.empty() && s.back() == '%') s.pop_back();
  if (s.empty()) return std::nullopt;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || c == '.' || c == '-')) return std::nullopt;
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

}  // namespace minilab::report
