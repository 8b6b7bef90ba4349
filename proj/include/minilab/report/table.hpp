#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minilab/core/json.hpp"

namespace minilab::report {

struct Column {
  std::string key;
  std::string label;

  bool operator==(const Column&) const = default;
};

using Row = std::map<std::string, std::string>;  // column key -> verbatim cell

struct RowGroup {
  std::string name;
  std::vector<Row> rows;

  bool operator==(const RowGroup&) const = default;
};

// A published results table, cells kept as the exact strings printed.
struct TableFixture {
  std::string id;  // "table1", "table2", "table3"
  std::string title;
  std::vector<Column> columns;  // first column names the row
  std::vector<RowGroup> groups;

  bool operator==(const TableFixture&) const = default;
};

void to_json(Json& j, const TableFixture& t);
TableFixture parse_fixture(const Json& j);  // PARSE_ERROR on shape problems
TableFixture load_fixture(const std::string& path);

// "## title", a header row, then per group a bold label row followed by data
// rows. Cells are written verbatim with '|' escaped.
std::string render_markdown(const TableFixture& t);

// Inverse of render_markdown. Column keys are not in the markdown: pass the
// fixture's keys to get them back, otherwise they are "c0", "c1", ...
// PARSE_ERROR on anything render_markdown would not produce.
TableFixture parse_markdown(const std::string& text, const std::string& id,
                            const std::vector<std::string>& keys = {});

std::vector<std::string> column_keys(const TableFixture& t);

// Row lookup by the first column's value.
const Row* find_row(const TableFixture& t, const std::string& name);
std::optional<std::size_t> group_of(const TableFixture& t, const std::string& name);

// "$0.1383" -> 0.1383, "33.2" -> 33.2, ">100B" -> nullopt.
std::optional<double> cell_number(const std::string& cell);

}  // namespace minilab::report
