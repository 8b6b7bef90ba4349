#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minilab/gateway/money.hpp"
#include "minilab/report/provenance.hpp"
#include "minilab/report/table.hpp"

namespace minilab::report {

struct CostRatio {
  std::string baseline;
  std::string other;
  Money baseline_cost;
  Money other_cost;
  double ratio = 0.0;  // baseline / other
  Provenance provenance = Provenance::paper_fixture;
};

// Column holding a currency cell; "cost" in the cost table.
inline constexpr const char* kCostColumn = "cost";

Money cell_money(const std::string& cell);  // strips a leading '$'

// baseline / other per-lead cost. ZERO_COST when other is 0.
CostRatio cost_ratio(const TableFixture& t, const std::string& baseline, const std::string& other);

// Every first-group row against every later-group row.
std::vector<CostRatio> all_cost_ratios(const TableFixture& t);

struct Retention {
  std::string model;
  std::string column;
  double value = 0.0;
  double baseline_value = 0.0;
  double percent_of_baseline = 0.0;
};

// For each numeric column, every row as a percentage of the baseline row.
std::vector<Retention> retention_vs(const TableFixture& t, const std::string& baseline);

// Markdown section: the table, then ratio analysis, each number tagged.
std::string render_report(const TableFixture& t, const std::optional<std::string>& baseline = std::nullopt,
                          const std::optional<std::string>& other = std::nullopt);

Json report_json(const TableFixture& t, const std::optional<std::string>& baseline = std::nullopt,
                 const std::optional<std::string>& other = std::nullopt);

}  // namespace minilab::report
