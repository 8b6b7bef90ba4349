#include "minilab/report/ratios.hpp"

#include <algorithm>
#include <cstdio>

#include "minilab/error.hpp"

namespace minilab::report {

namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

const Row& require_row(const TableFixture& t, const std::string& name) {
  const Row* r = find_row(t, name);
  if (!r) throw Error("UNKNOWN_MODEL", "table " + t.id + " has no row '" + name + "'");
  return *r;
}

bool has_column(const TableFixture& t, const std::string& key) {
  for (const auto& c : t.columns) {
    if (c.key == key) return true;
  }
  return false;
}

std::string name_of(const TableFixture& t, const Row& r) { return r.at(t.columns.front().key); }

std::string default_baseline(const TableFixture& t) {
  if (t.groups.empty() || t.groups.front().rows.empty()) throw Error("PARSE_ERROR", "table " + t.id + " has no rows");
  return name_of(t, t.groups.front().rows.front());
}

std::optional<std::string> default_other(const TableFixture& t) {
  if (t.groups.size() < 2 || t.groups[1].rows.empty()) return std::nullopt;
  return name_of(t, t.groups[1].rows.front());
}

}  // namespace

Money cell_money(const std::string& cell) {
  std::string s = cell;
  if (!s.empty() && s.front() == '$') s.erase(0, 1);
  return Money::parse(s);
}

CostRatio cost_ratio(const TableFixture& t, const std::string& baseline, const std::string& other) {
  if (!has_column(t, kCostColumn)) throw Error("NO_COST_COLUMN", "table " + t.id + " has no cost column");
  CostRatio r;
  r.baseline = baseline;
  r.other = other;
  r.baseline_cost = cell_money(require_row(t, baseline).at(kCostColumn));
  r.other_cost = cell_money(require_row(t, other).at(kCostColumn));
  if (r.other_cost.units() == 0) throw Error("ZERO_COST", "'" + other + "' has zero cost");
  r.ratio = static_cast<double>(r.baseline_cost.units()) / static_cast<double>(r.other_cost.units());
  r.provenance = Provenance::paper_fixture;
  return r;
}

std::vector<CostRatio> all_cost_ratios(const TableFixture& t) {
  std::vector<CostRatio> out;
  if (t.groups.size() < 2) return out;
  for (const auto& b : t.groups.front().rows) {
    for (std::size_t g = 1; g < t.groups.size(); ++g) {
      for (const auto& o : t.groups[g].rows) out.push_back(cost_ratio(t, name_of(t, b), name_of(t, o)));
    }
  }
  return out;
}

std::vector<Retention> retention_vs(const TableFixture& t, const std::string& baseline) {
  const Row& base = require_row(t, baseline);
  std::vector<Retention> out;
  for (const auto& g : t.groups) {
    for (const auto& r : g.rows) {
      for (std::size_t i = 1; i < t.columns.size(); ++i) {
        const auto& key = t.columns[i].key;
        if (key == kCostColumn) continue;
        const auto bv = cell_number(base.at(key));
        const auto v = cell_number(r.at(key));
        if (!bv || !v || *bv == 0.0) continue;
        out.push_back({name_of(t, r), t.columns[i].label, *v, *bv, 100.0 * *v / *bv});
      }
    }
  }
  return out;
}

std::string render_report(const TableFixture& t, const std::optional<std::string>& baseline_opt,
                          const std::optional<std::string>& other_opt) {
  const std::string baseline = baseline_opt.value_or(default_baseline(t));
  const std::string tag = std::string("[") + to_string(Provenance::paper_fixture) + "]";
  std::string out = render_markdown(t);
  out += "\nAll values above are " + tag + ".\n";

  if (has_column(t, kCostColumn)) {
    if (auto other = other_opt ? other_opt : default_other(t)) {
      const CostRatio r = cost_ratio(t, baseline, *other);
      out += "\n### Cost per lead ratio\n\n";
      out += r.baseline + " vs " + r.other + ": $" + r.baseline_cost.to_string() + " / $" + r.other_cost.to_string() +
             " = " + fmt(r.ratio, 2) + "x " + tag + "\n";
    }
    // Ratio grid: rows are the non-baseline models, columns the baselines.
    if (t.groups.size() >= 2) {
      out += "\n| Model |";
      std::string rule = "| --- |";
      for (const auto& b : t.groups.front().rows) {
        out += " vs " + name_of(t, b) + " |";
        rule += " --- |";
      }
      out += "\n" + rule + "\n";
      for (std::size_t g = 1; g < t.groups.size(); ++g) {
        for (const auto& o : t.groups[g].rows) {
          out += "| " + name_of(t, o) + " |";
          for (const auto& b : t.groups.front().rows) {
            out += " " + fmt(cost_ratio(t, name_of(t, b), name_of(t, o)).ratio, 2) + "x |";
          }
          out += "\n";
        }
      }
      out += "\nRatios are baseline cost / model cost, " + tag + ".\n";
    }
  }

  const auto ret = retention_vs(t, baseline);
  if (!ret.empty()) {
    out += "\n### Relative to " + baseline + " (% of baseline value) " + tag + "\n\n";
    std::vector<std::string> labels;
    for (const auto& r : ret) {
      if (std::find(labels.begin(), labels.end(), r.column) == labels.end()) labels.push_back(r.column);
    }
    out += "| Model |";
    for (const auto& l : labels) out += " " + l + " |";
    out += "\n| --- |";
    for (std::size_t i = 0; i < labels.size(); ++i) out += " --- |";
    out += "\n";
    std::string current;
    for (const auto& r : ret) {
      if (r.model != current) {
        if (!current.empty()) out += "\n";
        current = r.model;
        out += "| " + r.model + " |";
      }
      out += " " + fmt(r.percent_of_baseline, 1) + " |";
    }
    out += "\n";
  }
  return out;
}

Json report_json(const TableFixture& t, const std::optional<std::string>& baseline_opt,
                 const std::optional<std::string>& other_opt) {
  const std::string baseline = baseline_opt.value_or(default_baseline(t));
  const auto pf = Provenance::paper_fixture;
  Json rows = Json::array();
  for (const auto& g : t.groups) {
    for (const auto& r : g.rows) {
      Json cells = Json::object();
      for (const auto& c : t.columns) cells[c.key] = labeled(r.at(c.key), pf);
      rows.push_back({{"group", g.name}, {"cells", cells}});
    }
  }
  Json out{{"table", t.id}, {"title", t.title}, {"baseline", baseline}, {"rows", rows}};
  if (has_column(t, kCostColumn)) {
    if (auto other = other_opt ? other_opt : default_other(t)) {
      const CostRatio r = cost_ratio(t, baseline, *other);
      out["headline_ratio"] = {{"baseline", r.baseline},
                               {"other", r.other},
                               {"baseline_cost", labeled(r.baseline_cost.to_string(), pf)},
                               {"other_cost", labeled(r.other_cost.to_string(), pf)},
                               {"ratio", labeled(r.ratio, r.provenance)}};
    }
    Json ratios = Json::array();
    for (const auto& r : all_cost_ratios(t)) {
      ratios.push_back({{"baseline", r.baseline}, {"other", r.other}, {"ratio", labeled(r.ratio, r.provenance)}});
    }
    out["cost_ratios"] = ratios;
  }
  Json ret = Json::array();
  for (const auto& r : retention_vs(t, baseline)) {
    ret.push_back({{"model", r.model}, {"column", r.column}, {"percent_of_baseline", labeled(r.percent_of_baseline, pf)}});
  }
  out["relative_to_baseline"] = ret;
  return out;
}

}  // namespace minilab::report
