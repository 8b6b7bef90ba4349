#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "minilab/core/json.hpp"
#include "minilab/metrics/kpi.hpp"
#include "minilab/sim/simulator.hpp"

namespace minilab::report {

struct ArmSummary {
  std::string arm_id;
  std::string backend;
  std::size_t leads = 0;
  sim::SimCounters counters;
  Money cost;  // all lead-attributed usage on this arm
};

// What one simulated campaign contributes to the reports; small enough to
// keep for every campaign of a run.
struct CampaignSummary {
  std::size_t index = 0;  // 1-based
  std::string campaign_id;
  std::uint64_t seed = 0;
  std::size_t leads = 0;
  std::size_t steps_sent = 0;
  std::size_t replies_sent = 0;
  std::size_t failed_leads = 0;
  sim::SimCounters counters;
  std::vector<ArmSummary> arms;
  Money lead_cost;      // sum over leads
  Money template_cost;  // campaign-level drafts
};

CampaignSummary summarize(const sim::ExperimentResult& r, std::size_t index, const std::string& campaign_id,
                          std::uint64_t seed);

// KPI block with counts and provenance-labelled rates.
Json kpi_json(const metrics::KpiReport& k);

Json campaign_report(const CampaignSummary& s);

// Sums counters per arm across campaigns and recomputes rates from the sums;
// cost per lead is total lead cost over total leads.
Json aggregate_report(const std::vector<CampaignSummary>& runs, std::uint64_t seed);

// Markdown of an aggregate report; every figure tagged [computed].
std::string render_aggregate(const Json& aggregate);

}  // namespace minilab::report
