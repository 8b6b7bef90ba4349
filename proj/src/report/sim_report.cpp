#include "minilab/report/sim_report.hpp"

#include <cstdio>
#include <map>

#include "minilab/report/provenance.hpp"

namespace minilab::report {

namespace {

constexpr auto kComputed = Provenance::computed;

Json counters_kpi(const sim::SimCounters& c) {
  if (c.delivered == 0) return Json(nullptr);
  return kpi_json(metrics::kpi_from_counts(c.delivered, c.opens, c.clicks, c.replies, c.unsubscribes));
}

Json money_json(const Money& m) { return labeled(m.to_fixed(6), kComputed); }

void add(sim::SimCounters& into, const sim::SimCounters& c) {
  into.delivered += c.delivered;
  into.opens += c.opens;
  into.clicks += c.clicks;
  into.replies += c.replies;
  into.unsubscribes += c.unsubscribes;
}

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

CampaignSummary summarize(const sim::ExperimentResult& r, std::size_t index, const std::string& campaign_id,
                          std::uint64_t seed) {
  CampaignSummary s;
  s.index = index;
  s.campaign_id = campaign_id;
  s.seed = seed;
  s.leads = r.state.leads.size();
  s.steps_sent = r.steps_sent;
  s.replies_sent = r.replies_sent;
  s.failed_leads = r.failed_leads;
  s.counters = r.counters;
  for (const auto& a : r.arms) {
    s.arms.push_back({a.arm_id, a.backend, a.leads, a.counters, a.cost});
    s.lead_cost = s.lead_cost + a.cost;
  }
  s.template_cost = r.total_cost - s.lead_cost;
  return s;
}

Json kpi_json(const metrics::KpiReport& k) {
  return Json{{"delivered", k.delivered},
              {"opens", k.opens},
              {"clicks", k.clicks},
              {"replies", k.replies},
              {"unsubscribes", k.unsubscribes},
              {"open_rate", labeled(k.open_rate, kComputed)},
              {"ctr", labeled(k.ctr, kComputed)},
              {"reply_rate", labeled(k.reply_rate, kComputed)},
              {"unsub_rate", labeled(k.unsub_rate, kComputed)}};
}

Json campaign_report(const CampaignSummary& s) {
  Json arms = Json::array();
  for (const auto& a : s.arms) {
    Json per_lead = a.leads ? money_json(a.cost.divided_by(static_cast<std::int64_t>(a.leads))) : Json(nullptr);
    arms.push_back({{"arm_id", a.arm_id},
                    {"backend", a.backend},
                    {"leads", a.leads},
                    {"kpi", counters_kpi(a.counters)},
                    {"cost", money_json(a.cost)},
                    {"cost_per_lead", per_lead}});
  }
  Json per_lead = s.leads ? money_json(s.lead_cost.divided_by(static_cast<std::int64_t>(s.leads))) : Json(nullptr);
  return Json{{"kind", "campaign"},
              {"campaign", s.index},
              {"campaign_id", s.campaign_id},
              {"seed", s.seed},
              {"leads", s.leads},
              {"steps_sent", s.steps_sent},
              {"replies_sent", s.replies_sent},
              {"failed_leads", s.failed_leads},
              {"kpi", counters_kpi(s.counters)},
              {"arms", arms},
              {"cost",
               {{"leads_total", money_json(s.lead_cost)},
                {"templates", money_json(s.template_cost)},
                {"per_lead", per_lead}}}};
}

Json aggregate_report(const std::vector<CampaignSummary>& runs, std::uint64_t seed) {
  sim::SimCounters total;
  Money lead_cost, template_cost;
  std::size_t leads = 0, steps = 0, replies = 0, failed = 0;
  std::map<std::string, ArmSummary> arms;
  std::vector<std::string> arm_order;
  for (const auto& r : runs) {
    add(total, r.counters);
    lead_cost = lead_cost + r.lead_cost;
    template_cost = template_cost + r.template_cost;
    leads += r.leads;
    steps += r.steps_sent;
    replies += r.replies_sent;
    failed += r.failed_leads;
    for (const auto& a : r.arms) {
      auto [it, fresh] = arms.try_emplace(a.arm_id, ArmSummary{a.arm_id, a.backend, 0, {}, {}});
      if (fresh) arm_order.push_back(a.arm_id);
      it->second.leads += a.leads;
      add(it->second.counters, a.counters);
      it->second.cost = it->second.cost + a.cost;
    }
  }
  Json arm_json = Json::array();
  for (const auto& id : arm_order) {
    const ArmSummary& a = arms.at(id);
    Json per_lead = a.leads ? money_json(a.cost.divided_by(static_cast<std::int64_t>(a.leads))) : Json(nullptr);
    arm_json.push_back({{"arm_id", a.arm_id},
                        {"backend", a.backend},
                        {"leads", a.leads},
                        {"kpi", counters_kpi(a.counters)},
                        {"cost", money_json(a.cost)},
                        {"cost_per_lead", per_lead}});
  }
  const double mean_steps = leads ? static_cast<double>(steps) / static_cast<double>(leads) : 0.0;
  Json per_lead = leads ? money_json(lead_cost.divided_by(static_cast<std::int64_t>(leads))) : Json(nullptr);
  return Json{{"kind", "aggregate"},
              {"seed", seed},
              {"campaigns", runs.size()},
              {"leads", leads},
              {"steps_sent", steps},
              {"mean_steps_per_lead", labeled(mean_steps, kComputed)},
              {"replies_sent", replies},
              {"failed_leads", failed},
              {"kpi", counters_kpi(total)},
              {"arms", arm_json},
              {"cost",
               {{"leads_total", money_json(lead_cost)},
                {"templates", money_json(template_cost)},
                {"per_lead", per_lead}}}};
}

std::string render_aggregate(const Json& a) {
  const std::string tag = std::string("[") + to_string(kComputed) + "]";
  auto rate = [](const Json& kpi, const char* key) {
    return kpi.is_null() ? std::string("n/a") : fmt(kpi.at(key).at("value").get<double>(), 2);
  };
  auto cost = [](const Json& c) { return c.is_null() ? std::string("n/a") : "$" + c.at("value").get<std::string>(); };
  std::string out = "## Simulated campaigns " + tag + "\n\n";
  out += std::to_string(a.at("campaigns").get<std::size_t>()) + " campaigns, " +
         std::to_string(a.at("leads").get<std::size_t>()) + " leads, seed " +
         std::to_string(a.at("seed").get<std::uint64_t>()) + ", mean steps per lead " +
         fmt(a.at("mean_steps_per_lead").at("value").get<double>(), 2) + "\n\n";
  out += "| Arm | Backend | Leads | Cost per lead | CTR (%) | Open Rate (%) | Response Rate (%) | Unsub Rate (%) |\n";
  out += "| --- | --- | --- | --- | --- | --- | --- | --- |\n";
  auto line = [&](const std::string& arm, const std::string& backend, const Json& leads, const Json& per_lead,
                  const Json& kpi) {
    out += "| " + arm + " | " + backend + " | " + std::to_string(leads.get<std::size_t>()) + " | " + cost(per_lead) +
           " | " + rate(kpi, "ctr") + " | " + rate(kpi, "open_rate") + " | " + rate(kpi, "reply_rate") + " | " +
           rate(kpi, "unsub_rate") + " |\n";
  };
  for (const auto& arm : a.at("arms")) {
    line(arm.at("arm_id").get<std::string>(), arm.at("backend").get<std::string>(), arm.at("leads"),
         arm.at("cost_per_lead"), arm.at("kpi"));
  }
  line("all", "-", a.at("leads"), a.at("cost").at("per_lead"), a.at("kpi"));
  return out;
}

}  // namespace minilab::report
