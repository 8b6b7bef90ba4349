#include "minilab/engine/service.hpp"

#include <algorithm>

#include "minilab/error.hpp"

namespace minilab::engine {

namespace fs = std::filesystem;

bool is_safe_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '.' || c == '_' || c == '-';
  });
}

CampaignService::CampaignService(ChatClient& client, Options opts) : client_(client), opts_(std::move(opts)) {
  if (!opts_.state_dir.empty()) fs::create_directories(opts_.state_dir);
}

fs::path CampaignService::log_path(const std::string& id) const {
  return fs::path(opts_.state_dir) / ("campaign-" + id + ".jsonl");
}

Campaign::Options CampaignService::campaign_options(Slot& s) const {
  Campaign::Options o;
  o.research = opts_.research;
  o.keep_log = false;
  if (!opts_.state_dir.empty()) {
    o.sink = [&s](const Json& e) {
      s.out << e.dump() << '\n';
      s.out.flush();
      if (!s.out) throw Error("IO_ERROR", "failed to append to campaign log");
    };
  }
  return o;
}

std::size_t CampaignService::load() {
  if (opts_.state_dir.empty()) return 0;
  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(opts_.state_dir)) {
    const std::string name = de.path().filename().string();
    if (de.is_regular_file() && name.rfind("campaign-", 0) == 0 && de.path().extension() == ".jsonl") {
      files.push_back(de.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::unique_lock lk(map_mu_);
  std::size_t n = 0;
  for (const auto& p : files) {
    const auto entries = read_log(p.string());
    if (entries.empty()) continue;
    auto s = std::make_unique<Slot>();
    s->campaign.emplace(Campaign::restore(entries, client_, campaign_options(*s)));
    const std::string id = s->campaign->state().spec.id;
    s->out.open(p, std::ios::app);
    slots_[id] = std::move(s);
    ++n;
  }
  return n;
}

CampaignService::Slot& CampaignService::slot(const std::string& id) const {
  std::shared_lock lk(map_mu_);
  auto it = slots_.find(id);
  if (it == slots_.end()) throw Error("UNKNOWN_CAMPAIGN", "no campaign '" + id + "'");
  return *it->second;
}

CampaignState CampaignService::create_campaign(const CampaignSpec& spec, Instant now) {
  if (!is_safe_id(spec.id)) throw Error("INVALID_ID", "campaign id '" + spec.id + "' is not a safe identifier");
  // Creations are serialised so the slot is published fully built.
  std::lock_guard create_guard(create_mu_);
  {
    std::shared_lock lk(map_mu_);
    if (slots_.count(spec.id)) throw Error("DUPLICATE_CAMPAIGN", "campaign '" + spec.id + "' exists");
  }
  auto s = std::make_unique<Slot>();
  try {
    if (!opts_.state_dir.empty()) {
      s->out.open(log_path(spec.id), std::ios::trunc);
      if (!s->out) throw Error("IO_ERROR", "cannot write " + log_path(spec.id).string());
    }
    s->campaign.emplace(Campaign::create(spec, now, client_, campaign_options(*s)));
  } catch (...) {
    s->out.close();
    if (!opts_.state_dir.empty()) fs::remove(log_path(spec.id));
    throw;
  }
  CampaignState out = s->campaign->state();
  std::unique_lock lk(map_mu_);
  slots_[spec.id] = std::move(s);
  return out;
}

LeadState CampaignService::add_lead(const std::string& campaign_id, const Lead& lead, Instant now) {
  Slot& s = slot(campaign_id);
  std::lock_guard g(s.mu);
  return s.campaign->add_lead(lead, now);
}

std::vector<MessageRecord> CampaignService::tick(const std::string& campaign_id, Instant now) {
  Slot& s = slot(campaign_id);
  std::lock_guard g(s.mu);
  return s.campaign->tick(now);
}

bool CampaignService::ingest_event(const std::optional<std::string>& campaign_id, const EngagementEvent& ev) {
  std::string id;
  if (campaign_id) {
    id = *campaign_id;
  } else {
    std::vector<Slot*> all;
    {
      std::shared_lock lk(map_mu_);
      for (auto& [cid, s] : slots_) all.push_back(s.get());
    }
    std::vector<std::string> owners;
    for (Slot* s : all) {
      std::lock_guard g(s->mu);
      if (s->campaign && s->campaign->state().leads.count(ev.lead_id)) owners.push_back(s->campaign->state().spec.id);
    }
    if (owners.empty()) throw Error("UNKNOWN_LEAD", "no campaign has lead '" + ev.lead_id + "'");
    if (owners.size() > 1) throw Error("AMBIGUOUS_LEAD", "lead '" + ev.lead_id + "' exists in several campaigns");
    id = owners.front();
  }
  Slot& s = slot(id);
  std::lock_guard g(s.mu);
  return s.campaign->ingest_event(ev);
}

MessageRecord CampaignService::draft_reply(const std::string& campaign_id, const std::string& lead_id, Instant now) {
  Slot& s = slot(campaign_id);
  std::lock_guard g(s.mu);
  return s.campaign->draft_reply(lead_id, now);
}

void CampaignService::pause_arm(const std::string& campaign_id, const std::string& arm_id) {
  Slot& s = slot(campaign_id);
  std::lock_guard g(s.mu);
  s.campaign->pause_arm(arm_id);
}

void CampaignService::resume_arm(const std::string& campaign_id, const std::string& arm_id) {
  Slot& s = slot(campaign_id);
  std::lock_guard g(s.mu);
  s.campaign->resume_arm(arm_id);
}

CampaignState CampaignService::snapshot(const std::string& campaign_id) const {
  Slot& s = slot(campaign_id);
  std::lock_guard g(s.mu);
  return s.campaign->state();
}

LeadState CampaignService::lead(const std::string& campaign_id, const std::string& lead_id) const {
  Slot& s = slot(campaign_id);
  std::lock_guard g(s.mu);
  return s.campaign->lead(lead_id);
}

std::vector<ArmKpis> CampaignService::arm_kpis(const std::string& campaign_id) const {
  const CampaignState st = snapshot(campaign_id);
  std::vector<ArmKpis> out;
  for (const auto& arm : st.spec.variant_arms) {
    ArmKpis k;
    k.arm_id = arm.arm_id;
    k.paused = st.paused_arms.count(arm.arm_id) > 0;
    std::vector<EngagementEvent> events;
    for (const auto& [id, ls] : st.leads) {
      if (ls.lead.arm_id != arm.arm_id) continue;
      ++k.leads;
      events.insert(events.end(), ls.events.begin(), ls.events.end());
    }
    try {
      k.kpi = metrics::kpi_rates(events);
    } catch (const Error& e) {
      if (e.code() != "NO_DELIVERIES") throw;
    }
    out.push_back(std::move(k));
  }
  return out;
}

std::vector<std::string> CampaignService::campaign_ids() const {
  std::shared_lock lk(map_mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : slots_) out.push_back(id);
  return out;
}

}  // namespace minilab::engine
