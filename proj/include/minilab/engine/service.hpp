#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "minilab/engine/campaign.hpp"
#include "minilab/metrics/kpi.hpp"

namespace minilab::engine {

struct ArmKpis {
  std::string arm_id;
  bool paused = false;
  std::size_t leads = 0;
  std::optional<metrics::KpiReport> kpi;  // absent before any delivery
};

struct ServiceOptions {
  std::string state_dir;  // empty = in-memory only
  const ResearchProvider* research = nullptr;
};

// Thread-safe front for many campaigns. Calls on one campaign are serialised
// by that campaign's mutex; different campaigns proceed in parallel. With a
// state directory, each campaign appends to campaign-<id>.jsonl and load()
// replays those files.
class CampaignService {
 public:
  using Options = ServiceOptions;

  CampaignService(ChatClient& client, Options opts);
  CampaignService(const CampaignService&) = delete;
  CampaignService& operator=(const CampaignService&) = delete;

  // Replays every campaign log in the state directory. Returns how many.
  std::size_t load();

  // DUPLICATE_CAMPAIGN, INVALID_ID, plus spec validation codes.
  CampaignState create_campaign(const CampaignSpec& spec, Instant now);
  LeadState add_lead(const std::string& campaign_id, const Lead& lead, Instant now);
  std::vector<MessageRecord> tick(const std::string& campaign_id, Instant now);

  // Without a campaign id the lead is looked up across campaigns
  // (AMBIGUOUS_LEAD if it exists in more than one).
  bool ingest_event(const std::optional<std::string>& campaign_id, const EngagementEvent& ev);

  MessageRecord draft_reply(const std::string& campaign_id, const std::string& lead_id, Instant now);
  void pause_arm(const std::string& campaign_id, const std::string& arm_id);
  void resume_arm(const std::string& campaign_id, const std::string& arm_id);

  CampaignState snapshot(const std::string& campaign_id) const;
  LeadState lead(const std::string& campaign_id, const std::string& lead_id) const;
  std::vector<ArmKpis> arm_kpis(const std::string& campaign_id) const;
  std::vector<std::string> campaign_ids() const;

 private:
  struct Slot {
    std::mutex mu;
    std::ofstream out;
    std::optional<Campaign> campaign;
  };

  Slot& slot(const std::string& id) const;
  Campaign::Options campaign_options(Slot& s) const;
  std::filesystem::path log_path(const std::string& id) const;

  ChatClient& client_;
  Options opts_;
  std::mutex create_mu_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
};

// Letters, digits, '.', '_' and '-', not starting with '.'.
bool is_safe_id(const std::string& id);

}  // namespace minilab::engine
