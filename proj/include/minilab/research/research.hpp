#pragma once

#include <span>
#include <string>
#include <vector>

#include "minilab/core/types.hpp"
#include "minilab/gateway/gateway.hpp"
#include "minilab/research/fetcher.hpp"

namespace minilab {

struct ResearchConfig {
  std::string backend;  // default summariser backend
  std::size_t max_dossier_tokens = 2000;
  std::size_t chars_per_token = 4;
  std::size_t max_parallel_fetches = 4;
};

struct FetchFailure {
  std::string url;
  std::string code;
  int status = 0;
};

struct ResearchOutcome {
  ResearchDossier dossier;
  std::vector<FetchFailure> failures;
};

class ResearchProvider {
 public:
  ResearchProvider(Fetcher& fetcher, ChatClient& client, ResearchConfig cfg = {});

  // Fetches every URL (bounded concurrency), then asks the backend for a
  // summary over the goals and all surviving source texts. NO_SOURCES when
  // nothing could be fetched. `backend` overrides the configured one.
  ResearchDossier research_lead(const Lead& lead, std::span<const std::string> goals,
                                std::span<const std::string> urls, Instant now,
                                const std::string& backend = {}) const {
    return research(lead, goals, urls, now, backend).dossier;
  }

  // Same, also reporting which URLs failed and why.
  ResearchOutcome research(const Lead& lead, std::span<const std::string> goals,
                           std::span<const std::string> urls, Instant now,
                           const std::string& backend = {}) const;

  const ResearchConfig& config() const { return cfg_; }

 private:
  Fetcher& fetcher_;
  ChatClient& client_;
  ResearchConfig cfg_;
};

ChatRequest build_research_prompt(const Lead& lead, std::span<const std::string> goals,
                                  std::span<const SourceDocument> sources);

// Expands "{key}" placeholders from the lead profile. Templates naming a key
// the profile lacks are skipped. The profile's profile_url, if any, comes first.
std::vector<std::string> research_urls_for(const Lead& lead, std::span<const std::string> templates);

// Cuts text to at most max_chars bytes without splitting a UTF-8 sequence.
std::string truncate_utf8(const std::string& text, std::size_t max_chars);

}  // namespace minilab
