#include "minilab/research/research.hpp"

#include <future>
#include <set>

#include "minilab/error.hpp"

namespace minilab {

ResearchProvider::ResearchProvider(Fetcher& fetcher, ChatClient& client, ResearchConfig cfg)
    : fetcher_(fetcher), client_(client), cfg_(std::move(cfg)) {
  if (cfg_.max_parallel_fetches == 0) cfg_.max_parallel_fetches = 1;
}

ResearchOutcome ResearchProvider::research(const Lead& lead, std::span<const std::string> goals,
                                           std::span<const std::string> urls, Instant now,
                                           const std::string& backend) const {
  std::vector<std::string> unique;
  std::set<std::string> seen;
  for (const auto& u : urls) {
    if (seen.insert(u).second) unique.push_back(u);
  }

  struct Slot {
    std::optional<SourceDocument> doc;
    std::optional<FetchFailure> failure;
  };
  std::vector<Slot> slots(unique.size());
  auto fetch_one = [&](std::size_t i) {
    try {
      slots[i].doc = fetcher_.fetch(unique[i], now);
    } catch (const Error& e) {
      slots[i].failure = FetchFailure{unique[i], e.code(), e.detail()};
    }
  };
  for (std::size_t start = 0; start < unique.size(); start += cfg_.max_parallel_fetches) {
    const std::size_t end = std::min(unique.size(), start + cfg_.max_parallel_fetches);
    if (end - start == 1) {
      fetch_one(start);
      continue;
    }
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, fetch_one, i));
    for (auto& f : batch) f.get();
  }

  ResearchOutcome out;
  std::vector<SourceDocument> sources;
  for (auto& s : slots) {
    if (s.doc) sources.push_back(std::move(*s.doc));
    if (s.failure) out.failures.push_back(std::move(*s.failure));
  }
  if (sources.empty()) {
    throw Error("NO_SOURCES", "no source could be fetched for lead '" + lead.id + "'");
  }

  const std::string& chosen = backend.empty() ? cfg_.backend : backend;
  if (chosen.empty()) throw Error("UNKNOWN_BACKEND", "no research backend configured");
  ChatRequest req = build_research_prompt(lead, goals, sources);
  req.tag = UsageTag{lead.id, UsagePurpose::research};
  ChatResponse resp = client_.complete(chosen, req);
  resp.usage.timestamp = now;

  out.dossier.lead_id = lead.id;
  out.dossier.summary = truncate_utf8(resp.text, cfg_.max_dossier_tokens * cfg_.chars_per_token);
  out.dossier.sources = std::move(sources);
  out.dossier.model_backend = chosen;
  out.dossier.usage = resp.usage;
  return out;
}

ChatRequest build_research_prompt(const Lead& lead, std::span<const std::string> goals,
                                  std::span<const SourceDocument> sources) {
  std::string system =
      "You are a market research analyst preparing a briefing for a sales outreach. "
      "Use only facts stated in the sources and keep every figure exactly as written.";
  std::string user = "Lead profile:\n";
  for (const auto& [k, v] : lead.profile) user += k + ": " + v + "\n";
  user += "\nResearch goals:\n";
  for (const auto& g : goals) user += "- " + g + "\n";
  user += "\nTask: write a research summary covering the goals.\n\nSources:\n";
  for (std::size_t i = 0; i < sources.size(); ++i) {
    user += "[" + std::to_string(i + 1) + "] " + sources[i].url + "\n" + sources[i].text + "\n\n";
  }
  return ChatRequest{{{Role::system, system}, {Role::user, user}}, {}};
}

std::vector<std::string> research_urls_for(const Lead& lead, std::span<const std::string> templates) {
  std::vector<std::string> out;
  if (auto it = lead.profile.find("profile_url"); it != lead.profile.end() && !it->second.empty()) {
    out.push_back(it->second);
  }
  for (const auto& tmpl : templates) {
    std::string url;
    bool ok = true;
    for (std::size_t i = 0; i < tmpl.size();) {
      if (tmpl[i] == '{') {
        const auto close = tmpl.find('}', i);
        if (close == std::string::npos) {
          ok = false;
          break;
        }
        const auto it = lead.profile.find(tmpl.substr(i + 1, close - i - 1));
        if (it == lead.profile.end()) {
          ok = false;
          break;
        }
        url += it->second;
        i = close + 1;
      } else {
        url += tmpl[i++];
      }
    }
    if (ok) out.push_back(std::move(url));
  }
  return out;
}

std::string truncate_utf8(const std::string& text, std::size_t max_chars) {
  if (text.size() <= max_chars) return text;
  std::size_t cut = max_chars;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return text.substr(0, cut);
}

}  // namespace minilab
