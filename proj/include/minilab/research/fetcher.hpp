#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "minilab/core/types.hpp"

namespace minilab {

// Pluggable page fetcher. A headless-browser implementation would slot in
// here; the built-in ones do plain GET plus markup stripping.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  // Errors: INVALID_URL, FETCH_FAILED (detail = status), EMPTY_EXTRACTION.
  virtual SourceDocument fetch(const std::string& url, Instant now) = 0;
};

// scheme://rest with a non-empty rest and a known scheme (http, https, file).
bool is_valid_url(std::string_view url);

// Drops comments, script/style bodies and tags, decodes common entities and
// collapses whitespace runs to single spaces.
std::string strip_markup(std::string_view html);

// File stem used by the local corpus for a URL: 16 hex digits of FNV-1a 64.
std::string corpus_key(std::string_view url);

// Test-mode fetcher: every URL maps to {dir}/{corpus_key(url)}.html, with the
// expected extraction alongside as {key}.txt. Missing pages are 404s.
class CorpusFetcher final : public Fetcher {
 public:
  explicit CorpusFetcher(std::filesystem::path dir) : dir_(std::move(dir)) {}
  SourceDocument fetch(const std::string& url, Instant now) override;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// file:// reads from disk, http(s):// issues a GET.
class HttpFetcher final : public Fetcher {
 public:
  explicit HttpFetcher(std::chrono::milliseconds timeout = std::chrono::seconds(20)) : timeout_(timeout) {}
  SourceDocument fetch(const std::string& url, Instant now) override;

 private:
  std::chrono::milliseconds timeout_;
};

}  // namespace minilab
