#include "minilab/research/fetcher.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "minilab/error.hpp"
#include "minilab/hash.hpp"

namespace minilab {

namespace {

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  }
  return true;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x110000) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Decodes the entity starting at text[pos] == '&'. Returns chars consumed, 0
// when it is not a recognised entity.
std::size_t decode_entity(std::string_view text, std::size_t pos, std::string& out) {
  const auto semi = text.find(';', pos);
  if (semi == std::string_view::npos || semi - pos > 10) return 0;
  const std::string_view name = text.substr(pos + 1, semi - pos - 1);
  static constexpr std::pair<std::string_view, std::string_view> named[] = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}};
  for (const auto& [n, v] : named) {
    if (name == n) {
      out += v;
      return semi - pos + 1;
    }
  }
  if (name.size() > 1 && name[0] == '#') {
    unsigned long cp = 0;
    const bool hex = name[1] == 'x' || name[1] == 'X';
    const std::string digits(name.substr(hex ? 2 : 1));
    if (digits.empty()) return 0;
    try {
      std::size_t used = 0;
      cp = std::stoul(digits, &used, hex ? 16 : 10);
      if (used != digits.size()) return 0;
    } catch (const std::exception&) {
      return 0;
    }
    append_utf8(out, cp);
    return semi - pos + 1;
  }
  return 0;
}

SourceDocument extracted(const std::string& url, Instant now, std::string_view markup) {
  SourceDocument doc{url, now, strip_markup(markup)};
  if (doc.text.empty()) throw Error("EMPTY_EXTRACTION", "no text extracted from " + url);
  return doc;
}

std::string read_file(const std::filesystem::path& path, const std::string& url) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FETCH_FAILED", "not found: " + url, 404);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

bool is_valid_url(std::string_view url) {
  const auto sep = url.find("://");
  if (sep == std::string_view::npos || sep + 3 >= url.size()) return false;
  const auto scheme = url.substr(0, sep);
  if (scheme != "http" && scheme != "https" && scheme != "file") return false;
  return std::none_of(url.begin(), url.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::string strip_markup(std::string_view html) {
  std::string raw;
  raw.reserve(html.size());
  std::size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '<') {
      if (html.compare(i, 4, "<!--") == 0) {
        const auto end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        raw += ' ';
        continue;
      }
      bool skipped_body = false;
      for (std::string_view tag : {"script", "style", "noscript", "template"}) {
        if (starts_with_ci(html, i + 1, tag)) {
          const std::string close = "</" + std::string(tag);
          std::size_t end = i;
          while ((end = html.find("</", end + 1)) != std::string_view::npos && !starts_with_ci(html, end, close)) {
          }
          if (end == std::string_view::npos) {
            i = html.size();
          } else {
            const auto gt = html.find('>', end);
            i = gt == std::string_view::npos ? html.size() : gt + 1;
          }
          skipped_body = true;
          break;
        }
      }
      if (!skipped_body) {
        const auto gt = html.find('>', i);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
      raw += ' ';
      continue;
    }
    if (c == '&') {
      if (const auto used = decode_entity(html, i, raw); used > 0) {
        i += used;
        continue;
      }
    }
    raw += c;
    ++i;
  }

  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += ch;
    }
  }
  return out;
}

std::string corpus_key(std::string_view url) { return hex64(fnv1a64(url)); }

SourceDocument CorpusFetcher::fetch(const std::string& url, Instant now) {
  if (!is_valid_url(url)) throw Error("INVALID_URL", "invalid url: " + url);
  return extracted(url, now, read_file(dir_ / (corpus_key(url) + ".html"), url));
}

SourceDocument HttpFetcher::fetch(const std::string& url, Instant now) {
  if (!is_valid_url(url)) throw Error("INVALID_URL", "invalid url: " + url);
  if (url.rfind("file://", 0) == 0) {
    return extracted(url, now, read_file(std::filesystem::path(url.substr(7)), url));
  }
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (origin.rfind("https://", 0) == 0) throw Error("FETCH_FAILED", "built without TLS support", 0);
#endif
  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  auto res = client.Get(path);
  if (!res) throw Error("FETCH_FAILED", url + ": " + httplib::to_string(res.error()), 0);
  if (res->status != 200) {
    throw Error("FETCH_FAILED", url + " returned HTTP " + std::to_string(res->status), res->status);
  }
  return extracted(url, now, res->body);
}

}  // namespace minilab
