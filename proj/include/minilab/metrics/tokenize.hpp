#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace minilab::metrics {

using TokenSeq = std::vector<std::string>;

// Reference tokenizer: ASCII-lowercased runs of letters/digits (bytes >= 0x80
// count as letters). Whitespace and punctuation only separate tokens.
inline TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace minilab::metrics
