#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minilab/core/types.hpp"

namespace minilab::metrics {

enum class ClaimLabel { supported, contradicted, unverifiable };

const char* to_string(ClaimLabel l);
ClaimLabel parse_claim_label(const std::string& s);

struct ClaimVerdict {
  std::string claim;
  ClaimLabel label = ClaimLabel::unverifiable;
  std::optional<std::string> source_ref;  // URL, required unless unverifiable

  bool operator==(const ClaimVerdict&) const = default;
};

// 100 · supported / (supported + contradicted). Unverifiable claims are left
// out; nullopt means NOT_APPLICABLE (no verifiable claim at all).
std::optional<double> factual_accuracy(std::span<const ClaimVerdict> claims);

class ClaimExtractor {
 public:
  virtual ~ClaimExtractor() = default;
  virtual std::vector<ClaimVerdict> extract(const std::string& output,
                                            std::span<const SourceDocument> sources) const = 0;
};

// Claims are numeric tokens ("$12M", "15%"), date-shaped tokens ("2021",
// "2024-03-01", "March 2021") and runs of two or more capitalised words.
// A claim is supported when its folded form (lowercase, punctuation dropped)
// occurs as a contiguous token run in a source. A number or date is
// contradicted when a source places a different value of the same shape
// within four tokens after the word that precedes the claim in the output
// ("raised $15M" vs "raised $12M"). Everything else is unverifiable.
class RuleBasedClaimExtractor final : public ClaimExtractor {
 public:
  std::vector<ClaimVerdict> extract(const std::string& output,
                                    std::span<const SourceDocument> sources) const override;
};

std::vector<ClaimVerdict> extract_claims(const std::string& output, std::span<const SourceDocument> sources);

// Case/punctuation folding shared by claims and sources: lowercase
// alphanumerics, keep '.' between digits and a trailing '%', drop ',' between
// digits, everything else separates.
std::vector<std::string> fold_tokens(const std::string& text);

}  // namespace minilab::metrics
