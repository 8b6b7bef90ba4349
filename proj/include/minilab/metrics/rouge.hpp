#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ranges>
#include <vector>

#include "minilab/error.hpp"
#include "minilab/metrics/tokenize.hpp"

namespace minilab::metrics {

inline constexpr double kDefaultRougeBeta = 1.2;

struct RougeResult {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  double beta = kDefaultRougeBeta;
  std::size_t lcs = 0;
};

// Length of the longest common subsequence, O(|a|·|b|) time, O(|b|) space.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
std::size_t lcs_length(const A& a, const B& b) {
  const auto n = static_cast<std::size_t>(std::ranges::size(a));
  const auto m = static_cast<std::size_t>(std::ranges::size(b));
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto& ai = std::ranges::begin(a)[static_cast<std::ptrdiff_t>(i - 1)];
    for (std::size_t j = 1; j <= m; ++j) {
      if (ai == std::ranges::begin(b)[static_cast<std::ptrdiff_t>(j - 1)]) {
        cur[j] = prev[j - 1] + 1;
      } else {
        cur[j] = std::max(prev[j], cur[j - 1]);
      }
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// (1 + β²)·R·P / (R + β²·P), 0 when the denominator vanishes.
inline double rouge_f(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = recall + b2 * precision;
  return denom > 0.0 ? (1.0 + b2) * recall * precision / denom : 0.0;
}

// P = LCS/|candidate|, R = LCS/|reference|. An empty candidate scores zero;
// an empty reference is EMPTY_REFERENCE.
template <std::ranges::random_access_range A, std::ranges::random_access_range B>
RougeResult rouge_l(const A& candidate, const B& reference, double beta = kDefaultRougeBeta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error("INVALID_BETA", "beta must be positive");
  const auto ref_len = static_cast<std::size_t>(std::ranges::size(reference));
  if (ref_len == 0) throw Error("EMPTY_REFERENCE", "ROUGE-L needs a non-empty reference");
  RougeResult r;
  r.beta = beta;
  const auto cand_len = static_cast<std::size_t>(std::ranges::size(candidate));
  if (cand_len == 0) return r;
  r.lcs = lcs_length(candidate, reference);
  r.precision = static_cast<double>(r.lcs) / static_cast<double>(cand_len);
  r.recall = static_cast<double>(r.lcs) / static_cast<double>(ref_len);
  r.f_measure = rouge_f(r.precision, r.recall, beta);
  return r;
}

inline RougeResult rouge_l_text(std::string_view candidate, std::string_view reference,
                                double beta = kDefaultRougeBeta) {
  return rouge_l(tokenize(candidate), tokenize(reference), beta);
}

}  // namespace minilab::metrics
