#pragma once

#include <span>
#include <string>
#include <vector>

#include "minilab/stats/ratings.hpp"

namespace minilab::stats {

enum class Statistic { cohen_kappa, krippendorff_alpha, pearson_r };
enum class AlphaMetric { nominal, interval };

const char* to_string(Statistic s);
const char* to_string(AlphaMetric m);
AlphaMetric parse_alpha_metric(const std::string& s);

struct AgreementResult {
  Statistic statistic = Statistic::cohen_kappa;
  double value = 0.0;
  std::string variant;  // e.g. "interval" for alpha; reports always name it
};

// κ = (p_o - p_e) / (1 - p_e) from a square matrix of co-counts between two
// raters (rows: rater A's category, columns: rater B's). DEGENERATE when
// p_e = 1; INVALID_MATRIX for non-square, negative or empty input.
AgreementResult cohen_kappa(const std::vector<std::vector<double>>& confusion);

// Same from paired labels; categories are the union of both label sets.
AgreementResult cohen_kappa(std::span<const std::string> rater_a, std::span<const std::string> rater_b);

// Krippendorff's α via the coincidence matrix: α = 1 - D_o / D_e. Each unit
// holds the values its raters gave; units with fewer than two values are not
// pairable and are dropped. INSUFFICIENT_DATA below two pairable units,
// DEGENERATE when D_e = 0.
AgreementResult krippendorff_alpha(const std::vector<std::vector<double>>& units, AlphaMetric metric);
AgreementResult krippendorff_alpha(std::span<const RatingRecord> records,
                                   AlphaMetric metric = AlphaMetric::interval);

// Product-moment correlation. LENGTH_MISMATCH, INSUFFICIENT_DATA (< 2
// points), ZERO_VARIANCE.
AgreementResult pearson_r(std::span<const double> x, std::span<const double> y);

}  // namespace minilab::stats
