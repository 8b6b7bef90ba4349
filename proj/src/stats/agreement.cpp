#include "minilab/stats/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "minilab/error.hpp"

namespace minilab::stats {

const char* to_string(Statistic s) {
  switch (s) {
    case Statistic::cohen_kappa: return "cohen_kappa";
    case Statistic::krippendorff_alpha: return "krippendorff_alpha";
    case Statistic::pearson_r: return "pearson_r";
  }
  return "?";
}

const char* to_string(AlphaMetric m) { return m == AlphaMetric::nominal ? "nominal" : "interval"; }

AlphaMetric parse_alpha_metric(const std::string& s) {
  if (s == "nominal") return AlphaMetric::nominal;
  if (s == "interval") return AlphaMetric::interval;
  throw Error("PARSE_ERROR", "unknown alpha metric '" + s + "'");
}

AgreementResult cohen_kappa(const std::vector<std::vector<double>>& confusion) {
  const std::size_t k = confusion.size();
  if (k == 0) throw Error("INVALID_MATRIX", "confusion matrix is empty");
  std::vector<double> rows(k, 0.0), cols(k, 0.0);
  double total = 0.0, diagonal = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (confusion[i].size() != k) throw Error("INVALID_MATRIX", "confusion matrix is not square");
    for (std::size_t j = 0; j < k; ++j) {
      const double c = confusion[i][j];
      if (!(c >= 0.0) || !std::isfinite(c)) throw Error("INVALID_MATRIX", "negative or non-finite count");
      rows[i] += c;
      cols[j] += c;
      total += c;
      if (i == j) diagonal += c;
    }
  }
  if (!(total > 0.0)) throw Error("INVALID_MATRIX", "confusion matrix has no observations");
  // (N·diag - Σ r·c) / (N² - Σ r·c): same value as (p_o - p_e) / (1 - p_e),
  // but exact on integer counts.
  double chance = 0.0;
  for (std::size_t i = 0; i < k; ++i) chance += rows[i] * cols[i];
  const double denom = total * total - chance;
  if (denom <= 1e-15 * total * total) throw Error("DEGENERATE", "chance agreement is 1; kappa undefined");
  return {Statistic::cohen_kappa, (total * diagonal - chance) / denom, "two-rater"};
}

AgreementResult cohen_kappa(std::span<const std::string> rater_a, std::span<const std::string> rater_b) {
  if (rater_a.size() != rater_b.size()) throw Error("LENGTH_MISMATCH", "raters labelled different item counts");
  std::map<std::string, std::size_t> index;
  for (const auto& l : rater_a) index.emplace(l, 0);
  for (const auto& l : rater_b) index.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [_, i] : index) i = next++;
  std::vector<std::vector<double>> m(index.size(), std::vector<double>(index.size(), 0.0));
  for (std::size_t i = 0; i < rater_a.size(); ++i) m[index[rater_a[i]]][index[rater_b[i]]] += 1.0;
  return cohen_kappa(m);
}

AgreementResult krippendorff_alpha(const std::vector<std::vector<double>>& units, AlphaMetric metric) {
  std::vector<double> values;
  std::size_t pairable = 0;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    ++pairable;
    for (double v : u) {
      if (!std::isfinite(v)) throw Error("INVALID_RATING", "non-finite rating value");
      values.push_back(v);
    }
  }
  if (pairable < 2) throw Error("INSUFFICIENT_DATA", "alpha needs at least two units with two ratings");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t v = values.size();
  auto idx = [&](double x) {
    return static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), x) - values.begin());
  };
  auto delta2 = [&](std::size_t c, std::size_t k) {
    if (metric == AlphaMetric::nominal) return c == k ? 0.0 : 1.0;
    const double d = values[c] - values[k];
    return d * d;
  };

  // Coincidence matrix: every ordered pair of values from different raters of
  // one unit contributes 1/(m_u - 1).
  std::vector<std::vector<double>> o(v, std::vector<double>(v, 0.0));
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    const double w = 1.0 / static_cast<double>(u.size() - 1);
    for (std::size_t a = 0; a < u.size(); ++a) {
      for (std::size_t b = 0; b < u.size(); ++b) {
        if (a != b) o[idx(u[a])][idx(u[b])] += w;
      }
    }
  }
  std::vector<double> n_c(v, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t k = 0; k < v; ++k) n_c[c] += o[c][k];
    n += n_c[c];
  }
  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t k = 0; k < v; ++k) {
      const double d = delta2(c, k);
      observed += o[c][k] * d;
      expected += n_c[c] * n_c[k] * d;
    }
  }
  observed /= n;
  expected /= n * (n - 1.0);
  if (!(expected > 0.0)) throw Error("DEGENERATE", "expected disagreement is zero; alpha undefined");
  return {Statistic::krippendorff_alpha, 1.0 - observed / expected, to_string(metric)};
}

AgreementResult krippendorff_alpha(std::span<const RatingRecord> records, AlphaMetric metric) {
  std::map<std::string, std::vector<double>> by_item;
  for (const auto& r : records) {
    rating_to_percent(r.rating);
    by_item[r.item_id].push_back(static_cast<double>(r.rating));
  }
  std::vector<std::vector<double>> units;
  units.reserve(by_item.size());
  for (auto& [_, vals] : by_item) units.push_back(std::move(vals));
  return krippendorff_alpha(units, metric);
}

AgreementResult pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("LENGTH_MISMATCH", "x and y differ in length");
  if (x.size() < 2) throw Error("INSUFFICIENT_DATA", "correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error("ZERO_VARIANCE", "a series has zero variance");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return {Statistic::pearson_r, r, "product-moment"};
}

}  // namespace minilab::stats
