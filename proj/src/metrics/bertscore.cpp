#include "minilab/metrics/bertscore.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "minilab/core/json.hpp"
#include "minilab/error.hpp"

namespace minilab::metrics {

namespace {

void check(const EmbeddedSeq& s, const char* which) {
  const std::string w = which;
  if (s.tokens.empty()) throw Error("EMPTY_SEQUENCE", w + " has no tokens");
  if (s.vectors.size() != s.tokens.size() || s.idf.size() != s.tokens.size()) {
    throw Error("SHAPE_MISMATCH", w + ": tokens, vectors and idf differ in length");
  }
  const std::size_t dim = s.vectors.front().size();
  if (dim == 0) throw Error("DIMENSION_MISMATCH", w + " has zero-dimensional vectors");
  double mass = 0.0;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (s.vectors[i].size() != dim) throw Error("DIMENSION_MISMATCH", w + " mixes vector dimensions");
    if (!(s.idf[i] >= 0.0) || !std::isfinite(s.idf[i])) {
      throw Error("NEGATIVE_IDF", w + " has a negative or non-finite idf weight");
    }
    mass += s.idf[i];
  }
  if (!(mass > 0.0)) throw Error("ZERO_IDF_MASS", w + " idf weights sum to zero");
}

std::vector<std::vector<double>> normalized(const EmbeddedSeq& s, const char* which) {
  std::vector<std::vector<double>> out;
  out.reserve(s.vectors.size());
  for (const auto& v : s.vectors) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error("ZERO_NORM", std::string(which) + " contains a zero or non-finite vector");
    }
    std::vector<double> u(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) u[k] = v[k] / norm;
    out.push_back(std::move(u));
  }
  return out;
}

double f1_of(double p, double r) { return p + r != 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

BertScoreResult bert_score(const EmbeddedSeq& candidate, const EmbeddedSeq& reference,
                           std::optional<double> baseline) {
  check(candidate, "candidate");
  check(reference, "reference");
  if (candidate.vectors.front().size() != reference.vectors.front().size()) {
    throw Error("DIMENSION_MISMATCH", "candidate and reference embedding dimensions differ");
  }
  const auto cand = normalized(candidate, "candidate");
  const auto ref = normalized(reference, "reference");

  const std::size_t n = cand.size(), m = ref.size();
  std::vector<double> best_c(n, -std::numeric_limits<double>::infinity());
  std::vector<double> best_r(m, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < cand[i].size(); ++k) dot += cand[i][k] * ref[j][k];
      best_c[i] = std::max(best_c[i], dot);
      best_r[j] = std::max(best_r[j], dot);
    }
  }
  auto weighted_mean = [](const std::vector<double>& best, const std::vector<double>& w) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < best.size(); ++i) {
      num += w[i] * best[i];
      den += w[i];
    }
    return num / den;
  };

  BertScoreResult r;
  r.precision = weighted_mean(best_c, candidate.idf);
  r.recall = weighted_mean(best_r, reference.idf);
  r.f1 = f1_of(r.precision, r.recall);
  if (baseline) {
    r.baseline = *baseline;
    const double p = rescale_baseline(r.precision, *baseline);
    const double rr = rescale_baseline(r.recall, *baseline);
    r.rescaled = ScoreTriple{p, rr, rescale_baseline(r.f1, *baseline)};
  }
  return r;
}

double rescale_baseline(double score, double b) {
  if (!(b >= 0.0 && b < 1.0)) throw Error("INVALID_BASELINE", "baseline must lie in [0, 1)");
  return (score - b) / (1.0 - b);
}

double IdfTable::weight(const std::string& token) const {
  if (auto it = weights.find(token); it != weights.end()) return it->second;
  return std::log(static_cast<double>(documents + 1));
}

IdfTable compute_idf(const std::vector<TokenSeq>& corpus) {
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    for (const auto& t : std::set<std::string>(doc.begin(), doc.end())) ++df[t];
  }
  IdfTable table;
  table.documents = corpus.size();
  for (const auto& [t, count] : df) {
    table.weights[t] = std::log(static_cast<double>(corpus.size() + 1) / static_cast<double>(count + 1));
  }
  return table;
}

EmbeddedSeq load_embedding_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("FILE_NOT_FOUND", "cannot open " + path);
  EmbeddedSeq seq;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = json_util::parse_text(line, path.c_str());
    try {
      seq.tokens.push_back(j.at("token").get<std::string>());
      seq.idf.push_back(j.value("idf", 1.0));
      seq.vectors.push_back(j.at("vector").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw Error("PARSE_ERROR", path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return seq;
}

void save_embedding_fixture(const std::string& path, const EmbeddedSeq& seq) {
  std::ofstream out(path);
  if (!out) throw Error("FILE_NOT_FOUND", "cannot write " + path);
  for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
    out << Json{{"token", seq.tokens[i]}, {"idf", seq.idf[i]}, {"vector", seq.vectors[i]}}.dump() << '\n';
  }
}

}  // namespace minilab::metrics
