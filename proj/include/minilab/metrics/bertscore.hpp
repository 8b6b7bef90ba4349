#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minilab/metrics/tokenize.hpp"

namespace minilab::metrics {

// Token embeddings produced elsewhere (an embedding backend or a fixture
// file); scoring never runs a model.
struct EmbeddedSeq {
  TokenSeq tokens;
  std::vector<std::vector<double>> vectors;
  std::vector<double> idf;
};

struct ScoreTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct BertScoreResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double baseline = 0.0;
  std::optional<ScoreTriple> rescaled;  // set when a baseline was supplied
};

// P: idf-weighted mean over candidate tokens of the best cosine similarity to
// any reference token; R: the same from the reference side; F1 = 2PR/(P+R).
// Errors: EMPTY_SEQUENCE, SHAPE_MISMATCH, DIMENSION_MISMATCH, ZERO_NORM,
// NEGATIVE_IDF, ZERO_IDF_MASS, INVALID_BASELINE.
BertScoreResult bert_score(const EmbeddedSeq& candidate, const EmbeddedSeq& reference,
                           std::optional<double> baseline = std::nullopt);

// (score - b) / (1 - b); INVALID_BASELINE unless 0 <= b < 1.
double rescale_baseline(double score, double b);

// idf(t) = log((N + 1) / (df(t) + 1)) over N reference documents.
struct IdfTable {
  std::size_t documents = 0;
  std::map<std::string, double> weights;

  double weight(const std::string& token) const;  // unseen tokens: df = 0
};
IdfTable compute_idf(const std::vector<TokenSeq>& corpus);

// One record per line: {"token": "cat", "idf": 1.0, "vector": [0.1, ...]}.
EmbeddedSeq load_embedding_fixture(const std::string& path);
void save_embedding_fixture(const std::string& path, const EmbeddedSeq& seq);

}  // namespace minilab::metrics
