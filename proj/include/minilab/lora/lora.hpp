#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "minilab/error.hpp"
#include "minilab/lora/matrix.hpp"

namespace minilab::lora {

struct LayerShape {
  std::string name;
  std::int64_t d = 1;  // rows
  std::int64_t k = 1;  // columns
};

struct LoraSpec {
  std::int64_t rank = 16;
  double alpha = 32.0;
  double dropout = 0.05;
};

inline void validate(const LayerShape& s) {
  if (s.d < 1 || s.k < 1) throw Error("INVALID_SHAPE", "layer '" + s.name + "' needs d, k >= 1");
}

inline void validate(const LoraSpec& s) {
  if (s.rank < 1) throw Error("INVALID_RANK", "LoRA rank must be >= 1");
}

// Adapter parameters for one layer: B is d×r, A is r×k.
inline std::int64_t trainable_params(const LayerShape& shape, const LoraSpec& spec) {
  validate(shape);
  validate(spec);
  return spec.rank * (shape.d + shape.k);
}

inline std::int64_t full_params(const LayerShape& shape) {
  validate(shape);
  return shape.d * shape.k;
}

// Percentage reduction of trainable parameters versus updating the full d×k
// matrix: 100 · (1 - r(d + k) / (d·k)). Negative once r(d+k) exceeds d·k.
inline double reduction_ratio(const LayerShape& shape, const LoraSpec& spec) {
  const double adapter = static_cast<double>(trainable_params(shape, spec));
  return 100.0 * (1.0 - adapter / static_cast<double>(full_params(shape)));
}

// Set when the rank is not well below min(d, k); advisory only.
inline std::optional<std::string> rank_warning(const LayerShape& shape, const LoraSpec& spec) {
  const std::int64_t limit = std::min(shape.d, shape.k);
  if (spec.rank >= limit) {
    return "rank " + std::to_string(spec.rank) + " is not below min(d, k) = " + std::to_string(limit) +
           "; the adapter is full rank";
  }
  return std::nullopt;
}

inline constexpr double kSmallModelLimit = 3e9;

// r = 16 up to and including 3B parameters, 32 above; alpha 32, dropout 0.05.
inline LoraSpec rank_for_model(double param_count) {
  if (!(param_count > 0.0)) throw Error("INVALID_PARAM_COUNT", "parameter count must be positive");
  return LoraSpec{param_count <= kSmallModelLimit ? 16 : 32, 32.0, 0.05};
}

enum class MergeScaling {
  literal,        // W = W0 + B·A
  alpha_over_r,   // W = W0 + (alpha / r)·B·A
};

template <typename T>
struct MergeInput {
  Matrix<T> w0;  // d×k, frozen
  Matrix<T> b;   // d×r
  Matrix<T> a;   // r×k
};

template <typename T>
void check_conformant(const MergeInput<T>& m) {
  if (m.b.rows() != m.w0.rows() || m.a.cols() != m.w0.cols() || m.b.cols() != m.a.rows()) {
    throw Error("DIMENSION_MISMATCH", "W0 is " + std::to_string(m.w0.rows()) + "x" + std::to_string(m.w0.cols()) +
                                          ", B is " + std::to_string(m.b.rows()) + "x" + std::to_string(m.b.cols()) +
                                          ", A is " + std::to_string(m.a.rows()) + "x" + std::to_string(m.a.cols()));
  }
}

// Returns a new d×k matrix; inputs are untouched. `alpha` is only read for
// MergeScaling::alpha_over_r.
template <typename T>
Matrix<T> merge_weights(const MergeInput<T>& m, MergeScaling scaling = MergeScaling::literal, T alpha = T{32}) {
  check_conformant(m);
  const std::size_t d = m.w0.rows(), k = m.w0.cols(), r = m.b.cols();
  const T scale = (scaling == MergeScaling::alpha_over_r && r > 0) ? alpha / static_cast<T>(r) : T{1};
  Matrix<T> w = m.w0;
  // i-p-j loop order walks A and W row-wise.
  for (std::size_t i = 0; i < d; ++i) {
    auto out = w.row(i);
    for (std::size_t p = 0; p < r; ++p) {
      const T bip = scale * m.b(i, p);
      if (bip == T{}) continue;
      const auto a_row = m.a.row(p);
      for (std::size_t j = 0; j < k; ++j) out[j] += bip * a_row[j];
    }
  }
  return w;
}

}  // namespace minilab::lora
