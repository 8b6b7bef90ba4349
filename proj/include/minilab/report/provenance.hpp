#pragma once

#include <string>

#include "minilab/core/json.hpp"

namespace minilab::report {

// Where a number came from: this program's own computation, or a value copied
// from a published results table.
enum class Provenance { computed, paper_fixture };

inline const char* to_string(Provenance p) { return p == Provenance::computed ? "computed" : "paper-fixture"; }

inline Json labeled(Json value, Provenance p) { return Json{{"value", std::move(value)}, {"provenance", to_string(p)}}; }

}  // namespace minilab::report
