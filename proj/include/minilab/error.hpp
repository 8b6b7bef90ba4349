#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace minilab {

// Every failure surfaced by the library carries a stable, machine-readable
// code such as "EMPTY_SEQUENCE" or "BACKEND_ERROR". `detail` holds an extra
// integer when the code is parameterised (HTTP status for BACKEND_ERROR and
// FETCH_FAILED), zero otherwise.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, int detail = 0)
      : std::runtime_error(code + ": " + message), code_(std::move(code)), detail_(detail) {}

  const std::string& code() const noexcept { return code_; }
  int detail() const noexcept { return detail_; }

 private:
  std::string code_;
  int detail_;
};

}  // namespace minilab
