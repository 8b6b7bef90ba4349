#include "minilab/gateway/money.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "minilab/error.hpp"

namespace minilab {

Money Money::parse(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool any_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    whole = whole * 10 + (text[i] - '0');
    any_digit = true;
    if (whole > 9'000'000) throw Error("PARSE_ERROR", "amount out of range: " + text);
  }
  if (i < text.size() && text[i] == '.') {
    for (++i; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      if (++frac_digits > 12) throw Error("PARSE_ERROR", "more than 12 decimals: " + text);
      frac = frac * 10 + (text[i] - '0');
      any_digit = true;
    }
  }
  if (!any_digit || i != text.size()) throw Error("PARSE_ERROR", "not a decimal amount: '" + text + "'");
  for (int d = frac_digits; d < 12; ++d) frac *= 10;
  const std::int64_t units = whole * kUnitsPerWhole + frac;
  return Money(negative ? -units : units);
}

Money Money::from_double(double value, int decimals) {
  if (!std::isfinite(value) || std::abs(value) > 9e6) {
    throw Error("PARSE_ERROR", "amount out of range");
  }
  const double scale = std::pow(10.0, decimals);
  const auto scaled = static_cast<std::int64_t>(std::llround(value * scale));
  std::int64_t factor = 1;
  for (int d = decimals; d < 12; ++d) factor *= 10;
  return Money(scaled * factor);
}

std::string Money::to_string() const {
  std::string s = to_fixed(12);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string Money::to_fixed(int decimals) const {
  std::int64_t step = 1;
  for (int d = decimals; d < 12; ++d) step *= 10;
  std::int64_t mag = units_ < 0 ? -units_ : units_;
  mag = (mag + step / 2) / step;  // half away from zero
  std::int64_t scale = 1;
  for (int d = 0; d < decimals; ++d) scale *= 10;
  std::string out = (units_ < 0 && mag != 0) ? "-" : "";
  out += std::to_string(mag / scale);
  if (decimals > 0) {
    std::string frac = std::to_string(mag % scale);
    out += '.';
    out.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
    out += frac;
  }
  return out;
}

Money Money::divided_by(std::int64_t n) const {
  if (n == 0) throw Error("DIVIDE_BY_ZERO", "money divided by zero");
  const std::int64_t q = units_ / n;
  const std::int64_t r = units_ % n;
  if (2 * std::llabs(r) >= std::llabs(n)) return Money(q + ((units_ < 0) != (n < 0) ? -1 : 1));
  return Money(q);
}

}  // namespace minilab
