#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace minilab {

// Exact decimal currency amount stored as an integer count of 1e-12 units.
// Token prices carry at most six decimals per million tokens, so
// tokens x price is always an exact multiple of this unit.
class Money {
 public:
  static constexpr std::int64_t kUnitsPerWhole = 1'000'000'000'000LL;

  constexpr Money() = default;
  static constexpr Money from_units(std::int64_t units) { return Money(units); }
  static Money parse(const std::string& text);  // "0.1383", "-2", "12.5"
  static Money from_double(double value, int decimals = 6);

  constexpr std::int64_t units() const { return units_; }
  double to_double() const { return static_cast<double>(units_) / kUnitsPerWhole; }
  // Shortest exact decimal ("0.046", "12", "0.1383").
  std::string to_string() const;
  // Rounded half-away-from-zero to `decimals` places, zero padded.
  std::string to_fixed(int decimals) const;

  Money& operator+=(Money o) {
    units_ += o.units_;
    return *this;
  }
  friend Money operator+(Money a, Money b) { return a += b; }
  friend Money operator-(Money a, Money b) { return Money(a.units_ - b.units_); }
  friend Money operator*(Money a, std::int64_t k) { return Money(a.units_ * k); }
  // Rounded to the nearest unit, halves away from zero.
  Money divided_by(std::int64_t n) const;

  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t units) : units_(units) {}
  std::int64_t units_ = 0;
};

}  // namespace minilab
