#ifndef RATIONALIZER_DECIMAL_HPP
#define RATIONALIZER_DECIMAL_HPP

#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rationalizer {

/// Fixed-point decimal with four fractional digits.
///
/// Every score in a report is rounded half-up to one fractional digit, and
/// threshold sweeps step through values like 19.2 and 0.1. Binary floating
/// point would make `7 / 4 -> 1.8` and `24 * 0.8 >= 19.2` depend on
/// representation error, so all arithmetic here is exact integer math on
/// ten-thousandths.
class decimal {
 public:
  static constexpr int max_digits = 4;
  static constexpr std::int64_t scale = 10000;

  constexpr decimal() = default;
  constexpr explicit decimal(int whole) : units_(std::int64_t{whole} * scale) {}

  static constexpr decimal from_units(std::int64_t units) {
    decimal d;
    d.units_ = units;
    return d;
  }

  /// `numerator / denominator` rounded half away from zero to `digits`
  /// fractional digits.
  static constexpr decimal from_ratio(std::int64_t numerator,
                                      std::int64_t denominator,
                                      int digits = 1) {
    if (denominator == 0) throw std::domain_error("decimal: division by zero");
    if (denominator < 0) {
      numerator = -numerator;
      denominator = -denominator;
    }
    const std::int64_t step = pow10(max_digits - check_digits(digits));
    // value in units of 10^-digits, rounded half away from zero
    const __int128 scaled = static_cast<__int128>(numerator) * pow10(digits);
    const __int128 twice = 2 * scaled;
    __int128 q = (twice + (scaled >= 0 ? denominator : -denominator)) /
                 (2 * static_cast<__int128>(denominator));
    return from_units(static_cast<std::int64_t>(q * step));
  }

  /// Exact product rounded half away from zero to `digits` fractional digits.
  static constexpr decimal multiply(decimal a, decimal b, int digits = 1) {
    const __int128 product = static_cast<__int128>(a.units_) * b.units_;
    const __int128 divisor =
        static_cast<__int128>(scale) * pow10(max_digits - check_digits(digits));
    const __int128 half = divisor / 2;
    const __int128 q =
        product >= 0 ? (product + half) / divisor : (product - half) / divisor;
    return from_units(
        static_cast<std::int64_t>(q * pow10(max_digits - digits)));
  }

  /// Scales by `num / den` (e.g. 8/10 for -20%), rounded to full precision.
  constexpr decimal scaled(std::int64_t num, std::int64_t den) const {
    const __int128 p = static_cast<__int128>(units_) * num;
    const __int128 half = den / 2;
    return from_units(
        static_cast<std::int64_t>(p >= 0 ? (p + half) / den : (p - half) / den));
  }

  constexpr decimal rounded(int digits) const {
    return from_ratio(units_, scale, digits);
  }

  constexpr std::int64_t units() const { return units_; }
  double to_double() const { return static_cast<double>(units_) / scale; }

  /// Parses "12", "-3.5", "0.125". More than four fractional digits, exponents
  /// and stray characters are rejected.
  static std::optional<decimal> parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    const auto dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac =
        dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if (frac.size() > static_cast<std::size_t>(max_digits)) return std::nullopt;
    if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
    std::int64_t w = 0;
    if (!whole.empty()) {
      auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), w);
      if (ec != std::errc{} || p != whole.data() + whole.size()) return std::nullopt;
      if (w > 100000000000LL) return std::nullopt;
    }
    std::int64_t f = 0;
    for (char c : frac) {
      if (c < '0' || c > '9') return std::nullopt;
      f = f * 10 + (c - '0');
    }
    f *= pow10(max_digits - static_cast<int>(frac.size()));
    const std::int64_t units = w * scale + f;
    return from_units(negative ? -units : units);
  }

  static decimal parse_or_throw(std::string_view text) {
    if (auto d = parse(text)) return *d;
    throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  }

  /// Fixed notation with exactly `digits` fractional digits (value is rounded
  /// first if it carries more).
  std::string to_string(int digits = 1) const {
    const decimal r = rounded(digits);
    std::int64_t u = r.units_;
    std::string out;
    if (u < 0) {
      out += '-';
      u = -u;
    }
    out += std::to_string(u / scale);
    if (digits > 0) {
      std::string frac = std::to_string(u % scale + scale).substr(1);
      out += '.';
      out += frac.substr(0, static_cast<std::size_t>(digits));
    }
    return out;
  }

  /// Shortest form: trailing fractional zeros dropped, at least one kept.
  std::string to_short_string() const {
    std::string s = to_string(max_digits);
    while (s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    return s;
  }

  friend constexpr decimal operator+(decimal a, decimal b) {
    return from_units(a.units_ + b.units_);
  }
  friend constexpr decimal operator-(decimal a, decimal b) {
    return from_units(a.units_ - b.units_);
  }
  decimal& operator+=(decimal other) {
    units_ += other.units_;
    return *this;
  }
  friend constexpr auto operator<=>(decimal, decimal) = default;
  friend constexpr bool operator==(decimal, decimal) = default;

  friend std::ostream& operator<<(std::ostream& os, decimal d) {
    return os << d.to_short_string();
  }

 private:
  static constexpr std::int64_t pow10(int n) {
    std::int64_t r = 1;
    while (n-- > 0) r *= 10;
    return r;
  }
  static constexpr int check_digits(int digits) {
    if (digits < 0 || digits > max_digits)
      throw std::out_of_range("decimal: unsupported digit count");
    return digits;
  }

  std::int64_t units_ = 0;
};

}  // namespace rationalizer

#endif  // RATIONALIZER_DECIMAL_HPP
