#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "dualuta/error.hpp"

namespace dualuta {

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Text form: integers print as "3", values whose denominator divides a power
/// of ten print as exact decimals ("2.5", "-0.125"), everything else as
/// "num/den" ("8/3"). parse() accepts all three forms.
class Rational {
 public:
  using Integer = boost::multiprecision::cpp_int;
  using Value = boost::multiprecision::cpp_rational;

  Rational() = default;
  Rational(std::int64_t n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw Error(ErrorCode::kInvalidArgument, "zero denominator");
    v_ = Value(Integer(num), Integer(den));
  }
  explicit Rational(Value v) : v_(std::move(v)) {}

  static Rational from_integers(const Integer& num, const Integer& den) {
    if (den == 0) throw Error(ErrorCode::kInvalidArgument, "zero denominator");
    return Rational(Value(num, den));
  }

  static Rational parse(std::string_view text);

  std::string to_string() const;

  Integer numerator() const { return boost::multiprecision::numerator(v_); }
  Integer denominator() const { return boost::multiprecision::denominator(v_); }
  const Value& value() const { return v_; }

  int sign() const { return v_.sign(); }
  bool is_zero() const { return v_.is_zero(); }

  /// Nearest double; only for display and plotting, never for decisions.
  double to_double() const { return v_.convert_to<double>(); }

  Rational operator-() const { return Rational(Value(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw Error(ErrorCode::kInvalidArgument, "division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
  }

 private:
  Value v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

/// Smallest k with 2^k >= r, for r > 0 (k may be negative).
inline int ceil_log2(const Rational& r) {
  if (r.sign() <= 0) throw Error(ErrorCode::kInvalidArgument, "ceil_log2 of non-positive value");
  int k = 0;
  Rational p(1);
  while (p < r) { p *= 2; ++k; }
  while (p / 2 >= r) { p /= 2; --k; }
  return k;
}

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Error {
    return Error(ErrorCode::kMalformedValue, "not a rational: \"" + std::string(text) + "\"");
  };
  auto parse_integer = [&](std::string_view digits, bool allow_sign) -> Integer {
    bool negative = false;
    if (allow_sign && !digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
      negative = digits.front() == '-';
      digits.remove_prefix(1);
    }
    if (digits.empty()) throw fail();
    Integer n = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') throw fail();
      n = n * 10 + (c - '0');
    }
    return negative ? Integer(-n) : n;
  };

  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw fail();

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash), true);
    Integer den = parse_integer(text.substr(slash + 1), false);
    if (den == 0) throw fail();
    return from_integers(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if (whole.empty() && frac.empty()) throw fail();
    Integer w = whole.empty() ? Integer(0) : parse_integer(whole, false);
    Integer f = frac.empty() ? Integer(0) : parse_integer(frac, false);
    Integer scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    Integer num = w * scale + f;
    return from_integers(negative ? Integer(-num) : num, scale);
  }
  return from_integers(parse_integer(text, true), 1);
}

inline std::string Rational::to_string() const {
  Integer num = numerator();
  Integer den = denominator();
  if (den == 1) return num.str();

  Integer rest = den;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  if (rest != 1) return num.str() + "/" + den.str();

  // den = 2^a 5^b: scale to den' = 10^max(a,b) and print as a decimal.
  int digits = std::max(twos, fives);
  Integer scale = 1;
  for (int k = 0; k < digits; ++k) scale *= 10;
  bool negative = num < 0;
  Integer scaled = (negative ? Integer(-num) : num) * (scale / den);
  std::string s = scaled.str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, digits - s.size() + 1, '0');
  s.insert(s.size() - digits, ".");
  return negative ? "-" + s : s;
}

/// A possibly-missing answer value; std::nullopt is the "None" answer.
using OptionalValue = std::optional<Rational>;

/// Orders missing values after every present value.
inline bool none_last_less(const OptionalValue& a, const OptionalValue& b) {
  if (!a) return false;
  if (!b) return true;
  return *a < *b;
}

inline std::string to_string(const OptionalValue& v) { return v ? v->to_string() : "None"; }

}  // namespace dualuta

template <>
struct std::hash<dualuta::Rational> {
  std::size_t operator()(const dualuta::Rational& r) const {
    return std::hash<std::string>{}(r.to_string());
  }
};
