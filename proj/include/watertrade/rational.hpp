#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace watertrade {

// Exact rational over 64-bit integers, always kept in lowest terms with a
// positive denominator. Intermediate products use 128-bit arithmetic; a
// result that does not reduce back into 64 bits throws std::overflow_error.
// Monetary values, LP coefficients and satisfaction ratios all use this type
// so that optimality checks are equality checks; to_double() is the lossy
// view used for metrics output only.
class Rat {
public:
  Rat() = default;
  Rat(long long value) : num_(value), den_(1) {}
  Rat(long long numerator, long long denominator) {
    *this = make(static_cast<__int128>(numerator),
                 static_cast<__int128>(denominator));
  }

  long long num() const { return num_; }
  long long den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rat abs() const { return num_ < 0 ? Rat(-num_, den_) : *this; }

  // Largest integer <= value.
  long long floor() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  long long ceil() const {
    long long q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  // Banker's rounding: ties go to the even integer.
  long long round_half_even() const {
    long long q = floor();
    __int128 rem2 = 2 * (static_cast<__int128>(num_) -
                         static_cast<__int128>(q) * den_);
    if (rem2 > den_) return q + 1;
    if (rem2 < den_) return q;
    return (q % 2 == 0) ? q : q + 1;
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                i128(a.den_) * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rat operator-() const {
    Rat r = *this;
    r.num_ = -r.num_;
    return r;
  }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    __int128 lhs = i128(a.num_) * b.den_;
    __int128 rhs = i128(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  // Accepts "12", "-3.50" and "7/2".
  static Rat parse(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty number");
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
      long long n = parse_int(text.substr(0, slash));
      long long d = parse_int(text.substr(slash + 1));
      return Rat(n, d);
    }
    bool negative = false;
    std::string_view body = text;
    if (body.front() == '-' || body.front() == '+') {
      negative = body.front() == '-';
      body.remove_prefix(1);
    }
    auto dot = body.find('.');
    std::string_view int_part = dot == std::string_view::npos ? body : body.substr(0, dot);
    std::string_view frac_part = dot == std::string_view::npos
                                     ? std::string_view{}
                                     : body.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
      throw std::invalid_argument("malformed number: " + std::string(text));
    if (frac_part.size() > 18)
      throw std::invalid_argument("too many decimal digits: " + std::string(text));
    __int128 num = 0;
    for (char c : int_part) {
      if (c < '0' || c > '9')
        throw std::invalid_argument("malformed number: " + std::string(text));
      num = num * 10 + (c - '0');
      if (num > std::numeric_limits<long long>::max())
        throw std::overflow_error("number out of range: " + std::string(text));
    }
    __int128 den = 1;
    for (char c : frac_part) {
      if (c < '0' || c > '9')
        throw std::invalid_argument("malformed number: " + std::string(text));
      num = num * 10 + (c - '0');
      den *= 10;
      if (num > std::numeric_limits<long long>::max())
        throw std::overflow_error("number out of range: " + std::string(text));
    }
    return make(negative ? -num : num, den);
  }

  // Canonical text form: integer, finite decimal when the denominator is
  // 2^a*5^b, otherwise "num/den". parse() round-trips every output.
  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    long long d = den_;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
    int digits = twos > fives ? twos : fives;
    __int128 scaled = num_ < 0 ? -i128(num_) : i128(num_);
    for (int i = 0; i < digits; ++i) scaled *= 10;
    scaled /= den_;
    std::string raw;
    if (scaled == 0) raw = "0";
    while (scaled > 0) {
      raw.insert(raw.begin(), static_cast<char>('0' + int(scaled % 10)));
      scaled /= 10;
    }
    while (static_cast<int>(raw.size()) <= digits) raw.insert(raw.begin(), '0');
    raw.insert(raw.size() - digits, ".");
    while (raw.back() == '0') raw.pop_back();
    if (raw.back() == '.') raw.pop_back();
    return (num_ < 0 ? "-" : "") + raw;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) {
    return os << r.str();
  }

private:
  static __int128 i128(long long v) { return static_cast<__int128>(v); }

  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static long long parse_int(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("malformed number");
    bool negative = false;
    if (text.front() == '-' || text.front() == '+') {
      negative = text.front() == '-';
      text.remove_prefix(1);
    }
    if (text.empty()) throw std::invalid_argument("malformed number");
    __int128 value = 0;
    for (char c : text) {
      if (c < '0' || c > '9') throw std::invalid_argument("malformed number");
      value = value * 10 + (c - '0');
      if (value > std::numeric_limits<long long>::max())
        throw std::overflow_error("number out of range");
    }
    return static_cast<long long>(negative ? -value : value);
  }

  static Rat make(__int128 n, __int128 d) {
    if (d == 0) throw std::invalid_argument("zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lo = std::numeric_limits<long long>::min();
    constexpr __int128 hi = std::numeric_limits<long long>::max();
    if (n < lo || n > hi || d > hi)
      throw std::overflow_error("rational out of 64-bit range");
    Rat r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  long long num_ = 0;
  long long den_ = 1;
};

}  // namespace watertrade
