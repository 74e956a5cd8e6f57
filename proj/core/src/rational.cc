#include "alo/rational.h"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace alo {

Int128 CheckedMul(Int128 a, Int128 b) {
  Int128 out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("rational arithmetic overflow (mul)");
  }
  return out;
}

Int128 CheckedAdd(Int128 a, Int128 b) {
  Int128 out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("rational arithmetic overflow (add)");
  }
  return out;
}

Int128 Gcd(Int128 a, Int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int128 Lcm(Int128 a, Int128 b) {
  if (a == 0 || b == 0) return 0;
  return CheckedMul(a / Gcd(a, b), b < 0 ? -b : b);
}

std::string Int128ToString(Int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  std::string digits;
  while (v != 0) {
    int d = static_cast<int>(v % 10);
    digits.push_back(static_cast<char>('0' + (d < 0 ? -d : d)));
    v /= 10;
  }
  if (neg) digits.push_back('-');
  return {digits.rbegin(), digits.rend()};
}

Rational::Rational(Int128 num, Int128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Int128 g = Gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

namespace {

Int128 Pow10(int e) {
  Int128 p = 1;
  for (int i = 0; i < e; ++i) p = CheckedMul(p, 10);
  return p;
}

Rational ParseDecimal(std::string_view text) {
  std::string_view s = text;
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  Int128 mantissa = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool seen_digit = false;
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      mantissa = CheckedAdd(CheckedMul(mantissa, 10), c - '0');
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  int exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') {
      throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    std::string_view exp = s.substr(i + 1);
    if (!exp.empty() && exp.front() == '+') exp.remove_prefix(1);
    auto [ptr, ec] =
        std::from_chars(exp.data(), exp.data() + exp.size(), exponent);
    if (ec != std::errc() || ptr != exp.data() + exp.size()) {
      throw std::invalid_argument("bad exponent in '" + std::string(text) +
                                  "'");
    }
  }
  int scale = exponent - frac_digits;
  if (neg) mantissa = -mantissa;
  if (scale >= 0) return Rational(CheckedMul(mantissa, Pow10(scale)), 1);
  return Rational(mantissa, Pow10(-scale));
}

}  // namespace

Rational Rational::Parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return ParseDecimal(text);
  Rational p = ParseDecimal(text.substr(0, slash));
  Rational q = ParseDecimal(text.substr(slash + 1));
  if (q == Rational(0)) throw std::invalid_argument("zero denominator");
  return p / q;
}

Rational Rational::FromDouble(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite value has no rational form");
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::invalid_argument("to_chars failed");
  return ParseDecimal(std::string_view(buf, ptr - buf));
}

double Rational::ToDouble() const {
  // Split off the integer part to keep precision when den is large.
  Int128 q = num_ / den_;
  Int128 r = num_ % den_;
  return static_cast<double>(q) +
         static_cast<double>(r) / static_cast<double>(den_);
}

Int128 Rational::Floor() const {
  Int128 q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

Int128 Rational::Ceil() const {
  Int128 q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Rational::ToString() const {
  if (den_ == 1) return Int128ToString(num_);
  return Int128ToString(num_) + "/" + Int128ToString(den_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational(CheckedAdd(a.num_, b.num_), a.den_);
  Int128 g = Gcd(a.den_, b.den_);
  Int128 bd = b.den_ / g;
  Int128 num = CheckedAdd(CheckedMul(a.num_, bd), CheckedMul(b.num_, a.den_ / g));
  return Rational(num, CheckedMul(a.den_, bd));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  Int128 g1 = Gcd(a.num_, b.den_);
  Int128 g2 = Gcd(b.num_, a.den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  return Rational(CheckedMul(a.num_ / g1, b.num_ / g2),
                  CheckedMul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("rational division by zero");
  return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return a.num_ <=> b.num_;
  Int128 g = Gcd(a.den_, b.den_);
  return CheckedMul(a.num_, b.den_ / g) <=> CheckedMul(b.num_, a.den_ / g);
}

Rational Abs(const Rational& r) { return r < Rational(0) ? -r : r; }

}  // namespace alo
