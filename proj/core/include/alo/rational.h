#ifndef ALO_RATIONAL_H_
#define ALO_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace alo {

using Int128 = __int128;

// Exact rational number over 128-bit integers, always stored reduced with a
// positive denominator. Arithmetic throws std::overflow_error instead of
// wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT
  Rational(Int128 num, Int128 den);

  // Exact value of the shortest decimal representation that round-trips to
  // `value`, so 0.2 becomes 1/5 rather than the nearest dyadic fraction.
  static Rational FromDouble(double value);
  // Parses "12", "-0.05", "1e-3", "3/4".
  static Rational Parse(std::string_view text);

  Int128 num() const { return num_; }
  Int128 den() const { return den_; }

  double ToDouble() const;
  bool IsInteger() const { return den_ == 1; }
  Int128 Floor() const;
  Int128 Ceil() const;
  // "p" or "p/q".
  std::string ToString() const;

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b);

 private:
  Int128 num_ = 0;
  Int128 den_ = 1;
};

Rational Abs(const Rational& r);

// Checked helpers shared with the integer row kernels.
Int128 CheckedMul(Int128 a, Int128 b);
Int128 CheckedAdd(Int128 a, Int128 b);
Int128 Gcd(Int128 a, Int128 b);
Int128 Lcm(Int128 a, Int128 b);
std::string Int128ToString(Int128 v);

}  // namespace alo

#endif  // ALO_RATIONAL_H_
