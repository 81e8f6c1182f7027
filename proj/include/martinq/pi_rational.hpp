#pragma once

#include <ostream>
#include <string>

#include "martinq/rational.hpp"

namespace martinq {

/// Exact number p + q/pi with rational p and q.
///
/// Closed under addition and rational scaling, which is all the Z^2
/// potential kernel and the harmonic-profile identities need. Products or
/// quotients that would leave Q + (1/pi)Q throw InexactError.
class PiRational {
 public:
  PiRational() = default;
  PiRational(Rational rational_part, Rational inv_pi_part = 0)  // NOLINT(google-explicit-constructor)
      : p_(std::move(rational_part)), q_(std::move(inv_pi_part)) {}
  PiRational(long value) : p_(value) {}  // NOLINT(google-explicit-constructor)

  static PiRational inv_pi(Rational coefficient) { return {0, std::move(coefficient)}; }

  const Rational& rational_part() const { return p_; }
  const Rational& inv_pi_part() const { return q_; }
  bool is_rational() const { return q_ == 0; }
  bool is_zero() const { return p_ == 0 && q_ == 0; }

  /// The rational value; throws InexactError when the 1/pi part is nonzero.
  const Rational& as_rational() const;

  PiRational& operator+=(const PiRational& o);
  PiRational& operator-=(const PiRational& o);
  PiRational& operator*=(const Rational& s);
  PiRational& operator/=(const Rational& s);

  friend PiRational operator+(PiRational a, const PiRational& b) { return a += b; }
  friend PiRational operator-(PiRational a, const PiRational& b) { return a -= b; }
  friend PiRational operator-(const PiRational& a) { return {-a.p_, -a.q_}; }
  friend PiRational operator*(PiRational a, const Rational& s) { return a *= s; }
  friend PiRational operator*(const Rational& s, PiRational a) { return a *= s; }
  friend PiRational operator/(PiRational a, const Rational& s) { return a /= s; }

  /// Product; one factor must be rational.
  friend PiRational operator*(const PiRational& a, const PiRational& b);
  /// Quotient; the divisor must be rational.
  friend PiRational operator/(const PiRational& a, const PiRational& b);

  friend bool operator==(const PiRational& a, const PiRational& b) { return a.p_ == b.p_ && a.q_ == b.q_; }

  /// Sign of the real value (-1, 0, 1), evaluated with enough precision to
  /// survive cancellation between the two parts.
  int sign() const;

  double to_double() const;
  long double to_long_double() const;

  /// Decimal rendering with `digits` significant digits.
  std::string numeric(int digits = 12) const;

  /// Exact rendering, e.g. "4 - 8/pi" or "-1 + 8/pi".
  std::string to_string() const;

 private:
  Rational p_{0};
  Rational q_{0};
};

inline std::ostream& operator<<(std::ostream& os, const PiRational& v) { return os << v.to_string(); }

/// Numeric comparisons through the sign of the difference.
inline bool operator<(const PiRational& a, const PiRational& b) { return (a - b).sign() < 0; }
inline bool operator<=(const PiRational& a, const PiRational& b) { return (a - b).sign() <= 0; }

/// Absolute value (numeric sign decides).
PiRational abs(const PiRational& v);

}  // namespace martinq
