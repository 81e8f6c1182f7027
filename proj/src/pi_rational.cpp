#include "martinq/pi_rational.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "martinq/errors.hpp"

namespace martinq {

namespace {

mpfr_prec_t bits_of(const Rational& r) {
  return static_cast<mpfr_prec_t>(mpz_sizeinbase(r.get_num_mpz_t(), 2) + mpz_sizeinbase(r.get_den_mpz_t(), 2));
}

// RAII holder for an mpfr_t evaluating p + q/pi.
class Evaluated {
 public:
  Evaluated(const Rational& p, const Rational& q, mpfr_prec_t extra) {
    const mpfr_prec_t prec = std::max<mpfr_prec_t>(168, 2 * std::max(bits_of(p), bits_of(q)) + extra);
    mpfr_init2(value_, prec);
    mpfr_t pi, tmp;
    mpfr_init2(pi, prec);
    mpfr_init2(tmp, prec);
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_set_q(tmp, q.get_mpq_t(), MPFR_RNDN);
    mpfr_div(tmp, tmp, pi, MPFR_RNDN);
    mpfr_set_q(value_, p.get_mpq_t(), MPFR_RNDN);
    mpfr_add(value_, value_, tmp, MPFR_RNDN);
    mpfr_clear(pi);
    mpfr_clear(tmp);
  }
  ~Evaluated() { mpfr_clear(value_); }
  Evaluated(const Evaluated&) = delete;
  Evaluated& operator=(const Evaluated&) = delete;

  const mpfr_t& get() const { return value_; }

 private:
  mpfr_t value_;
};

}  // namespace

const Rational& PiRational::as_rational() const {
  if (!is_rational()) throw InexactError("value " + to_string() + " is not rational");
  return p_;
}

PiRational& PiRational::operator+=(const PiRational& o) {
  p_ += o.p_;
  q_ += o.q_;
  return *this;
}

PiRational& PiRational::operator-=(const PiRational& o) {
  p_ -= o.p_;
  q_ -= o.q_;
  return *this;
}

PiRational& PiRational::operator*=(const Rational& s) {
  p_ *= s;
  q_ *= s;
  return *this;
}

PiRational& PiRational::operator/=(const Rational& s) {
  if (s == 0) throw ZeroDenominatorError("division of a PiRational by zero");
  p_ /= s;
  q_ /= s;
  return *this;
}

PiRational operator*(const PiRational& a, const PiRational& b) {
  if (a.is_rational()) return b * a.p_;
  if (b.is_rational()) return a * b.p_;
  throw InexactError("product of two irrational PiRationals leaves Q + Q/pi");
}

PiRational operator/(const PiRational& a, const PiRational& b) {
  if (!b.is_rational()) throw InexactError("division by an irrational PiRational");
  return a / b.p_;
}

int PiRational::sign() const {
  if (q_ == 0) return sgn(p_);
  if (p_ == 0) return sgn(q_);
  if (sgn(p_) == sgn(q_)) return sgn(p_);
  Evaluated v(p_, q_, 64);
  return mpfr_sgn(v.get());
}

double PiRational::to_double() const {
  if (q_ == 0) return martinq::to_double(p_);
  Evaluated v(p_, q_, 64);
  return mpfr_get_d(v.get(), MPFR_RNDN);
}

long double PiRational::to_long_double() const {
  Evaluated v(p_, q_, 64);
  return mpfr_get_ld(v.get(), MPFR_RNDN);
}

std::string PiRational::numeric(int digits) const {
  Evaluated v(p_, q_, 64 + static_cast<mpfr_prec_t>(4 * digits));
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v.get());
  return buf.data();
}

std::string PiRational::to_string() const {
  if (q_ == 0) return martinq::to_string(p_);
  const Rational mag = abs(q_);
  std::string pi_term = mag == 1 ? "1/pi" : (mag.get_den() == 1 ? mag.get_num().get_str() + "/pi"
                                                                 : "(" + martinq::to_string(mag) + ")/pi");
  if (p_ == 0) return (q_ < 0 ? "-" : "") + pi_term;
  return martinq::to_string(p_) + (q_ < 0 ? " - " : " + ") + pi_term;
}

PiRational abs(const PiRational& v) { return v.sign() < 0 ? -v : v; }

}  // namespace martinq
