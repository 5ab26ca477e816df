#pragma once

#include <mpfr.h>

#include <string>

namespace prandtl {

// Thin RAII wrapper over an MPFR float. Precision travels with the value;
// binary ops compute at the max precision of the operands.
class Big {
 public:
  explicit Big(mpfr_prec_t prec = 256) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Big(double x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
  Big(long x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, x, MPFR_RNDN); }
  Big(const char* s, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_str(v_, s, 10, MPFR_RNDN); }
  Big(const Big& o) { mpfr_init2(v_, o.prec()); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Big(Big&& o) noexcept { mpfr_init2(v_, o.prec()); mpfr_swap(v_, o.v_); }
  Big& operator=(const Big& o) {
    if (this != &o) { mpfr_set_prec(v_, o.prec()); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  Big& operator=(Big&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Big() { mpfr_clear(v_); }

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  double d() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // log2 of |x| as a double (safe for values far outside double range).
  double log2d() const;
  std::string str(int digits = 30) const;
  bool finite() const { return mpfr_number_p(v_) != 0; }
  bool zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  friend Big operator+(const Big& a, const Big& b);
  friend Big operator-(const Big& a, const Big& b);
  friend Big operator*(const Big& a, const Big& b);
  friend Big operator/(const Big& a, const Big& b);
  friend bool operator<(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator<=(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator>=(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
  friend bool operator==(const Big& a, const Big& b) { return mpfr_cmp(a.v_, b.v_) == 0; }

 private:
  mpfr_t v_;
};

Big pow(const Big& a, const Big& b);
Big pow(const Big& a, long n);
Big log(const Big& a);
Big exp(const Big& a);
Big sqrt(const Big& a);
Big abs(const Big& a);
Big min(const Big& a, const Big& b);
Big max(const Big& a, const Big& b);
// |a-b| / max(|a|,|b|); zero when both are zero.
Big rel_err(const Big& a, const Big& b);

}  // namespace prandtl
