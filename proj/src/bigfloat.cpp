#include "prandtl/bigfloat.hpp"

#include <algorithm>
#include <cstdlib>

namespace prandtl {

static mpfr_prec_t pmax(const Big& a, const Big& b) {
  return std::max(a.prec(), b.prec());
}

#define BIG_BINOP(op, fn)                              \
  Big operator op(const Big& a, const Big& b) {        \
    Big r(pmax(a, b));                                 \
    fn(r.raw(), a.raw(), b.raw(), MPFR_RNDN);          \
    return r;                                          \
  }
BIG_BINOP(+, mpfr_add)
BIG_BINOP(-, mpfr_sub)
BIG_BINOP(*, mpfr_mul)
BIG_BINOP(/, mpfr_div)
#undef BIG_BINOP

Big pow(const Big& a, const Big& b) {
  Big r(pmax(a, b));
  mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}

Big pow(const Big& a, long n) {
  Big r(a.prec());
  mpfr_pow_si(r.raw(), a.raw(), n, MPFR_RNDN);
  return r;
}

Big log(const Big& a) {
  Big r(a.prec());
  mpfr_log(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Big exp(const Big& a) {
  Big r(a.prec());
  mpfr_exp(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Big sqrt(const Big& a) {
  Big r(a.prec());
  mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Big abs(const Big& a) {
  Big r(a.prec());
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Big min(const Big& a, const Big& b) { return a <= b ? a : b; }
Big max(const Big& a, const Big& b) { return a >= b ? a : b; }

Big rel_err(const Big& a, const Big& b) {
  Big den = max(abs(a), abs(b));
  if (den.zero()) return Big(0.0, a.prec());
  return abs(a - b) / den;
}

double Big::log2d() const {
  mpfr_t t;
  mpfr_init2(t, 64);
  mpfr_log2(t, v_, MPFR_RNDN);
  double r = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clear(t);
  return r;
}

std::string Big::str(int digits) const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Re", digits, v_);
  std::string out(s ? s : "");
  mpfr_free_str(s);
  return out;
}

}  // namespace prandtl
