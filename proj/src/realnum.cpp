#include "zkmedian/realnum.hpp"

#include <algorithm>
#include <cctype>

#include "zkmedian/errors.hpp"

namespace zkmedian {

Rat rat_from_decimal(const std::string& s) {
  if (s.empty()) fail(errc::parameter, "empty decimal string");
  size_t point = std::string::npos;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (point != std::string::npos) fail(errc::parameter, "multiple points in decimal: " + s);
      point = i;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      fail(errc::parameter, "invalid decimal string: " + s);
    }
  }
  std::string digits = s;
  size_t frac_len = 0;
  if (point != std::string::npos) {
    frac_len = s.size() - point - 1;
    digits.erase(point, 1);
  }
  if (digits.empty()) fail(errc::parameter, "no digits in decimal: " + s);
  Int num(digits, 10);
  Int den = 1;
  for (size_t i = 0; i < frac_len; ++i) den *= 10;
  Rat q(num, den);
  q.canonicalize();
  return q;
}

Interval::Interval(mpfr_prec_t prec) : prec_(prec) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(const Interval& other) : prec_(other.prec_) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : prec_(other.prec_) {
  mpfr_init2(lo_, prec_);
  mpfr_init2(hi_, prec_);
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(const Interval& other) {
  if (this != &other) {
    mpfr_set_prec(lo_, other.prec_);
    mpfr_set_prec(hi_, other.prec_);
    prec_ = other.prec_;
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
  if (this != &other) {
    std::swap(prec_, other.prec_);
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
  }
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

Interval Interval::from_rat(const Rat& q, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_int(const Int& z, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
  return r;
}

Interval Interval::exp_rat(const Rat& q, mpfr_prec_t prec) {
  Interval r(prec);
  mpfr_t t;
  mpfr_init2(t, prec);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDD);
  mpfr_exp(r.lo_, t, MPFR_RNDD);
  mpfr_set_q(t, q.get_mpq_t(), MPFR_RNDU);
  mpfr_exp(r.hi_, t, MPFR_RNDU);
  mpfr_clear(t);
  return r;
}

Interval add(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

Interval sub(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
  mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
  return r;
}

Interval mul(const Interval& a, const Interval& b) {
  // Outward product over all endpoint pairings; signs handled uniformly.
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_t t;
  mpfr_init2(t, r.prec_);
  const mpfr_srcptr as[2] = {a.lo_, a.hi_};
  const mpfr_srcptr bs[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto& x : as)
    for (auto& y : bs) {
      mpfr_mul(t, x, y, MPFR_RNDD);
      if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_mul(t, x, y, MPFR_RNDU);
      if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}

Interval div(const Interval& a, const Interval& b) {
  if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0)
    fail(errc::audit_precision, "interval division by an interval containing zero");
  Interval r(std::max(a.prec_, b.prec_));
  mpfr_t t;
  mpfr_init2(t, r.prec_);
  const mpfr_srcptr as[2] = {a.lo_, a.hi_};
  const mpfr_srcptr bs[2] = {b.lo_, b.hi_};
  bool first = true;
  for (auto& x : as)
    for (auto& y : bs) {
      mpfr_div(t, x, y, MPFR_RNDD);
      if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
      mpfr_div(t, x, y, MPFR_RNDU);
      if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
      first = false;
    }
  mpfr_clear(t);
  return r;
}

Interval Interval::abs() const {
  Interval r(prec_);
  if (mpfr_sgn(lo_) >= 0) {
    mpfr_set(r.lo_, lo_, MPFR_RNDD);
    mpfr_set(r.hi_, hi_, MPFR_RNDU);
  } else if (mpfr_sgn(hi_) <= 0) {
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  } else {
    mpfr_set_zero(r.lo_, 1);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    if (mpfr_cmp(hi_, r.hi_) > 0) mpfr_set(r.hi_, hi_, MPFR_RNDU);
  }
  return r;
}

Interval Interval::mul_int(const Int& z) const {
  Interval r(prec_);
  if (z >= 0) {
    mpfr_mul_z(r.lo_, lo_, z.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(r.hi_, hi_, z.get_mpz_t(), MPFR_RNDU);
  } else {
    mpfr_mul_z(r.lo_, hi_, z.get_mpz_t(), MPFR_RNDD);
    mpfr_mul_z(r.hi_, lo_, z.get_mpz_t(), MPFR_RNDU);
  }
  return r;
}

bool Interval::strictly_positive() const { return mpfr_sgn(lo_) > 0; }

Rat rat_from_mpfr(const mpfr_t v) {
  if (!mpfr_number_p(v)) fail(errc::audit_precision, "non-finite interval endpoint");
  if (mpfr_zero_p(v)) return Rat(0);
  Int mant;
  mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), v);
  Rat q(mant);
  if (e >= 0) {
    Int scale = 1;
    mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    q *= Rat(scale);
  } else {
    Int scale = 1;
    mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    q /= Rat(scale);
  }
  q.canonicalize();
  return q;
}

Rat Interval::lo_rat() const { return rat_from_mpfr(lo_); }
Rat Interval::hi_rat() const { return rat_from_mpfr(hi_); }

std::optional<Int> Interval::floor_if_certain() const {
  mpfr_t fl, fh;
  mpfr_init2(fl, prec_);
  mpfr_init2(fh, prec_);
  mpfr_floor(fl, lo_);
  mpfr_floor(fh, hi_);
  std::optional<Int> out;
  if (mpfr_cmp(fl, fh) == 0) {
    Int z;
    mpfr_get_z(z.get_mpz_t(), fl, MPFR_RNDN);
    out = z;
  }
  mpfr_clear(fl);
  mpfr_clear(fh);
  return out;
}

std::optional<Int> Interval::ceil_if_certain() const {
  mpfr_t cl, ch;
  mpfr_init2(cl, prec_);
  mpfr_init2(ch, prec_);
  mpfr_ceil(cl, lo_);
  mpfr_ceil(ch, hi_);
  std::optional<Int> out;
  if (mpfr_cmp(cl, ch) == 0) {
    Int z;
    mpfr_get_z(z.get_mpz_t(), cl, MPFR_RNDN);
    out = z;
  }
  mpfr_clear(cl);
  mpfr_clear(ch);
  return out;
}

std::optional<bool> Interval::le_certain(const Rat& x) const {
  if (mpfr_cmp_q(lo_, x.get_mpq_t()) >= 0) return true;  // x <= lo <= value
  if (mpfr_cmp_q(hi_, x.get_mpq_t()) < 0) return false;  // value <= hi < x
  return std::nullopt;
}

std::optional<bool> Interval::lt_certain(const Rat& x) const {
  if (mpfr_cmp_q(lo_, x.get_mpq_t()) > 0) return true;
  if (mpfr_cmp_q(hi_, x.get_mpq_t()) <= 0) return false;
  return std::nullopt;
}

std::string Interval::str(size_t digits) const {
  auto fmt = [&](const mpfr_t v, mpfr_rnd_t rnd) {
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*R*g", static_cast<int>(digits), rnd, v);
    std::string out(s);
    mpfr_free_str(s);
    return out;
  };
  return "[" + fmt(lo_, MPFR_RNDD) + ", " + fmt(hi_, MPFR_RNDU) + "]";
}

Interval interval_max(const Interval& a, const Interval& b) {
  Interval r(std::max(a.prec(), b.prec()));
  mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
  return r;
}

std::optional<bool> certified_lt(const Interval& a, const Interval& b) {
  if (mpfr_cmp(a.hi_, b.lo_) < 0) return true;
  if (mpfr_cmp(a.lo_, b.hi_) >= 0) return false;
  return std::nullopt;
}

} // namespace zkmedian
