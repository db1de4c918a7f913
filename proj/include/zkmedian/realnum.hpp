#pragma once

#include <mpfr.h>

#include <optional>
#include <string>

#include "zkmedian/field.hpp"

namespace zkmedian {

// Exact parse of a positive decimal string ("0.5", "1.3863", "2"). Rejects
// signs, exponents, and anything that is not digits with one optional point.
Rat rat_from_decimal(const std::string& s);

// Closed interval [lo, hi] guaranteed to contain the exact real value it
// stands for. All operations round outward, so containment is preserved.
class Interval {
public:
  explicit Interval(mpfr_prec_t prec);
  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(const Interval& other);
  Interval& operator=(Interval&& other) noexcept;
  ~Interval();

  static Interval from_rat(const Rat& q, mpfr_prec_t prec);
  static Interval from_int(const Int& z, mpfr_prec_t prec);
  // e^q for exact rational q
  static Interval exp_rat(const Rat& q, mpfr_prec_t prec);

  friend Interval add(const Interval& a, const Interval& b);
  friend Interval sub(const Interval& a, const Interval& b);
  friend Interval mul(const Interval& a, const Interval& b);
  friend Interval div(const Interval& a, const Interval& b); // 0 must not lie in b
  Interval abs() const;

  Interval mul_int(const Int& z) const;

  mpfr_prec_t prec() const { return prec_; }
  bool strictly_positive() const; // lo > 0
  Rat lo_rat() const;             // exact: mpfr values are binary rationals
  Rat hi_rat() const;

  // Integer floor/ceil when both endpoints agree on it.
  std::optional<Int> floor_if_certain() const;
  std::optional<Int> ceil_if_certain() const;

  // Widest-true comparisons vs an exact rational. Engaged when the interval
  // decides the question; nullopt when x lands inside the interval.
  std::optional<bool> le_certain(const Rat& x) const; // x <= value?
  std::optional<bool> lt_certain(const Rat& x) const; // x <  value?

  std::string str(size_t digits = 20) const; // "[lo, hi]" for reports

  // Running upper envelope: max of true values lies inside [lo, hi].
  friend Interval interval_max(const Interval& a, const Interval& b);
  // a < b when decided by the endpoints; nullopt when the intervals overlap.
  friend std::optional<bool> certified_lt(const Interval& a, const Interval& b);

private:
  mpfr_prec_t prec_;
  mpfr_t lo_;
  mpfr_t hi_;
};

Interval interval_max(const Interval& a, const Interval& b);
std::optional<bool> certified_lt(const Interval& a, const Interval& b);

Rat rat_from_mpfr(const mpfr_t v); // exact conversion

} // namespace zkmedian
