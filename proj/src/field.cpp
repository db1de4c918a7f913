#include "zkmedian/field.hpp"

#include <cctype>

#include "zkmedian/errors.hpp"

namespace zkmedian {

Fp::Fp(Int prime) : p(std::move(prime)) {
  if (p <= 1) fail(errc::parameter, "field modulus must exceed 1");
}

Int Fp::reduce(const Int& x) const {
  Int r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()); // mpz_mod is non-negative
  return r;
}

Int Fp::add(const Int& a, const Int& b) const {
  Int r = a + b;
  if (r >= p) r -= p;
  return r;
}

Int Fp::sub(const Int& a, const Int& b) const {
  Int r = a - b;
  if (r < 0) r += p;
  return r;
}

Int Fp::mul(const Int& a, const Int& b) const { return reduce(a * b); }

Int Fp::pow_ui(const Int& base, unsigned long e) const {
  Int r;
  mpz_powm_ui(r.get_mpz_t(), base.get_mpz_t(), e, p.get_mpz_t());
  return r;
}

Int Fp::inv(const Int& x) const {
  Int r;
  if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()) == 0)
    fail(errc::witness, "no modular inverse for " + x.get_str());
  return r;
}

Int int_from_decimal(const std::string& s) {
  if (s.empty()) fail(errc::input_shape, "empty integer string");
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      fail(errc::input_shape, "invalid integer string: " + s);
  return Int(s, 10);
}

std::vector<uint8_t> int_to_le32(const Int& x) {
  if (x < 0 || bit_length(x) > 256) fail(errc::serialization, "value out of 32-byte range");
  std::vector<uint8_t> out(32, 0);
  size_t count = 0;
  mpz_export(out.data(), &count, -1, 1, 0, 0, x.get_mpz_t());
  return out;
}

Int int_from_le32(const uint8_t* bytes) {
  Int r;
  mpz_import(r.get_mpz_t(), 32, -1, 1, 0, 0, bytes);
  return r;
}

uint32_t bit_length(const Int& x) {
  if (x == 0) return 0;
  return static_cast<uint32_t>(mpz_sizeinbase(x.get_mpz_t(), 2));
}

} // namespace zkmedian
