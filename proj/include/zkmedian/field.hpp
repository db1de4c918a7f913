#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace zkmedian {

using Int = mpz_class;
using Rat = mpq_class;

// Prime-field context. Elements are canonical residues in [0, p).
struct Fp {
  Int p;

  explicit Fp(Int prime);

  Int reduce(const Int& x) const; // maps any integer, negatives included
  Int add(const Int& a, const Int& b) const;
  Int sub(const Int& a, const Int& b) const;
  Int mul(const Int& a, const Int& b) const;
  Int pow_ui(const Int& base, unsigned long e) const;
  Int inv(const Int& x) const; // x must be nonzero mod p
};

// Strict base-10 unsigned integer parse ("0", "97", ...). Rejects signs,
// blanks, and empty strings.
Int int_from_decimal(const std::string& s);

// Fixed-width little-endian encoding used by the binary formats.
std::vector<uint8_t> int_to_le32(const Int& x); // requires 0 <= x < 2^256
Int int_from_le32(const uint8_t* bytes);

uint32_t bit_length(const Int& x); // bit length of |x|; 0 for x == 0

} // namespace zkmedian
