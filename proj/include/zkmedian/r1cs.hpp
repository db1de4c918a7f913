#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zkmedian/field.hpp"

namespace zkmedian {

using Wire = uint32_t;

struct Term {
  Wire wire;
  Int coeff; // canonical residue in [0, p)
};

// Sparse linear combination over the witness; wire 0 carries the constant 1.
struct LinComb {
  std::vector<Term> terms;
};

// <a, w> * <b, w> = <c, w>  (mod p)
struct Constraint {
  LinComb a, b, c;
};

struct ConstraintSystem {
  Int p;
  uint32_t num_wires = 1; // wire 0 reserved for the constant 1
  std::vector<Constraint> constraints;
  // Public wires in fixed order: range values, med, then one commitment per
  // provider. The first num_public_inputs of them are inputs (the range);
  // the rest are outputs.
  std::vector<Wire> public_wires;
  uint32_t num_public_inputs = 0;
  std::string params_digest;
};

using Assignment = std::vector<Int>;

// Every product row holds and assignment[0] == 1.
bool check_satisfied(const ConstraintSystem& cs, const Assignment& w);

Int eval_lincomb(const LinComb& lc, const Assignment& w, const Fp& fp);

// Versioned binary container: little-endian u32 lengths, JSON header, field
// elements as 32-byte little-endian blocks.
std::vector<uint8_t> serialize_cs(const ConstraintSystem& cs);
ConstraintSystem deserialize_cs(const uint8_t* data, size_t len);

std::vector<uint8_t> serialize_assignment(const Assignment& w, const Int& p,
                                          const std::string& params_digest);
// Returns the assignment; p/params_digest echo checked by the caller if needed.
Assignment deserialize_assignment(const uint8_t* data, size_t len, Int* p_out = nullptr,
                                  std::string* params_digest_out = nullptr);

std::string cs_digest(const ConstraintSystem& cs); // SHA-256 hex of serialize_cs

} // namespace zkmedian
