#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "zkmedian/field.hpp"

namespace zkmedian {

// Sponge permutation over F_p: width 3, rate 2, full rounds of an odd-power
// S-box with a Cauchy MDS mix. Round constants and the matrix are derived
// from SHA-256 counter-mode expansion of "<hash_id>|<p>", so equal
// (hash_id, p) pairs always produce the identical instance. The concrete
// permutation carries no formal security claim; it exists to make the
// commitment relation cheap inside the constraint system.
//
// hash_id grammar: "poseidon-x<exp>-w3-r<rounds>", exp in {3,5,7}.
struct HashInstance {
  std::string hash_id;
  Int p;
  uint32_t rounds = 0;
  uint32_t sbox_exp = 5;
  std::vector<std::array<Int, 3>> round_constants; // one triple per round
  std::array<std::array<Int, 3>, 3> mds;
  std::string derivation_seed;
};

// Cached by (hash_id, p).
std::shared_ptr<const HashInstance> hash_instance(const std::string& hash_id, const Int& p);

void permute(const HashInstance& h, std::array<Int, 3>& state);

// Absorbs [len(elems), elems...] in rate-2 chunks, squeezes state[0].
// The length element is the only padding/domain separation.
Int sponge_hash(const HashInstance& h, const std::vector<Int>& elems);

Int commitment_of(const HashInstance& h, const Int& x, const Int& r);

} // namespace zkmedian
