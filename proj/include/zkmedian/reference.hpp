#pragma once

#include <cstddef>
#include <vector>

#include "zkmedian/params.hpp"

namespace zkmedian {

// Plaintext evaluation of the selection mechanism. This is the oracle the
// constraint system is checked against; it never touches the field modulus
// except where the randomness sum is reduced.

struct WeightSums {
  std::vector<Int> expvals;    // table weight per range element
  std::vector<Int> cumulative; // running prefix sums
};

struct MechanismTrace {
  std::vector<Int> ranks;
  std::vector<Int> utilities;  // |rank - floor((m-1)/2)|
  std::vector<Int> calibrated; // utilities minus their minimum
  std::vector<Int> expvals;
  std::vector<Int> cumulative;
  Int rho;
  size_t med_index = 0;
  Int med;
};

struct ExactDistribution {
  std::vector<Rat> masses; // per range element, sums to 1
  Int denominator;         // cumulative.back()
};

// Number of database records strictly below r.
Int rank_below(const std::vector<Int>& db, const Int& r);

std::vector<Int> utilities(const std::vector<Int>& db, const std::vector<Int>& range);
std::vector<Int> calibrate(const std::vector<Int>& utils);
WeightSums weights(const std::vector<Int>& calibrated, const LookupTable& table);

// (sum of rands mod p) mod s_last
Int rho_of(const std::vector<Int>& rands, const Int& p, const Int& s_last);

// First index j with cumulative[j] > rho; rho must lie in [0, cumulative.back()).
size_t select_index(const std::vector<Int>& cumulative, const Int& rho);

MechanismTrace run_reference(const ProtocolParams& params, const LookupTable& table,
                             const std::vector<Int>& db, const std::vector<Int>& rands);

ExactDistribution exact_distribution(const ProtocolParams& params, const LookupTable& table,
                                     const std::vector<Int>& db);

json trace_to_json(const MechanismTrace& trace);

} // namespace zkmedian
