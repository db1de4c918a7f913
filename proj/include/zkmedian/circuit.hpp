#pragma once

#include <array>
#include <optional>
#include <vector>

#include "zkmedian/hash.hpp"
#include "zkmedian/params.hpp"
#include "zkmedian/r1cs.hpp"

namespace zkmedian {

// Synthesis and witness generation share one code path: the builder either
// just lays out wires and rows (shape mode) or additionally assigns values
// (witness mode). Gadgets never branch on witness values, so both modes
// produce bit-identical constraint lists.
class Builder {
public:
  Builder(const Int& p, bool assigning);

  bool assigning() const { return assigning_; }
  const Fp& field() const { return fp_; }
  uint32_t num_wires() const { return num_wires_; }
  size_t num_constraints() const { return constraints_.size(); }

  Wire alloc(const Int& value);
  void enforce(LinComb a, LinComb b, LinComb c);
  Int eval(const LinComb& lc) const; // canonical value; zero in shape mode

  LinComb wire_lc(Wire w) const;
  LinComb constant(const Int& v) const;
  LinComb add(const LinComb& a, const LinComb& b) const;
  LinComb sub(const LinComb& a, const LinComb& b) const;
  LinComb scale(const LinComb& a, const Int& k) const;

  // Fresh wire constrained equal to the combination.
  Wire bind(const LinComb& x);

  // Boolean decomposition; enforces each bit and the binding sum. In witness
  // mode the value must fit in nbits.
  std::vector<LinComb> bits(const LinComb& x, uint32_t nbits);

  // [a < b] for operands already known to be < 2^width; decomposes
  // a - b + 2^width into width+1 bits and returns the inverted top bit.
  LinComb lt(const LinComb& a, const LinComb& b, uint32_t width);

  LinComb is_zero(const LinComb& x);
  LinComb mux(const LinComb& sel, const LinComb& t, const LinComb& f);

  LinComb abs_diff_const(const LinComb& x, const Int& c, uint32_t width);

  // Calibrated values xs[i] - min(xs) via a running comparator/mux chain.
  std::vector<LinComb> submin(const std::vector<LinComb>& xs, uint32_t width);

  // Table lookup with tail clamp: one equality selector per physical entry
  // plus a clamp comparator for calibrated utilities at or past the end.
  LinComb exp_lookup(const LinComb& cal, const LookupTable& table, uint32_t width);

  // rho = (canonical field_sum) mod d. Decomposes the sum into ceil(log2 p)
  // bits, enforces the chunked less-than-p check, then base-2^width long
  // division with width-bit quotient digits; every intermediate identity
  // stays below 2^(2*width) < p, so field equalities are integer equalities.
  LinComb mod_reduce(const LinComb& field_sum, const LinComb& d, uint32_t width,
                     LinComb* quotient_out = nullptr);

  // med = sum_i range[i] * sig'_i with sig_i = [cumulative_i > rho] and
  // sig' the parity difference chain of sig.
  LinComb inverse_cdf(const std::vector<LinComb>& cumulative, const std::vector<Int>& range,
                      const LinComb& rho, uint32_t width);

  LinComb sponge(const HashInstance& h, const std::vector<LinComb>& elems);

  ConstraintSystem take_system(std::vector<Wire> public_wires, uint32_t num_public_inputs,
                               std::string params_digest);
  Assignment take_assignment();

private:
  void sbox(LinComb& x, uint32_t exp);
  void permute_gadget(const HashInstance& h, std::array<LinComb, 3>& state);

  Fp fp_;
  bool assigning_;
  uint32_t num_wires_ = 1;
  Assignment assignment_;
  std::vector<Constraint> constraints_;
};

struct PublicOutputs {
  Int med;
  std::vector<Int> commitments;
};

// Wire indices of the named groups, in public order.
struct CircuitLayout {
  std::vector<Wire> range;
  Wire med = 0;
  std::vector<Wire> commitments;
  std::vector<Wire> inputs;
  std::vector<Wire> rands;
};

ConstraintSystem synthesize_main(const ProtocolParams& params, const LookupTable& table,
                                 const HashInstance& h, CircuitLayout* layout = nullptr);

std::pair<Assignment, PublicOutputs> gen_witness(const ProtocolParams& params,
                                                 const LookupTable& table, const HashInstance& h,
                                                 const std::vector<Int>& inputs,
                                                 const std::vector<Int>& rands);

} // namespace zkmedian
