#include "zkmedian/circuit.hpp"

#include "zkmedian/errors.hpp"
#include "zkmedian/reference.hpp"

namespace zkmedian {

namespace {

Int pow2(uint32_t e) {
  Int r = 1;
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), e);
  return r;
}

} // namespace

Builder::Builder(const Int& p, bool assigning) : fp_(p), assigning_(assigning) {
  if (assigning_) assignment_.push_back(1);
}

Wire Builder::alloc(const Int& value) {
  Wire w = num_wires_++;
  if (assigning_) assignment_.push_back(fp_.reduce(value));
  return w;
}

void Builder::enforce(LinComb a, LinComb b, LinComb c) {
  constraints_.push_back({std::move(a), std::move(b), std::move(c)});
}

Int Builder::eval(const LinComb& lc) const {
  if (!assigning_) return 0;
  return eval_lincomb(lc, assignment_, fp_);
}

LinComb Builder::wire_lc(Wire w) const { return LinComb{{Term{w, 1}}}; }

LinComb Builder::constant(const Int& v) const {
  Int r = fp_.reduce(v);
  if (r == 0) return LinComb{};
  return LinComb{{Term{0, std::move(r)}}};
}

LinComb Builder::add(const LinComb& a, const LinComb& b) const {
  LinComb out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

LinComb Builder::sub(const LinComb& a, const LinComb& b) const {
  LinComb out = a;
  out.terms.reserve(out.terms.size() + b.terms.size());
  for (const auto& t : b.terms) out.terms.push_back(Term{t.wire, fp_.sub(0, t.coeff)});
  return out;
}

LinComb Builder::scale(const LinComb& a, const Int& k) const {
  Int kk = fp_.reduce(k);
  if (kk == 0) return LinComb{};
  LinComb out;
  out.terms.reserve(a.terms.size());
  for (const auto& t : a.terms) out.terms.push_back(Term{t.wire, fp_.mul(t.coeff, kk)});
  return out;
}

Wire Builder::bind(const LinComb& x) {
  Wire w = alloc(eval(x));
  enforce(x, wire_lc(0), wire_lc(w));
  return w;
}

std::vector<LinComb> Builder::bits(const LinComb& x, uint32_t nbits) {
  Int xv = eval(x);
  if (assigning_ && bit_length(xv) > nbits)
    fail(errc::witness, "value " + xv.get_str() + " exceeds " + std::to_string(nbits) + " bits");
  std::vector<LinComb> out;
  out.reserve(nbits);
  LinComb sum;
  for (uint32_t j = 0; j < nbits; ++j) {
    Int bit = mpz_tstbit(xv.get_mpz_t(), j) ? 1 : 0;
    Wire w = alloc(bit);
    LinComb blc = wire_lc(w);
    enforce(blc, sub(blc, constant(1)), LinComb{});
    sum.terms.push_back(Term{w, fp_.reduce(pow2(j))});
    out.push_back(std::move(blc));
  }
  enforce(sum, wire_lc(0), x);
  return out;
}

LinComb Builder::lt(const LinComb& a, const LinComb& b, uint32_t width) {
  if (assigning_) {
    Int av = eval(a), bv = eval(b);
    if (bit_length(av) > width || bit_length(bv) > width)
      fail(errc::witness, "comparator operand exceeds " + std::to_string(width) + " bits");
  }
  LinComb shifted = add(sub(a, b), constant(pow2(width)));
  auto bs = bits(shifted, width + 1);
  return sub(constant(1), bs[width]); // top bit set means a >= b
}

LinComb Builder::is_zero(const LinComb& x) {
  Int xv = eval(x);
  Wire z = alloc(xv == 0 ? 1 : 0);
  Wire inv = alloc(xv == 0 ? Int(0) : fp_.inv(xv));
  // x * inv = 1 - z  and  z * x = 0 pin z = [x == 0] exactly.
  enforce(x, wire_lc(inv), sub(constant(1), wire_lc(z)));
  enforce(wire_lc(z), x, LinComb{});
  return wire_lc(z);
}

LinComb Builder::mux(const LinComb& sel, const LinComb& t, const LinComb& f) {
  Int sv = eval(sel);
  if (assigning_ && sv != 0 && sv != 1) fail(errc::witness, "mux selector is not boolean");
  Wire out = alloc(sv == 1 ? eval(t) : eval(f));
  enforce(sel, sub(t, f), sub(wire_lc(out), f));
  return wire_lc(out);
}

LinComb Builder::abs_diff_const(const LinComb& x, const Int& c, uint32_t width) {
  LinComb below = lt(x, constant(c), width);
  return mux(below, sub(constant(c), x), sub(x, constant(c)));
}

std::vector<LinComb> Builder::submin(const std::vector<LinComb>& xs, uint32_t width) {
  if (xs.empty()) fail(errc::input_shape, "submin over empty vector");
  LinComb running = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) {
    LinComb smaller = lt(xs[i], running, width);
    running = mux(smaller, xs[i], running);
  }
  std::vector<LinComb> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(sub(x, running));
  return out;
}

LinComb Builder::exp_lookup(const LinComb& cal, const LookupTable& table, uint32_t width) {
  LinComb out;
  for (uint32_t j = 0; j < table.l(); ++j) {
    LinComb selected = is_zero(sub(cal, constant(j)));
    out = add(out, scale(selected, table.entries[j]));
  }
  LinComb clamped = lt(constant(table.l() - 1), cal, width);
  out = add(out, scale(clamped, table.tail));
  return out;
}

LinComb Builder::mod_reduce(const LinComb& field_sum, const LinComb& d, uint32_t width,
                            LinComb* quotient_out) {
  const uint32_t K = bit_length(fp_.p);
  auto sum_bits = bits(field_sum, K);
  const uint32_t nchunks = (K + width - 1) / width;

  std::vector<LinComb> chunks(nchunks);
  std::vector<Int> p_chunks(nchunks, 0);
  for (uint32_t c = 0; c < nchunks; ++c) {
    for (uint32_t j = c * width; j < std::min((c + 1) * width, K); ++j) {
      chunks[c] = add(chunks[c], scale(sum_bits[j], pow2(j - c * width)));
      if (mpz_tstbit(fp_.p.get_mpz_t(), j)) mpz_setbit(p_chunks[c].get_mpz_t(), j - c * width);
    }
  }

  // Lexicographic strictly-below-p over the chunks; exactly one disjunct can
  // fire, so the flag sum is boolean and must equal 1.
  LinComb strict;
  LinComb eq_run = constant(1);
  for (uint32_t idx = 0; idx < nchunks; ++idx) {
    uint32_t c = nchunks - 1 - idx;
    LinComb below = lt(chunks[c], constant(p_chunks[c]), width);
    LinComb equal = is_zero(sub(chunks[c], constant(p_chunks[c])));
    Wire fire = alloc(fp_.mul(eval(eq_run), eval(below)));
    enforce(eq_run, below, wire_lc(fire));
    strict = add(strict, wire_lc(fire));
    Wire still_eq = alloc(fp_.mul(eval(eq_run), eval(equal)));
    enforce(eq_run, equal, wire_lc(still_eq));
    eq_run = wire_lc(still_eq);
  }
  enforce(strict, wire_lc(0), constant(1));

  // Long division, one width-bit quotient digit per chunk. Each step has
  // w = v*2^width + chunk < d*2^width, so the digit fits in width bits and
  // q*d + r = w holds over the integers because both sides are < 2^(2*width).
  LinComb v;
  LinComb q_total;
  for (uint32_t idx = 0; idx < nchunks; ++idx) {
    uint32_t c = nchunks - 1 - idx;
    LinComb w_lc = add(scale(v, pow2(width)), chunks[c]);
    Int w_val = eval(w_lc);
    Int d_val = eval(d);
    Int q_val = 0, r_val = 0;
    if (assigning_) {
      if (d_val == 0) fail(errc::degenerate, "division by zero weight total");
      mpz_fdiv_qr(q_val.get_mpz_t(), r_val.get_mpz_t(), w_val.get_mpz_t(), d_val.get_mpz_t());
    }
    Wire q = alloc(q_val);
    Wire r = alloc(r_val);
    bits(wire_lc(q), width);
    bits(wire_lc(r), width);
    enforce(wire_lc(q), d, sub(w_lc, wire_lc(r)));
    LinComb in_range = lt(wire_lc(r), d, width);
    enforce(in_range, wire_lc(0), constant(1));
    v = wire_lc(r);
    q_total = add(scale(q_total, pow2(width)), wire_lc(q));
  }
  if (quotient_out) *quotient_out = q_total;
  return v;
}

LinComb Builder::inverse_cdf(const std::vector<LinComb>& cumulative, const std::vector<Int>& range,
                             const LinComb& rho, uint32_t width) {
  if (cumulative.size() != range.size() || cumulative.empty())
    fail(errc::input_shape, "cumulative/range size mismatch");
  LinComb prev_sig;
  LinComb med;
  for (size_t i = 0; i < cumulative.size(); ++i) {
    LinComb sig = lt(rho, cumulative[i], width);
    LinComb flip;
    if (i == 0) {
      flip = sig;
    } else {
      Wire both = alloc(fp_.mul(eval(prev_sig), eval(sig)));
      enforce(prev_sig, sig, wire_lc(both));
      flip = sub(add(prev_sig, sig), scale(wire_lc(both), 2));
    }
    med = add(med, scale(flip, range[i]));
    prev_sig = sig;
  }
  return med;
}

void Builder::sbox(LinComb& x, uint32_t exp) {
  Int xv = eval(x);
  Wire x2 = alloc(fp_.mul(xv, xv));
  enforce(x, x, wire_lc(x2));
  if (exp == 3) {
    Wire x3 = alloc(fp_.mul(eval(wire_lc(x2)), xv));
    enforce(wire_lc(x2), x, wire_lc(x3));
    x = wire_lc(x3);
    return;
  }
  Wire x4 = alloc(fp_.mul(eval(wire_lc(x2)), eval(wire_lc(x2))));
  enforce(wire_lc(x2), wire_lc(x2), wire_lc(x4));
  if (exp == 5) {
    Wire x5 = alloc(fp_.mul(eval(wire_lc(x4)), xv));
    enforce(wire_lc(x4), x, wire_lc(x5));
    x = wire_lc(x5);
    return;
  }
  if (exp == 7) {
    Wire x6 = alloc(fp_.mul(eval(wire_lc(x4)), eval(wire_lc(x2))));
    enforce(wire_lc(x4), wire_lc(x2), wire_lc(x6));
    Wire x7 = alloc(fp_.mul(eval(wire_lc(x6)), xv));
    enforce(wire_lc(x6), x, wire_lc(x7));
    x = wire_lc(x7);
    return;
  }
  fail(errc::parameter, "unsupported S-box exponent");
}

void Builder::permute_gadget(const HashInstance& h, std::array<LinComb, 3>& state) {
  for (uint32_t r = 0; r < h.rounds; ++r) {
    for (int i = 0; i < 3; ++i) {
      LinComb t = add(state[i], constant(h.round_constants[r][i]));
      sbox(t, h.sbox_exp);
      state[i] = std::move(t);
    }
    std::array<LinComb, 3> mixed;
    for (int i = 0; i < 3; ++i) {
      LinComb acc;
      for (int j = 0; j < 3; ++j) acc = add(acc, scale(state[j], h.mds[i][j]));
      mixed[i] = std::move(acc);
    }
    state = std::move(mixed);
  }
}

LinComb Builder::sponge(const HashInstance& h, const std::vector<LinComb>& elems) {
  if (h.p != fp_.p) fail(errc::parameter, "hash instance modulus differs from circuit modulus");
  std::array<LinComb, 3> state;
  std::vector<LinComb> seq;
  seq.reserve(elems.size() + 1);
  seq.push_back(constant(Int(elems.size())));
  for (const auto& e : elems) seq.push_back(e);
  for (size_t pos = 0; pos < seq.size(); pos += 2) {
    state[0] = add(state[0], seq[pos]);
    if (pos + 1 < seq.size()) state[1] = add(state[1], seq[pos + 1]);
    permute_gadget(h, state);
  }
  return state[0];
}

ConstraintSystem Builder::take_system(std::vector<Wire> public_wires, uint32_t num_public_inputs,
                                      std::string params_digest) {
  ConstraintSystem cs;
  cs.p = fp_.p;
  cs.num_wires = num_wires_;
  cs.constraints = std::move(constraints_);
  cs.public_wires = std::move(public_wires);
  cs.num_public_inputs = num_public_inputs;
  cs.params_digest = std::move(params_digest);
  return cs;
}

Assignment Builder::take_assignment() { return std::move(assignment_); }

namespace {

// Shared layout for synthesis and witness generation. Wire order: constant 1,
// range (public inputs), med, commitments (public outputs), then provider
// inputs, provider randomness, and gadget internals.
CircuitLayout build_main(Builder& b, const ProtocolParams& params, const LookupTable& table,
                         const HashInstance& h, const std::vector<Int>& inputs,
                         const std::vector<Int>& rands) {
  const uint32_t n = params.n();
  const uint32_t m = params.m;
  const uint32_t B = params.bit_width;
  const Fp& fp = b.field();

  Int med_value = 0;
  std::vector<Int> com_values(m, 0);
  std::vector<Int> rand_values(m, 0);
  if (b.assigning()) {
    if (inputs.size() != m || rands.size() != m)
      fail(errc::input_shape, "inputs/randomness size differs from m");
    for (uint32_t i = 0; i < m; ++i) {
      rand_values[i] = fp.reduce(rands[i]);
      com_values[i] = commitment_of(h, inputs[i], rand_values[i]);
    }
    med_value = run_reference(params, table, inputs, rands).med;
  }

  CircuitLayout lay;
  for (uint32_t i = 0; i < n; ++i) {
    Wire w = b.alloc(params.range[i]);
    b.enforce(b.sub(b.wire_lc(w), b.constant(params.range[i])), b.wire_lc(0), LinComb{});
    lay.range.push_back(w);
  }
  lay.med = b.alloc(med_value);
  for (uint32_t i = 0; i < m; ++i) lay.commitments.push_back(b.alloc(com_values[i]));
  for (uint32_t i = 0; i < m; ++i)
    lay.inputs.push_back(b.alloc(b.assigning() ? inputs[i] : Int(0)));
  for (uint32_t i = 0; i < m; ++i) lay.rands.push_back(b.alloc(rand_values[i]));

  // Provider inputs are the only free values that feed comparators, so they
  // carry explicit width proofs.
  for (uint32_t i = 0; i < m; ++i) b.bits(b.wire_lc(lay.inputs[i]), B);

  for (uint32_t i = 0; i < m; ++i) {
    LinComb digest = b.sponge(h, {b.wire_lc(lay.inputs[i]), b.wire_lc(lay.rands[i])});
    b.enforce(digest, b.wire_lc(0), b.wire_lc(lay.commitments[i]));
  }

  // Rank counts and centered utilities per range element.
  Int center = Int(m - 1) / 2;
  std::vector<LinComb> utils;
  utils.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    LinComb count;
    for (uint32_t j = 0; j < m; ++j)
      count = b.add(count, b.lt(b.wire_lc(lay.inputs[j]), b.wire_lc(lay.range[i]), B));
    Wire count_w = b.bind(count);
    utils.push_back(b.abs_diff_const(b.wire_lc(count_w), center, B));
  }

  std::vector<LinComb> calibrated = b.submin(utils, B);

  std::vector<LinComb> cumulative;
  cumulative.reserve(n);
  LinComb running;
  for (uint32_t i = 0; i < n; ++i) {
    LinComb weight = b.exp_lookup(calibrated[i], table, B);
    Wire weight_w = b.bind(weight);
    running = b.add(running, b.wire_lc(weight_w));
    Wire s_w = b.bind(running);
    running = b.wire_lc(s_w);
    cumulative.push_back(running);
  }

  LinComb rand_sum;
  for (uint32_t i = 0; i < m; ++i) rand_sum = b.add(rand_sum, b.wire_lc(lay.rands[i]));
  LinComb rho = b.mod_reduce(rand_sum, cumulative.back(), B);

  LinComb med = b.inverse_cdf(cumulative, params.range, rho, B);
  b.enforce(med, b.wire_lc(0), b.wire_lc(lay.med));
  return lay;
}

std::vector<Wire> public_wire_list(const CircuitLayout& lay) {
  std::vector<Wire> pub = lay.range;
  pub.push_back(lay.med);
  pub.insert(pub.end(), lay.commitments.begin(), lay.commitments.end());
  return pub;
}

} // namespace

ConstraintSystem synthesize_main(const ProtocolParams& params, const LookupTable& table,
                                 const HashInstance& h, CircuitLayout* layout) {
  require_valid(params, table);
  Builder b(params.p, false);
  CircuitLayout lay = build_main(b, params, table, h, {}, {});
  if (layout) *layout = lay;
  return b.take_system(public_wire_list(lay), params.n(), params_digest(params));
}

std::pair<Assignment, PublicOutputs> gen_witness(const ProtocolParams& params,
                                                 const LookupTable& table, const HashInstance& h,
                                                 const std::vector<Int>& inputs,
                                                 const std::vector<Int>& rands) {
  require_valid(params, table);
  Builder b(params.p, true);
  CircuitLayout lay = build_main(b, params, table, h, inputs, rands);
  Assignment w = b.take_assignment();
  PublicOutputs out;
  out.med = w[lay.med];
  out.commitments.reserve(lay.commitments.size());
  for (Wire cw : lay.commitments) out.commitments.push_back(w[cw]);
  return {std::move(w), std::move(out)};
}

} // namespace zkmedian
