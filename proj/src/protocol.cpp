#include "zkmedian/protocol.hpp"

#include <chrono>

#include <gmpxx.h>
#include <nlohmann/json.hpp>

#include "zkmedian/digest.hpp"
#include "zkmedian/errors.hpp"

namespace zkmedian {

const char* tamper_name(TamperClass t) {
  switch (t) {
    case TamperClass::none: return "none";
    case TamperClass::provider_input: return "provider_input";
    case TamperClass::provider_rand: return "provider_rand";
    case TamperClass::result_med: return "result_med";
    case TamperClass::commitment_entry: return "commitment_entry";
    case TamperClass::range_list: return "range_list";
  }
  return "none";
}

TamperClass tamper_from_name(const std::string& name) {
  for (TamperClass t : {TamperClass::none, TamperClass::provider_input, TamperClass::provider_rand,
                        TamperClass::result_med, TamperClass::commitment_entry,
                        TamperClass::range_list})
    if (name == tamper_name(t)) return t;
  if (name == "input") return TamperClass::provider_input;
  if (name == "rand") return TamperClass::provider_rand;
  if (name == "med") return TamperClass::result_med;
  if (name == "commitment") return TamperClass::commitment_entry;
  if (name == "range") return TamperClass::range_list;
  fail(errc::parameter, "unknown tamper class '" + name + "'");
}

Int provider_commit(Board& board, const HashInstance& h, uint32_t index, const Int& x,
                    const Int& r) {
  Int com = commitment_of(h, x, r);
  json payload;
  payload["provider"] = index;
  payload["com"] = com.get_str();
  board.append("provider-" + std::to_string(index), "commitment", payload.dump());
  return com;
}

AnalystOutput analyst_prove(Board& board, const ProtocolParams& params, const LookupTable& table,
                            const HashInstance& h, const ProofBackend& backend,
                            const KeyMaterial& keys, const std::vector<Int>& inputs,
                            const std::vector<Int>& rands) {
  auto [witness, outs] = gen_witness(params, table, h, inputs, rands);
  AnalystOutput out;
  out.proof = backend.prove(keys, witness);
  out.med = outs.med;
  out.commitments = outs.commitments;

  json result;
  result["med"] = out.med.get_str();
  json coms = json::array();
  for (const auto& c : out.commitments) coms.push_back(c.get_str());
  result["coms"] = std::move(coms);
  board.append("analyst", "result", result.dump());

  json proof_entry;
  proof_entry["proof"] = to_hex(serialize_proof(out.proof));
  board.append("analyst", "proof", proof_entry.dump());
  return out;
}

VerifyReport verify_board(const Board& board, const ProtocolParams& params,
                          const ProofBackend& backend, const KeyMaterial& keys) {
  std::vector<BoardEntry> commitments;
  std::vector<BoardEntry> results;
  std::vector<BoardEntry> proofs;
  for (const auto& e : board.list()) {
    if (e.kind == "commitment") commitments.push_back(e);
    else if (e.kind == "result") results.push_back(e);
    else if (e.kind == "proof") proofs.push_back(e);
  }
  if (commitments.size() != params.m || results.size() != 1 || proofs.size() != 1)
    fail(errc::incomplete_board,
         "board holds " + std::to_string(commitments.size()) + " commitments, " +
             std::to_string(results.size()) + " results, " + std::to_string(proofs.size()) +
             " proofs; need " + std::to_string(params.m) + "/1/1");

  VerifyReport rep;
  Int med;
  std::vector<Int> claimed;
  try {
    json result = json::parse(results[0].payload);
    med = int_from_decimal(result.at("med").get<std::string>());
    for (const auto& c : result.at("coms"))
      claimed.push_back(int_from_decimal(c.get<std::string>()));
  } catch (...) {
    rep.reason = "malformed_result";
    return rep;
  }
  if (claimed.size() != params.m) {
    rep.reason = "malformed_result";
    return rep;
  }

  Proof proof;
  try {
    json pj = json::parse(proofs[0].payload);
    proof = deserialize_proof(from_hex(pj.at("proof").get<std::string>()));
  } catch (...) {
    rep.reason = "malformed_proof";
    return rep;
  }

  std::vector<Int> pub_out;
  pub_out.reserve(1 + claimed.size());
  pub_out.push_back(med);
  pub_out.insert(pub_out.end(), claimed.begin(), claimed.end());
  if (!backend.verify(keys, params.range, pub_out, proof)) {
    rep.reason = "proof_rejected";
    return rep;
  }

  for (uint32_t i = 0; i < params.m; ++i) {
    Int posted;
    try {
      json pj = json::parse(commitments[i].payload);
      posted = int_from_decimal(pj.at("com").get<std::string>());
    } catch (...) {
      rep.reason = "malformed_commitment";
      return rep;
    }
    if (posted != claimed[i]) {
      rep.reason = "commitment_mismatch";
      return rep;
    }
  }

  rep.accepted = true;
  rep.reason = "ok";
  return rep;
}

PipelineResult run_pipeline(const ProtocolParams& params, const LookupTable& table,
                            const ProofBackend& backend, uint32_t lambda,
                            const std::string& seed, Board& board, TamperClass tamper) {
  require_valid(params, table);
  auto hash_ptr = hash_instance(params.hash_id, params.p);
  const HashInstance& h = *hash_ptr;

  gmp_randclass rng(gmp_randinit_mt);
  Int rng_seed;
  auto seed_bytes = sha256("pipeline|" + seed);
  mpz_import(rng_seed.get_mpz_t(), seed_bytes.size(), 1, 1, 0, 0, seed_bytes.data());
  rng.seed(rng_seed);

  Int span = params.range.back() - params.range.front() + 1;
  std::vector<Int> inputs, rands;
  for (uint32_t i = 0; i < params.m; ++i) {
    inputs.push_back(params.range.front() + rng.get_z_range(span));
    rands.push_back(rng.get_z_range(params.p));
  }

  // Providers post their commitments in index order.
  Fp fp(params.p);
  for (uint32_t i = 0; i < params.m; ++i) {
    if (tamper == TamperClass::commitment_entry && i == 0) {
      Int com = fp.add(commitment_of(h, inputs[i], rands[i]), 1);
      json payload;
      payload["provider"] = i;
      payload["com"] = com.get_str();
      board.append("provider-0", "commitment", payload.dump());
    } else {
      provider_commit(board, h, i, inputs[i], rands[i]);
    }
  }

  // The analyst works from what it received over the providers' private
  // channels; these two tampers corrupt that channel for provider 0.
  std::vector<Int> analyst_inputs = inputs;
  std::vector<Int> analyst_rands = rands;
  if (tamper == TamperClass::provider_input) analyst_inputs[0] += 1;
  if (tamper == TamperClass::provider_rand) analyst_rands[0] = fp.add(analyst_rands[0], 1);

  ConstraintSystem cs = synthesize_main(params, table, h);
  KeyMaterial keys = backend.setup(cs, lambda, seed);

  PipelineResult res;
  res.num_constraints = cs.constraints.size();

  using clock = std::chrono::steady_clock;
  auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  auto t0 = clock::now();
  auto [witness, outs] = gen_witness(params, table, h, analyst_inputs, analyst_rands);
  auto t1 = clock::now();
  res.t_witness_ms = ms(t0, t1);

  Proof proof = backend.prove(keys, witness);
  auto t2 = clock::now();
  res.t_prove_ms = ms(t1, t2);

  Int posted_med = outs.med;
  if (tamper == TamperClass::result_med) posted_med = fp.add(posted_med, 1);
  json result;
  result["med"] = posted_med.get_str();
  json coms = json::array();
  for (const auto& c : outs.commitments) coms.push_back(c.get_str());
  result["coms"] = std::move(coms);
  board.append("analyst", "result", result.dump());
  json proof_entry;
  proof_entry["proof"] = to_hex(serialize_proof(proof));
  board.append("analyst", "proof", proof_entry.dump());
  res.posted_med = posted_med;

  ProtocolParams verifier_params = params;
  if (tamper == TamperClass::range_list) verifier_params.range[0] += 1;

  auto t3 = clock::now();
  VerifyReport rep = verify_board(board, verifier_params, backend, keys);
  auto t4 = clock::now();
  res.t_verify_ms = ms(t3, t4);
  res.accepted = rep.accepted;
  res.reason = rep.reason;

  json tr;
  tr["params_digest"] = params_digest(params);
  tr["hash_id"] = params.hash_id;
  tr["backend"] = backend.id();
  tr["lambda"] = lambda;
  tr["seed"] = seed;
  tr["tamper"] = tamper_name(tamper);
  json entries = json::array();
  for (const auto& e : board.list()) entries.push_back(json::parse(entry_to_json(e)));
  tr["board"] = std::move(entries);
  tr["num_constraints"] = res.num_constraints;
  tr["verdict"] = res.accepted ? "accept" : "reject";
  tr["reason"] = res.reason;
  res.transcript = tr.dump(2);
  return res;
}

} // namespace zkmedian
