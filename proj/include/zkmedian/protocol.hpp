#pragma once

#include <string>
#include <vector>

#include "zkmedian/backend.hpp"
#include "zkmedian/board.hpp"
#include "zkmedian/circuit.hpp"
#include "zkmedian/hash.hpp"
#include "zkmedian/params.hpp"

namespace zkmedian {

// Single-point corruptions injected by the pipeline driver. Every class must
// end in a rejection by the verifier, never in an accepted run or a crash.
enum class TamperClass {
  none,
  provider_input,    // analyst is handed x+1 for provider 0
  provider_rand,     // analyst is handed r+1 for provider 0
  result_med,        // analyst posts med+1 in the result entry
  commitment_entry,  // provider 0 posts com+1 on the board
  range_list,        // verifier's copy of the range has range[0]+1
};

const char* tamper_name(TamperClass t);
TamperClass tamper_from_name(const std::string& name);

Int provider_commit(Board& board, const HashInstance& h, uint32_t index, const Int& x,
                    const Int& r);

struct AnalystOutput {
  Int med;
  std::vector<Int> commitments;
  Proof proof;
};

AnalystOutput analyst_prove(Board& board, const ProtocolParams& params, const LookupTable& table,
                            const HashInstance& h, const ProofBackend& backend,
                            const KeyMaterial& keys, const std::vector<Int>& inputs,
                            const std::vector<Int>& rands);

struct VerifyReport {
  bool accepted = false;
  std::string reason; // "ok" when accepted, otherwise what failed first
};

// Checks the complete board against the verifying key: proof validity over
// the claimed public values, then equality of the claimed commitments with
// the providers' posted ones. A board without m commitments, one result and
// one proof raises errc::incomplete_board instead of rejecting.
VerifyReport verify_board(const Board& board, const ProtocolParams& params,
                          const ProofBackend& backend, const KeyMaterial& keys);

struct PipelineResult {
  bool accepted = false;
  std::string reason;
  Int posted_med;
  uint64_t num_constraints = 0;
  std::string transcript; // deterministic JSON; carries no timings
  double t_witness_ms = 0, t_prove_ms = 0, t_verify_ms = 0;
};

// Runs providers, analyst and verifier in-process against the given board.
// All randomness (inputs and commitment blinds) is derived from the seed.
PipelineResult run_pipeline(const ProtocolParams& params, const LookupTable& table,
                            const ProofBackend& backend, uint32_t lambda,
                            const std::string& seed, Board& board, TamperClass tamper);

} // namespace zkmedian
