#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "zkmedian/r1cs.hpp"

namespace zkmedian {

// Opaque key material produced by setup. Blobs are backend-defined; everything
// a verifier needs lives in vk, everything a prover needs lives in pk.
struct KeyMaterial {
  std::string backend_id;
  std::string params_digest;
  uint32_t lambda = 0;
  std::vector<uint8_t> pk;
  std::vector<uint8_t> vk;
};

struct Proof {
  std::string backend_id;
  std::vector<uint8_t> payload;
  std::string public_io_digest;
};

// Proving-system abstraction. verify never throws: any malformed or mismatched
// artifact is a rejection, not an error.
class ProofBackend {
public:
  virtual ~ProofBackend() = default;
  virtual std::string id() const = 0;
  virtual KeyMaterial setup(const ConstraintSystem& cs, uint32_t lambda,
                            const std::string& seed) const = 0;
  virtual Proof prove(const KeyMaterial& keys, const Assignment& witness) const = 0;
  virtual bool verify(const KeyMaterial& keys, const std::vector<Int>& public_inputs,
                      const std::vector<Int>& public_outputs, const Proof& proof) const = 0;
};

// Deterministic stand-in backend. It re-executes the constraint system at
// proving time and binds a keyed digest to the public values. The vk embeds
// the setup secret, so it offers NO zero knowledge and NO succinctness; it
// exists to exercise the protocol plumbing with real accept/reject behavior.
class MockBackend final : public ProofBackend {
public:
  std::string id() const override { return "mock"; }
  KeyMaterial setup(const ConstraintSystem& cs, uint32_t lambda,
                    const std::string& seed) const override;
  Proof prove(const KeyMaterial& keys, const Assignment& witness) const override;
  bool verify(const KeyMaterial& keys, const std::vector<Int>& public_inputs,
              const std::vector<Int>& public_outputs, const Proof& proof) const override;
};

std::unique_ptr<ProofBackend> make_backend(const std::string& backend_id);

std::string canonical_public_io(const std::string& params_digest,
                                const std::vector<Int>& public_inputs,
                                const std::vector<Int>& public_outputs);

std::vector<uint8_t> serialize_keys(const KeyMaterial& km);
KeyMaterial deserialize_keys(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> serialize_proof(const Proof& pf);
Proof deserialize_proof(const std::vector<uint8_t>& bytes);

} // namespace zkmedian
