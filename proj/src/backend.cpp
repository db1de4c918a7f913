#include "zkmedian/backend.hpp"

#include <nlohmann/json.hpp>

#include "zkmedian/digest.hpp"
#include "zkmedian/errors.hpp"

namespace zkmedian {

using json = nlohmann::ordered_json;

namespace {

constexpr char kKeysMagic[4] = {'Z', 'K', 'K', 'M'};
constexpr char kProofMagic[4] = {'Z', 'K', 'P', 'F'};
constexpr uint32_t kFormatVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t((v >> 8) & 0xff));
  out.push_back(uint8_t((v >> 16) & 0xff));
  out.push_back(uint8_t((v >> 24) & 0xff));
}

struct Cursor {
  const std::vector<uint8_t>& buf;
  size_t pos = 0;
  void need(size_t n) const {
    if (pos + n > buf.size()) fail(errc::serialization, "truncated artifact");
  }
  uint32_t u32() {
    need(4);
    uint32_t v = uint32_t(buf[pos]) | uint32_t(buf[pos + 1]) << 8 | uint32_t(buf[pos + 2]) << 16 |
                 uint32_t(buf[pos + 3]) << 24;
    pos += 4;
    return v;
  }
  std::vector<uint8_t> bytes(size_t n) {
    need(n);
    std::vector<uint8_t> v(buf.begin() + pos, buf.begin() + pos + n);
    pos += n;
    return v;
  }
  std::string str(size_t n) {
    need(n);
    std::string s(buf.begin() + pos, buf.begin() + pos + n);
    pos += n;
    return s;
  }
};

void put_blob(std::vector<uint8_t>& out, const std::vector<uint8_t>& b) {
  put_u32(out, uint32_t(b.size()));
  out.insert(out.end(), b.begin(), b.end());
}

void put_str(std::vector<uint8_t>& out, const std::string& s) {
  put_u32(out, uint32_t(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

// Mock vk layout: JSON with the setup secret, the digest of the constraint
// system, and the public shape. Holding the secret makes the verifier able to
// recompute proofs; it also makes the scheme trivially forgeable by anyone who
// reads the vk, which is the documented trade of this backend.
json parse_blob_json(const std::vector<uint8_t>& blob, const char* what) {
  json j = json::parse(blob.begin(), blob.end(), nullptr, false);
  if (j.is_discarded()) fail(errc::serialization, std::string("malformed ") + what);
  return j;
}

} // namespace

std::string canonical_public_io(const std::string& params_digest,
                                const std::vector<Int>& public_inputs,
                                const std::vector<Int>& public_outputs) {
  json j;
  j["params_digest"] = params_digest;
  json ins = json::array();
  for (const auto& v : public_inputs) ins.push_back(v.get_str());
  j["public_inputs"] = std::move(ins);
  json outs = json::array();
  for (const auto& v : public_outputs) outs.push_back(v.get_str());
  j["public_outputs"] = std::move(outs);
  return j.dump();
}

KeyMaterial MockBackend::setup(const ConstraintSystem& cs, uint32_t lambda,
                               const std::string& seed) const {
  if (lambda == 0 || lambda > 1024) fail(errc::parameter, "security parameter out of range");
  std::string csd = cs_digest(cs);
  std::vector<uint8_t> secret = expand_digest("mock-setup|" + seed + "|" + csd, 32);

  KeyMaterial km;
  km.backend_id = id();
  km.params_digest = cs.params_digest;
  km.lambda = lambda;

  json vk;
  vk["secret"] = to_hex(secret);
  vk["cs_digest"] = csd;
  vk["num_public_inputs"] = cs.num_public_inputs;
  vk["num_public_wires"] = cs.public_wires.size();
  std::string vk_text = vk.dump();
  km.vk.assign(vk_text.begin(), vk_text.end());

  // pk carries the full constraint system so prove can re-execute it.
  std::vector<uint8_t> cs_bytes = serialize_cs(cs);
  json pk;
  pk["secret"] = to_hex(secret);
  pk["cs_digest"] = csd;
  std::string pk_text = pk.dump();
  put_blob(km.pk, cs_bytes);
  put_str(km.pk, pk_text);
  return km;
}

Proof MockBackend::prove(const KeyMaterial& keys, const Assignment& witness) const {
  if (keys.backend_id != id()) fail(errc::key_mismatch, "keys were made for another backend");
  Cursor cur{keys.pk};
  uint32_t cs_len = cur.u32();
  std::vector<uint8_t> cs_bytes = cur.bytes(cs_len);
  uint32_t meta_len = cur.u32();
  json meta = json::parse(cur.str(meta_len), nullptr, false);
  if (meta.is_discarded() || cur.pos != keys.pk.size())
    fail(errc::serialization, "malformed proving key");

  ConstraintSystem cs = deserialize_cs(cs_bytes.data(), cs_bytes.size());
  if (cs.params_digest != keys.params_digest)
    fail(errc::key_mismatch, "proving key does not match parameter digest");
  if (!check_satisfied(cs, witness))
    fail(errc::backend_refusal, "witness does not satisfy the constraint system");

  std::vector<Int> pub_in, pub_out;
  for (size_t i = 0; i < cs.public_wires.size(); ++i) {
    const Int& v = witness[cs.public_wires[i]];
    (i < cs.num_public_inputs ? pub_in : pub_out).push_back(v);
  }
  std::string io = canonical_public_io(keys.params_digest, pub_in, pub_out);

  Proof pf;
  pf.backend_id = id();
  pf.public_io_digest = sha256_hex(io);
  std::string secret = meta.value("secret", std::string());
  size_t nbytes = (size_t(keys.lambda) * 2 + 7) / 8;
  pf.payload = expand_digest(secret + "|" + keys.params_digest + "|" + io, nbytes);
  return pf;
}

bool MockBackend::verify(const KeyMaterial& keys, const std::vector<Int>& public_inputs,
                         const std::vector<Int>& public_outputs, const Proof& proof) const {
  try {
    if (keys.backend_id != id() || proof.backend_id != id()) return false;
    json vk = parse_blob_json(keys.vk, "verifying key");
    size_t n_in = vk.value("num_public_inputs", size_t(0));
    size_t n_pub = vk.value("num_public_wires", size_t(0));
    if (public_inputs.size() != n_in) return false;
    if (public_inputs.size() + public_outputs.size() != n_pub) return false;

    std::string io = canonical_public_io(keys.params_digest, public_inputs, public_outputs);
    if (sha256_hex(io) != proof.public_io_digest) return false;

    std::string secret = vk.value("secret", std::string());
    size_t nbytes = (size_t(keys.lambda) * 2 + 7) / 8;
    std::vector<uint8_t> expect = expand_digest(secret + "|" + keys.params_digest + "|" + io, nbytes);
    return expect == proof.payload;
  } catch (...) {
    return false;
  }
}

std::unique_ptr<ProofBackend> make_backend(const std::string& backend_id) {
  if (backend_id == "mock") return std::make_unique<MockBackend>();
  fail(errc::parameter, "unknown proof backend '" + backend_id + "'");
}

std::vector<uint8_t> serialize_keys(const KeyMaterial& km) {
  std::vector<uint8_t> out(kKeysMagic, kKeysMagic + 4);
  put_u32(out, kFormatVersion);
  put_str(out, km.backend_id);
  put_str(out, km.params_digest);
  put_u32(out, km.lambda);
  put_blob(out, km.pk);
  put_blob(out, km.vk);
  return out;
}

KeyMaterial deserialize_keys(const std::vector<uint8_t>& bytes) {
  Cursor cur{bytes};
  if (cur.str(4) != std::string(kKeysMagic, 4)) fail(errc::serialization, "not a key file");
  if (cur.u32() != kFormatVersion) fail(errc::serialization, "unsupported key format version");
  KeyMaterial km;
  km.backend_id = cur.str(cur.u32());
  km.params_digest = cur.str(cur.u32());
  km.lambda = cur.u32();
  km.pk = cur.bytes(cur.u32());
  km.vk = cur.bytes(cur.u32());
  if (cur.pos != bytes.size()) fail(errc::serialization, "trailing bytes in key file");
  return km;
}

std::vector<uint8_t> serialize_proof(const Proof& pf) {
  std::vector<uint8_t> out(kProofMagic, kProofMagic + 4);
  put_u32(out, kFormatVersion);
  put_str(out, pf.backend_id);
  put_str(out, pf.public_io_digest);
  put_blob(out, pf.payload);
  return out;
}

Proof deserialize_proof(const std::vector<uint8_t>& bytes) {
  Cursor cur{bytes};
  if (cur.str(4) != std::string(kProofMagic, 4)) fail(errc::serialization, "not a proof file");
  if (cur.u32() != kFormatVersion) fail(errc::serialization, "unsupported proof format version");
  Proof pf;
  pf.backend_id = cur.str(cur.u32());
  pf.public_io_digest = cur.str(cur.u32());
  pf.payload = cur.bytes(cur.u32());
  if (cur.pos != bytes.size()) fail(errc::serialization, "trailing bytes in proof file");
  return pf;
}

} // namespace zkmedian
