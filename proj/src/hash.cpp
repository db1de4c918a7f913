#include "zkmedian/hash.hpp"

#include <cctype>
#include <map>
#include <mutex>

#include "zkmedian/digest.hpp"
#include "zkmedian/errors.hpp"

namespace zkmedian {

namespace {

struct IdSpec {
  uint32_t sbox_exp;
  uint32_t rounds;
};

IdSpec parse_hash_id(const std::string& id) {
  // "poseidon-x<exp>-w3-r<rounds>"
  auto bad = [&]() -> IdSpec { fail(errc::parameter, "unknown hash id: " + id); };
  const std::string prefix = "poseidon-x";
  if (id.rfind(prefix, 0) != 0) return bad();
  size_t pos = prefix.size();
  size_t dash = id.find('-', pos);
  if (dash == std::string::npos) return bad();
  std::string exp_s = id.substr(pos, dash - pos);
  if (id.substr(dash, 4) != "-w3-") return bad();
  pos = dash + 4;
  if (pos >= id.size() || id[pos] != 'r') return bad();
  std::string rounds_s = id.substr(pos + 1);
  if (exp_s.empty() || rounds_s.empty()) return bad();
  for (char c : exp_s + rounds_s)
    if (!isdigit(static_cast<unsigned char>(c))) return bad();
  IdSpec spec{static_cast<uint32_t>(std::stoul(exp_s)), static_cast<uint32_t>(std::stoul(rounds_s))};
  if (spec.sbox_exp != 3 && spec.sbox_exp != 5 && spec.sbox_exp != 7) return bad();
  if (spec.rounds < 1 || spec.rounds > 4096) return bad();
  return spec;
}

// Derivation stream: field elements taken as big-endian 32-byte blocks mod p,
// one counter position per element.
class ElementStream {
public:
  ElementStream(std::string seed, const Int& p) : seed_(std::move(seed)), p_(p) {}

  Int next() {
    std::string block = seed_;
    uint32_t c = counter_++;
    block.push_back(static_cast<char>((c >> 24) & 0xff));
    block.push_back(static_cast<char>((c >> 16) & 0xff));
    block.push_back(static_cast<char>((c >> 8) & 0xff));
    block.push_back(static_cast<char>(c & 0xff));
    auto d = sha256(block);
    Int v;
    mpz_import(v.get_mpz_t(), d.size(), 1, 1, 0, 0, d.data());
    Int r;
    mpz_mod(r.get_mpz_t(), v.get_mpz_t(), p_.get_mpz_t());
    return r;
  }

private:
  std::string seed_;
  Int p_;
  uint32_t counter_ = 0;
};

std::shared_ptr<const HashInstance> build_instance(const std::string& hash_id, const Int& p) {
  if (p <= 7) fail(errc::parameter, "modulus too small for the sponge");
  IdSpec spec = parse_hash_id(hash_id);
  auto h = std::make_shared<HashInstance>();
  h->hash_id = hash_id;
  h->p = p;
  h->rounds = spec.rounds;
  h->sbox_exp = spec.sbox_exp;
  h->derivation_seed = hash_id + "|" + p.get_str();
  ElementStream stream(h->derivation_seed, p);

  h->round_constants.resize(spec.rounds);
  for (auto& rc : h->round_constants)
    for (auto& c : rc) c = stream.next();

  // Cauchy matrix 1/(x_i + y_j): invertible once the x are distinct, the y
  // are distinct, and every sum is nonzero. Rejection keeps the stream
  // deterministic.
  Fp fp(p);
  std::array<Int, 3> xs, ys;
  while (true) {
    for (auto& x : xs) x = stream.next();
    for (auto& y : ys) y = stream.next();
    bool ok = xs[0] != xs[1] && xs[0] != xs[2] && xs[1] != xs[2] &&
              ys[0] != ys[1] && ys[0] != ys[2] && ys[1] != ys[2];
    for (int i = 0; ok && i < 3; ++i)
      for (int j = 0; ok && j < 3; ++j)
        if (fp.add(xs[i], ys[j]) == 0) ok = false;
    if (!ok) continue;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h->mds[i][j] = fp.inv(fp.add(xs[i], ys[j]));
    break;
  }
  return h;
}

} // namespace

std::shared_ptr<const HashInstance> hash_instance(const std::string& hash_id, const Int& p) {
  static std::mutex mu;
  static std::map<std::pair<std::string, std::string>, std::shared_ptr<const HashInstance>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(hash_id, p.get_str());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto h = build_instance(hash_id, p);
  cache.emplace(std::move(key), h);
  return h;
}

void permute(const HashInstance& h, std::array<Int, 3>& state) {
  Fp fp(h.p);
  for (uint32_t r = 0; r < h.rounds; ++r) {
    for (int i = 0; i < 3; ++i) {
      Int t = fp.add(state[i], h.round_constants[r][i]);
      state[i] = fp.pow_ui(t, h.sbox_exp);
    }
    std::array<Int, 3> mixed;
    for (int i = 0; i < 3; ++i) {
      Int acc = 0;
      for (int j = 0; j < 3; ++j) acc += h.mds[i][j] * state[j];
      mixed[i] = fp.reduce(acc);
    }
    state = std::move(mixed);
  }
}

Int sponge_hash(const HashInstance& h, const std::vector<Int>& elems) {
  Fp fp(h.p);
  std::array<Int, 3> state = {Int(0), Int(0), Int(0)};
  std::vector<Int> seq;
  seq.reserve(elems.size() + 1);
  seq.emplace_back(elems.size());
  for (const auto& e : elems) seq.push_back(fp.reduce(e));
  for (size_t pos = 0; pos < seq.size(); pos += 2) {
    state[0] = fp.add(state[0], seq[pos]);
    if (pos + 1 < seq.size()) state[1] = fp.add(state[1], seq[pos + 1]);
    permute(h, state);
  }
  return state[0];
}

Int commitment_of(const HashInstance& h, const Int& x, const Int& r) {
  return sponge_hash(h, {x, r});
}

} // namespace zkmedian
