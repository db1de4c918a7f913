#include "zkmedian/r1cs.hpp"

#include <cstring>

#include <nlohmann/json.hpp>

#include "zkmedian/digest.hpp"
#include "zkmedian/errors.hpp"

namespace zkmedian {

using json = nlohmann::json;

Int eval_lincomb(const LinComb& lc, const Assignment& w, const Fp& fp) {
  Int acc = 0;
  for (const auto& t : lc.terms) {
    // coeff and value are canonical, so the accumulator stays small enough
    // to reduce once at the end.
    mpz_addmul(acc.get_mpz_t(), t.coeff.get_mpz_t(), w[t.wire].get_mpz_t());
  }
  return fp.reduce(acc);
}

bool check_satisfied(const ConstraintSystem& cs, const Assignment& w) {
  if (w.size() != cs.num_wires) return false;
  if (w.empty() || w[0] != 1) return false;
  Fp fp(cs.p);
  for (const auto& c : cs.constraints) {
    Int a = eval_lincomb(c.a, w, fp);
    Int b = eval_lincomb(c.b, w, fp);
    Int rhs = eval_lincomb(c.c, w, fp);
    if (fp.mul(a, b) != rhs) return false;
  }
  return true;
}

namespace {

constexpr char kCsMagic[4] = {'Z', 'K', 'R', '1'};
constexpr char kWitMagic[4] = {'Z', 'K', 'W', 'T'};
constexpr uint32_t kVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

class Cursor {
public:
  Cursor(const uint8_t* data, size_t len) : data_(data), len_(len) {}

  uint32_t u32() {
    if (pos_ + 4 > len_) fail(errc::serialization, "truncated blob");
    uint32_t v = data_[pos_] | (data_[pos_ + 1] << 8) | (data_[pos_ + 2] << 16) |
                 (static_cast<uint32_t>(data_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }

  const uint8_t* bytes(size_t n) {
    if (pos_ + n > len_) fail(errc::serialization, "truncated blob");
    const uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  bool at_end() const { return pos_ == len_; }

private:
  const uint8_t* data_;
  size_t len_;
  size_t pos_ = 0;
};

void put_lincomb(std::vector<uint8_t>& out, const LinComb& lc) {
  put_u32(out, static_cast<uint32_t>(lc.terms.size()));
  for (const auto& t : lc.terms) {
    put_u32(out, t.wire);
    auto bytes = int_to_le32(t.coeff);
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
}

LinComb get_lincomb(Cursor& cur, uint32_t num_wires) {
  LinComb lc;
  uint32_t n = cur.u32();
  lc.terms.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    Term t;
    t.wire = cur.u32();
    if (t.wire >= num_wires) fail(errc::serialization, "term references unknown wire");
    t.coeff = int_from_le32(cur.bytes(32));
    lc.terms.push_back(std::move(t));
  }
  return lc;
}

} // namespace

std::vector<uint8_t> serialize_cs(const ConstraintSystem& cs) {
  json header;
  header["num_public_inputs"] = cs.num_public_inputs;
  header["num_wires"] = cs.num_wires;
  header["p"] = cs.p.get_str();
  header["params_digest"] = cs.params_digest;
  header["public_wires"] = cs.public_wires;
  std::string hdr = header.dump();

  std::vector<uint8_t> out;
  out.insert(out.end(), kCsMagic, kCsMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(hdr.size()));
  out.insert(out.end(), hdr.begin(), hdr.end());
  put_u32(out, static_cast<uint32_t>(cs.constraints.size()));
  for (const auto& c : cs.constraints) {
    put_lincomb(out, c.a);
    put_lincomb(out, c.b);
    put_lincomb(out, c.c);
  }
  return out;
}

ConstraintSystem deserialize_cs(const uint8_t* data, size_t len) {
  Cursor cur(data, len);
  if (std::memcmp(cur.bytes(4), kCsMagic, 4) != 0) fail(errc::serialization, "bad system magic");
  if (cur.u32() != kVersion) fail(errc::serialization, "unsupported system version");
  uint32_t hdr_len = cur.u32();
  const uint8_t* hdr_bytes = cur.bytes(hdr_len);
  ConstraintSystem cs;
  try {
    json header = json::parse(hdr_bytes, hdr_bytes + hdr_len);
    cs.num_public_inputs = header.at("num_public_inputs").get<uint32_t>();
    cs.num_wires = header.at("num_wires").get<uint32_t>();
    cs.p = int_from_decimal(header.at("p").get<std::string>());
    cs.params_digest = header.at("params_digest").get<std::string>();
    cs.public_wires = header.at("public_wires").get<std::vector<Wire>>();
  } catch (const json::exception& e) {
    fail(errc::serialization, std::string("bad system header: ") + e.what());
  }
  for (Wire w : cs.public_wires)
    if (w >= cs.num_wires) fail(errc::serialization, "public wire out of range");
  uint32_t n = cur.u32();
  cs.constraints.reserve(n);
  for (uint32_t i = 0; i < n; ++i) {
    Constraint c;
    c.a = get_lincomb(cur, cs.num_wires);
    c.b = get_lincomb(cur, cs.num_wires);
    c.c = get_lincomb(cur, cs.num_wires);
    cs.constraints.push_back(std::move(c));
  }
  if (!cur.at_end()) fail(errc::serialization, "trailing bytes in system blob");
  return cs;
}

std::vector<uint8_t> serialize_assignment(const Assignment& w, const Int& p,
                                          const std::string& params_digest) {
  json header;
  header["count"] = w.size();
  header["p"] = p.get_str();
  header["params_digest"] = params_digest;
  std::string hdr = header.dump();

  std::vector<uint8_t> out;
  out.insert(out.end(), kWitMagic, kWitMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(hdr.size()));
  out.insert(out.end(), hdr.begin(), hdr.end());
  for (const auto& v : w) {
    auto bytes = int_to_le32(v);
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  return out;
}

Assignment deserialize_assignment(const uint8_t* data, size_t len, Int* p_out,
                                  std::string* params_digest_out) {
  Cursor cur(data, len);
  if (std::memcmp(cur.bytes(4), kWitMagic, 4) != 0) fail(errc::serialization, "bad witness magic");
  if (cur.u32() != kVersion) fail(errc::serialization, "unsupported witness version");
  uint32_t hdr_len = cur.u32();
  const uint8_t* hdr_bytes = cur.bytes(hdr_len);
  size_t count = 0;
  try {
    json header = json::parse(hdr_bytes, hdr_bytes + hdr_len);
    count = header.at("count").get<size_t>();
    if (p_out) *p_out = int_from_decimal(header.at("p").get<std::string>());
    if (params_digest_out) *params_digest_out = header.at("params_digest").get<std::string>();
  } catch (const json::exception& e) {
    fail(errc::serialization, std::string("bad witness header: ") + e.what());
  }
  Assignment w;
  w.reserve(count);
  for (size_t i = 0; i < count; ++i) w.push_back(int_from_le32(cur.bytes(32)));
  if (!cur.at_end()) fail(errc::serialization, "trailing bytes in witness blob");
  return w;
}

std::string cs_digest(const ConstraintSystem& cs) {
  auto bytes = serialize_cs(cs);
  auto d = sha256(bytes.data(), bytes.size());
  return to_hex(d.data(), d.size());
}

} // namespace zkmedian
