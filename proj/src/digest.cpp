#include "zkmedian/digest.hpp"

#include <openssl/evp.h>

#include "zkmedian/errors.hpp"

namespace zkmedian {

const char* errc_name(errc kind) {
  switch (kind) {
    case errc::parameter: return "parameter";
    case errc::input_shape: return "input_shape";
    case errc::domain: return "domain";
    case errc::degenerate: return "degenerate";
    case errc::witness: return "witness";
    case errc::backend_refusal: return "backend_refusal";
    case errc::key_mismatch: return "key_mismatch";
    case errc::incomplete_board: return "incomplete_board";
    case errc::transport: return "transport";
    case errc::audit_precision: return "audit_precision";
    case errc::serialization: return "serialization";
  }
  return "unknown";
}

std::array<uint8_t, 32> sha256(const uint8_t* data, size_t len) {
  std::array<uint8_t, 32> out{};
  unsigned int out_len = 0;
  if (EVP_Digest(data, len, out.data(), &out_len, EVP_sha256(), nullptr) != 1 || out_len != 32)
    fail(errc::serialization, "SHA-256 failed");
  return out;
}

std::array<uint8_t, 32> sha256(const std::string& s) {
  return sha256(reinterpret_cast<const uint8_t*>(s.data()), s.size());
}

std::string to_hex(const uint8_t* data, size_t len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (size_t i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xf]);
  }
  return out;
}

std::string to_hex(const std::vector<uint8_t>& v) { return to_hex(v.data(), v.size()); }

std::vector<uint8_t> from_hex(const std::string& s) {
  if (s.size() % 2 != 0) fail(errc::serialization, "odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<uint8_t> out(s.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(s[2 * i]), lo = nibble(s[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(errc::serialization, "invalid hex digit");
    out[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::string sha256_hex(const std::string& s) {
  auto d = sha256(s);
  return to_hex(d.data(), d.size());
}

std::vector<uint8_t> expand_digest(const std::string& seed, size_t out_len) {
  std::vector<uint8_t> out;
  out.reserve(out_len + 32);
  uint32_t counter = 0;
  while (out.size() < out_len) {
    std::string block = seed;
    block.push_back(static_cast<char>((counter >> 24) & 0xff));
    block.push_back(static_cast<char>((counter >> 16) & 0xff));
    block.push_back(static_cast<char>((counter >> 8) & 0xff));
    block.push_back(static_cast<char>(counter & 0xff));
    auto d = sha256(block);
    out.insert(out.end(), d.begin(), d.end());
    ++counter;
  }
  out.resize(out_len);
  return out;
}

} // namespace zkmedian
