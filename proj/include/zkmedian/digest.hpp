#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace zkmedian {

std::array<uint8_t, 32> sha256(const uint8_t* data, size_t len);
std::array<uint8_t, 32> sha256(const std::string& s);

std::string to_hex(const uint8_t* data, size_t len);
std::string to_hex(const std::vector<uint8_t>& v);
std::vector<uint8_t> from_hex(const std::string& s);

std::string sha256_hex(const std::string& s);

// Counter-mode expansion: block i is SHA-256(seed || big-endian-32(i)),
// blocks concatenated and truncated to out_len bytes.
std::vector<uint8_t> expand_digest(const std::string& seed, size_t out_len);

} // namespace zkmedian
