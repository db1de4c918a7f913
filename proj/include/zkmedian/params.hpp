#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "zkmedian/field.hpp"

namespace zkmedian {

using json = nlohmann::json;

// Tail policy for calibrated utilities at or beyond the last table entry:
// set0 zeroes them out, setk keeps them at the floor weight k.
enum class TailMethod { set0, setk };

const char* method_name(TailMethod m);
TailMethod method_from_name(const std::string& s);

// Selection-weight table. entries[i] = floor(e^(eps/2) * entries[i+1]) built
// backward from entries[l-1] = k = ceil(1 / (e^(eps/2) - 1)); non-increasing.
struct LookupTable {
  std::string epsilon; // exact decimal string the table was built from
  TailMethod method = TailMethod::setk;
  std::vector<Int> entries;
  Int tail = 0;
  Int k = 0;

  uint32_t l() const { return static_cast<uint32_t>(entries.size()); }
};

struct ProtocolParams {
  Int p;                      // prime modulus; must exceed 2^(2*bit_width)
  std::string epsilon;        // exact decimal string, > 0
  TailMethod method = TailMethod::setk;
  uint32_t l = 128;           // physical table length
  std::vector<Int> range;     // strictly increasing candidate outputs
  uint32_t m = 0;             // number of providers
  uint32_t bit_width = 64;    // comparator width B
  std::string hash_id = "poseidon-x5-w3-r30";

  uint32_t n() const { return static_cast<uint32_t>(range.size()); }
};

Int default_prime(); // 254-bit prime used when no modulus is configured

Int k_of_epsilon(const std::string& epsilon);
LookupTable build_table(const std::string& epsilon, uint32_t l, TailMethod method);

// Returns the (possibly empty) list of violated invariants as stable codes.
std::vector<std::string> validate_params(const ProtocolParams& params, const LookupTable& table);
// Throws errc::parameter listing every violation.
void require_valid(const ProtocolParams& params, const LookupTable& table);

// Canonical (key-sorted, compact) documents; digests are SHA-256 hex of the
// canonical encoding without the digest field itself.
json params_to_json(const ProtocolParams& params);
ProtocolParams params_from_json(const json& doc);
std::string params_digest(const ProtocolParams& params);

json table_to_json(const LookupTable& table);      // embeds "digest"
LookupTable table_from_json(const json& doc);      // recomputes and checks it
std::string table_digest(const LookupTable& table);

std::vector<Int> parse_range_spec(const std::string& spec); // "A:B" or "a,b,c"

} // namespace zkmedian
