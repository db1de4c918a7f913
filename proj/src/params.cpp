#include "zkmedian/params.hpp"

#include <algorithm>

#include "zkmedian/errors.hpp"
#include "zkmedian/digest.hpp"
#include "zkmedian/realnum.hpp"

namespace zkmedian {

namespace {

constexpr mpfr_prec_t kStartPrec = 192;
constexpr mpfr_prec_t kMaxPrec = 1 << 20;

// e^(eps/2) is irrational for decimal eps > 0, so floors and ceilings of the
// derived quantities are never on a lattice point and retries terminate.
Rat positive_epsilon(const std::string& epsilon) {
  Rat e = rat_from_decimal(epsilon);
  if (e <= 0) fail(errc::parameter, "epsilon must be positive: " + epsilon);
  return e;
}

} // namespace

const char* method_name(TailMethod m) { return m == TailMethod::set0 ? "set0" : "setk"; }

TailMethod method_from_name(const std::string& s) {
  if (s == "set0") return TailMethod::set0;
  if (s == "setk") return TailMethod::setk;
  fail(errc::parameter, "unknown tail method: " + s);
}

Int default_prime() {
  // 254-bit prime with a large power-of-two subgroup; comfortably above
  // 2^128 so the default 64-bit comparator width fits.
  static const Int p(
      "21888242871839275222246405745257275088548364400416034343698204186575808495617");
  return p;
}

Int k_of_epsilon(const std::string& epsilon) {
  Rat half = positive_epsilon(epsilon) / 2;
  for (mpfr_prec_t prec = kStartPrec; prec <= kMaxPrec; prec *= 2) {
    Interval a = Interval::exp_rat(half, prec);
    Interval den = sub(a, Interval::from_rat(Rat(1), prec));
    if (!den.strictly_positive()) continue; // eps too small for this precision
    Interval q = div(Interval::from_rat(Rat(1), prec), den);
    if (auto k = q.ceil_if_certain()) return *k;
  }
  fail(errc::audit_precision, "k_of_epsilon did not settle below the precision cap");
}

LookupTable build_table(const std::string& epsilon, uint32_t l, TailMethod method) {
  if (l < 2) fail(errc::parameter, "table length must be at least 2");
  Rat half = positive_epsilon(epsilon) / 2;
  Int k = k_of_epsilon(epsilon);
  for (mpfr_prec_t prec = kStartPrec; prec <= kMaxPrec; prec *= 2) {
    Interval a = Interval::exp_rat(half, prec);
    std::vector<Int> entries(l);
    entries[l - 1] = k;
    bool settled = true;
    for (uint32_t i = l - 1; i-- > 0;) {
      auto fl = a.mul_int(entries[i + 1]).floor_if_certain();
      if (!fl) {
        settled = false;
        break;
      }
      entries[i] = *fl;
    }
    if (!settled) continue;
    LookupTable t;
    t.epsilon = epsilon;
    t.method = method;
    t.entries = std::move(entries);
    t.tail = method == TailMethod::set0 ? Int(0) : k;
    t.k = k;
    return t;
  }
  fail(errc::audit_precision, "build_table did not settle below the precision cap");
}

std::vector<std::string> validate_params(const ProtocolParams& params, const LookupTable& table) {
  std::vector<std::string> out;
  auto flag = [&](const char* code) { out.emplace_back(code); };

  try {
    positive_epsilon(params.epsilon);
  } catch (const Error&) {
    flag("epsilon_not_positive_decimal");
  }
  if (params.m == 0) flag("m_zero");
  if (params.l < 2) flag("l_too_small");
  if (params.n() < 2) flag("range_too_small");
  if (params.bit_width < 1 || params.bit_width > 128) flag("bit_width_unsupported");

  if (mpz_probab_prime_p(params.p.get_mpz_t(), 30) == 0) flag("p_not_prime");
  Int two_b = 1;
  mpz_mul_2exp(two_b.get_mpz_t(), two_b.get_mpz_t(), params.bit_width);
  Int two_2b = two_b * two_b;
  if (params.p <= two_2b) flag("p_not_above_bitwidth_square");

  bool range_ok = true;
  for (size_t i = 0; i < params.range.size(); ++i) {
    if (params.range[i] < 0 || params.range[i] >= two_b) {
      flag("range_exceeds_bit_width");
      range_ok = false;
      break;
    }
    if (i > 0 && params.range[i] <= params.range[i - 1]) {
      flag("range_not_strictly_increasing");
      range_ok = false;
      break;
    }
  }
  (void)range_ok;
  if (Int(params.m) >= two_b) flag("m_exceeds_bit_width");

  if (table.l() != params.l) flag("table_length_mismatch");
  if (table.method != params.method) flag("table_method_mismatch");
  if (table.epsilon != params.epsilon) flag("table_epsilon_mismatch");
  if (!table.entries.empty()) {
    for (size_t i = 0; i + 1 < table.entries.size(); ++i)
      if (table.entries[i] < table.entries[i + 1]) {
        flag("table_not_nonincreasing");
        break;
      }
    if (table.entries.back() != table.k) flag("table_floor_mismatch");
    Int total = Int(params.n()) * table.entries.front();
    if (total >= params.p) flag("mass_overflow");
    Int scaled = total;
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), 40);
    if (scaled > params.p) flag("mass_not_negligible");
    if (total >= two_b) flag("cumulative_exceeds_bit_width");
  }
  return out;
}

void require_valid(const ProtocolParams& params, const LookupTable& table) {
  auto violations = validate_params(params, table);
  if (violations.empty()) return;
  std::string msg = "invalid parameters:";
  for (const auto& v : violations) msg += " " + v;
  fail(errc::parameter, msg);
}

json params_to_json(const ProtocolParams& params) {
  json doc;
  doc["bit_width"] = params.bit_width;
  doc["epsilon"] = params.epsilon;
  doc["hash_id"] = params.hash_id;
  doc["l"] = params.l;
  doc["m"] = params.m;
  doc["method"] = method_name(params.method);
  doc["p"] = params.p.get_str();
  json range = json::array();
  for (const auto& r : params.range) range.push_back(r.get_str());
  doc["range"] = std::move(range);
  return doc;
}

ProtocolParams params_from_json(const json& doc) {
  try {
    ProtocolParams p;
    p.bit_width = doc.at("bit_width").get<uint32_t>();
    p.epsilon = doc.at("epsilon").get<std::string>();
    p.hash_id = doc.at("hash_id").get<std::string>();
    p.l = doc.at("l").get<uint32_t>();
    p.m = doc.at("m").get<uint32_t>();
    p.method = method_from_name(doc.at("method").get<std::string>());
    p.p = int_from_decimal(doc.at("p").get<std::string>());
    for (const auto& r : doc.at("range")) p.range.push_back(int_from_decimal(r.get<std::string>()));
    return p;
  } catch (const json::exception& e) {
    fail(errc::input_shape, std::string("malformed params document: ") + e.what());
  }
}

std::string params_digest(const ProtocolParams& params) {
  return sha256_hex(params_to_json(params).dump());
}

static json table_body(const LookupTable& table) {
  json doc;
  json entries = json::array();
  for (const auto& e : table.entries) entries.push_back(e.get_str());
  doc["entries"] = std::move(entries);
  doc["epsilon"] = table.epsilon;
  doc["k"] = table.k.get_str();
  doc["method"] = method_name(table.method);
  doc["tail"] = table.tail.get_str();
  return doc;
}

std::string table_digest(const LookupTable& table) {
  return sha256_hex(table_body(table).dump());
}

json table_to_json(const LookupTable& table) {
  json doc = table_body(table);
  doc["digest"] = table_digest(table);
  return doc;
}

LookupTable table_from_json(const json& doc) {
  try {
    LookupTable t;
    t.epsilon = doc.at("epsilon").get<std::string>();
    t.method = method_from_name(doc.at("method").get<std::string>());
    t.k = int_from_decimal(doc.at("k").get<std::string>());
    t.tail = int_from_decimal(doc.at("tail").get<std::string>());
    for (const auto& e : doc.at("entries")) t.entries.push_back(int_from_decimal(e.get<std::string>()));
    std::string digest = doc.at("digest").get<std::string>();
    if (digest != table_digest(t)) fail(errc::serialization, "table digest mismatch");
    return t;
  } catch (const json::exception& e) {
    fail(errc::input_shape, std::string("malformed table document: ") + e.what());
  }
}

std::vector<Int> parse_range_spec(const std::string& spec) {
  std::vector<Int> out;
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    Int lo = int_from_decimal(spec.substr(0, colon));
    Int hi = int_from_decimal(spec.substr(colon + 1));
    if (hi < lo) fail(errc::parameter, "descending range spec: " + spec);
    if (hi - lo > 1 << 20) fail(errc::parameter, "range spec too large: " + spec);
    for (Int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  size_t start = 0;
  while (start <= spec.size()) {
    auto comma = spec.find(',', start);
    std::string tok = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(int_from_decimal(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

} // namespace zkmedian
