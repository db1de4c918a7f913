#include <doctest.h>

#include <algorithm>

#include "zkmedian/errors.hpp"
#include "zkmedian/params.hpp"

using namespace zkmedian;

namespace {

std::vector<Int> iota_range(int64_t lo, int64_t hi) {
  std::vector<Int> r;
  for (int64_t v = lo; v <= hi; ++v) r.emplace_back(v);
  return r;
}

bool has_violation(const std::vector<std::string>& vs, const std::string& code) {
  return std::find(vs.begin(), vs.end(), code) != vs.end();
}

ProtocolParams small_params() {
  ProtocolParams p;
  p.p = (Int(1) << 61) - 1;
  p.epsilon = "1";
  p.method = TailMethod::setk;
  p.l = 8;
  p.range = iota_range(0, 9);
  p.m = 5;
  p.bit_width = 16;
  p.hash_id = "poseidon-x5-w3-r8";
  return p;
}

} // namespace

TEST_CASE("floor weight k per privacy budget") {
  CHECK(k_of_epsilon("0.5") == 4);
  CHECK(k_of_epsilon("1") == 2);
  CHECK(k_of_epsilon("1.3863") == 1);
  CHECK(k_of_epsilon("2") == 1);
}

TEST_CASE("table construction fixtures") {
  LookupTable a = build_table("1.3863", 3, TailMethod::set0);
  CHECK(a.entries == std::vector<Int>{4, 2, 1});
  CHECK(a.tail == 0);
  CHECK(a.k == 1);

  LookupTable b = build_table("1", 4, TailMethod::setk);
  CHECK(b.entries == std::vector<Int>{6, 4, 3, 2});
  CHECK(b.tail == 2);

  LookupTable c = build_table("1.3863", 3, TailMethod::setk);
  CHECK(c.entries == std::vector<Int>{4, 2, 1});
  CHECK(c.tail == 1);

  LookupTable d = build_table("1", 8, TailMethod::setk);
  CHECK(d.entries == std::vector<Int>{37, 23, 14, 9, 6, 4, 3, 2});

  LookupTable e = build_table("1.3863", 8, TailMethod::setk);
  CHECK(e.entries == std::vector<Int>{128, 64, 32, 16, 8, 4, 2, 1});
}

TEST_CASE("table rejects degenerate lengths and budgets") {
  CHECK_THROWS_AS(build_table("1", 1, TailMethod::setk), Error);
  CHECK_THROWS_AS(build_table("1", 0, TailMethod::setk), Error);
  CHECK_THROWS_AS(build_table("0", 4, TailMethod::setk), Error);
  CHECK_THROWS_AS(build_table("-1", 4, TailMethod::setk), Error);
  CHECK_THROWS_AS(build_table("abc", 4, TailMethod::setk), Error);
}

TEST_CASE("valid parameter documents pass cleanly") {
  ProtocolParams p = small_params();
  LookupTable t = build_table(p.epsilon, p.l, p.method);
  CHECK(validate_params(p, t).empty());

  // The documented large profile: 254-bit modulus, eps=0.5, l=128, n=100.
  ProtocolParams big;
  big.p = default_prime();
  big.epsilon = "0.5";
  big.method = TailMethod::setk;
  big.l = 128;
  big.range = iota_range(0, 99);
  big.m = 100;
  big.bit_width = 64;
  big.hash_id = "poseidon-x5-w3-r30";
  LookupTable bt = build_table(big.epsilon, big.l, big.method);
  CHECK(validate_params(big, bt).empty());
}

TEST_CASE("validation reports stable violation codes") {
  ProtocolParams p = small_params();
  LookupTable t = build_table(p.epsilon, p.l, p.method);

  ProtocolParams bad = p;
  bad.m = 0;
  CHECK(has_violation(validate_params(bad, t), "m_zero"));

  bad = p;
  bad.range = {Int(3)};
  CHECK(has_violation(validate_params(bad, t), "range_too_small"));

  bad = p;
  bad.range = {Int(3), Int(3)};
  CHECK(has_violation(validate_params(bad, t), "range_not_strictly_increasing"));

  bad = p;
  bad.range = {Int(0), Int(1) << 20};
  CHECK(has_violation(validate_params(bad, t), "range_exceeds_bit_width"));

  bad = p;
  bad.p = Int(1) << 32; // composite and too small for 16-bit comparators
  auto vs = validate_params(bad, t);
  CHECK(has_violation(vs, "p_not_prime"));

  bad = p;
  bad.p = Int("4294967291"); // prime, but not above 2^(2*16)... it is 2^32-5, needs > 2^32
  CHECK(has_violation(validate_params(bad, t), "p_not_above_bitwidth_square"));

  // A tiny prime makes the total mass non-negligible relative to p.
  bad = p;
  bad.p = Int(97);
  bad.bit_width = 3;
  bad.range = iota_range(0, 6);
  bad.m = 2;
  bad.l = 2;
  LookupTable tiny = build_table("1", 2, TailMethod::setk);
  vs = validate_params(bad, tiny);
  CHECK(has_violation(vs, "mass_not_negligible"));
}

TEST_CASE("cumulative weight must fit the comparator width") {
  // Total mass is n * T[0]; with T[0] = 37 seven range elements overflow an
  // 8-bit comparator (259 >= 256) while every other invariant stays intact.
  ProtocolParams p = small_params();
  p.bit_width = 8;
  p.range = iota_range(0, 6);
  LookupTable t = build_table(p.epsilon, p.l, p.method);
  auto vs = validate_params(p, t);
  CHECK(has_violation(vs, "cumulative_exceeds_bit_width"));
  CHECK(vs.size() == 1);
}

TEST_CASE("table mismatch against params is caught") {
  ProtocolParams p = small_params();
  LookupTable wrong = build_table("0.5", p.l, p.method);
  auto vs = validate_params(p, wrong);
  CHECK(!vs.empty());
  CHECK_THROWS_AS(require_valid(p, wrong), Error);
}

TEST_CASE("params json round trip and digest stability") {
  ProtocolParams p = small_params();
  json doc = params_to_json(p);
  ProtocolParams back = params_from_json(doc);
  CHECK(back.p == p.p);
  CHECK(back.epsilon == p.epsilon);
  CHECK(back.method == p.method);
  CHECK(back.l == p.l);
  CHECK(back.range == p.range);
  CHECK(back.m == p.m);
  CHECK(back.bit_width == p.bit_width);
  CHECK(back.hash_id == p.hash_id);
  CHECK(params_digest(back) == params_digest(p));

  ProtocolParams other = p;
  other.m = p.m + 1;
  CHECK(params_digest(other) != params_digest(p));
}

TEST_CASE("table json embeds a self-checking digest") {
  LookupTable t = build_table("1", 4, TailMethod::setk);
  json doc = table_to_json(t);
  CHECK(doc.contains("digest"));
  LookupTable back = table_from_json(doc);
  CHECK(back.entries == t.entries);
  CHECK(back.tail == t.tail);

  json doctored = doc;
  doctored["entries"][0] = "7";
  CHECK_THROWS_AS(table_from_json(doctored), Error);
}

TEST_CASE("range specs parse inclusively and reject junk") {
  CHECK(parse_range_spec("0:3") == iota_range(0, 3));
  CHECK(parse_range_spec("5:5") == std::vector<Int>{5});
  CHECK(parse_range_spec("2,3,10") == (std::vector<Int>{2, 3, 10}));
  CHECK_THROWS_AS(parse_range_spec("3:1"), Error);
  CHECK_THROWS_AS(parse_range_spec(""), Error);
  CHECK_THROWS_AS(parse_range_spec("0:9999999999"), Error);
  CHECK_THROWS_AS(parse_range_spec("a:b"), Error);
}
