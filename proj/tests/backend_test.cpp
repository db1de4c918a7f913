#include <doctest.h>

#include "zkmedian/backend.hpp"
#include "zkmedian/circuit.hpp"
#include "zkmedian/errors.hpp"

using namespace zkmedian;

namespace {

const Int kP61 = (Int(1) << 61) - 1;

// x * x = y with x private, y a public output.
struct SquareFixture {
  ConstraintSystem cs;
  Assignment witness;
};

SquareFixture square_fixture(int64_t x) {
  Builder b(kP61, true);
  Wire wx = b.alloc(Int(x));
  Wire wy = b.alloc(Int(x) * x);
  b.enforce(b.wire_lc(wx), b.wire_lc(wx), b.wire_lc(wy));
  SquareFixture f;
  f.witness = b.take_assignment();
  f.cs = b.take_system({wy}, 0, "square-params");
  return f;
}

} // namespace

TEST_CASE("setup is deterministic in (seed, system)") {
  SquareFixture f = square_fixture(6);
  MockBackend backend;
  KeyMaterial a = backend.setup(f.cs, 96, "seed-1");
  KeyMaterial b = backend.setup(f.cs, 96, "seed-1");
  CHECK(a.pk == b.pk);
  CHECK(a.vk == b.vk);

  KeyMaterial c = backend.setup(f.cs, 96, "seed-2");
  CHECK(a.vk != c.vk);

  CHECK_THROWS_AS(backend.setup(f.cs, 0, "s"), Error);
}

TEST_CASE("prove and verify round trip, wrong statements rejected") {
  SquareFixture f = square_fixture(6);
  MockBackend backend;
  KeyMaterial keys = backend.setup(f.cs, 96, "seed");
  Proof pf = backend.prove(keys, f.witness);
  CHECK(pf.payload.size() == 24); // 2*lambda bits

  CHECK(backend.verify(keys, {}, {Int(36)}, pf));
  CHECK(!backend.verify(keys, {}, {Int(35)}, pf));
  CHECK(!backend.verify(keys, {}, {}, pf));
  CHECK(!backend.verify(keys, {Int(1)}, {Int(36)}, pf));

  Proof truncated = pf;
  truncated.payload.pop_back();
  CHECK(!backend.verify(keys, {}, {Int(36)}, truncated));

  Proof flipped = pf;
  flipped.payload[0] ^= 1;
  CHECK(!backend.verify(keys, {}, {Int(36)}, flipped));

  Proof wrong_backend = pf;
  wrong_backend.backend_id = "other";
  CHECK(!backend.verify(keys, {}, {Int(36)}, wrong_backend));
}

TEST_CASE("prove refuses a witness that fails the system") {
  SquareFixture f = square_fixture(6);
  MockBackend backend;
  KeyMaterial keys = backend.setup(f.cs, 96, "seed");

  Assignment bad = f.witness;
  bad[2] = Int(35);
  CHECK_THROWS_AS(backend.prove(keys, bad), Error);

  Assignment short_w(bad.begin(), bad.begin() + 2);
  CHECK_THROWS_AS(backend.prove(keys, short_w), Error);
}

TEST_CASE("proofs from different seeds do not cross-verify") {
  SquareFixture f = square_fixture(6);
  MockBackend backend;
  KeyMaterial k1 = backend.setup(f.cs, 96, "seed-1");
  KeyMaterial k2 = backend.setup(f.cs, 96, "seed-2");
  Proof pf = backend.prove(k1, f.witness);
  CHECK(backend.verify(k1, {}, {Int(36)}, pf));
  CHECK(!backend.verify(k2, {}, {Int(36)}, pf));
}

TEST_CASE("key material serialization round trips and rejects damage") {
  SquareFixture f = square_fixture(3);
  MockBackend backend;
  KeyMaterial km = backend.setup(f.cs, 64, "s");

  auto bytes = serialize_keys(km);
  KeyMaterial back = deserialize_keys(bytes);
  CHECK(back.backend_id == km.backend_id);
  CHECK(back.params_digest == km.params_digest);
  CHECK(back.lambda == km.lambda);
  CHECK(back.pk == km.pk);
  CHECK(back.vk == km.vk);

  auto trailing = bytes;
  trailing.push_back(7);
  CHECK_THROWS_AS(deserialize_keys(trailing), Error);

  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  CHECK_THROWS_AS(deserialize_keys(truncated), Error);

  auto wrong_magic = bytes;
  wrong_magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_keys(wrong_magic), Error);
}

TEST_CASE("proof serialization round trips and rejects damage") {
  SquareFixture f = square_fixture(3);
  MockBackend backend;
  KeyMaterial km = backend.setup(f.cs, 64, "s");
  Proof pf = backend.prove(km, f.witness);

  auto bytes = serialize_proof(pf);
  Proof back = deserialize_proof(bytes);
  CHECK(back.backend_id == pf.backend_id);
  CHECK(back.public_io_digest == pf.public_io_digest);
  CHECK(back.payload == pf.payload);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(deserialize_proof(trailing), Error);

  auto truncated = bytes;
  truncated.resize(4);
  CHECK_THROWS_AS(deserialize_proof(truncated), Error);
}

TEST_CASE("canonical io encoding is order and value sensitive") {
  std::string a = canonical_public_io("d", {Int(1), Int(2)}, {Int(3)});
  std::string b = canonical_public_io("d", {Int(2), Int(1)}, {Int(3)});
  std::string c = canonical_public_io("d", {Int(1), Int(2)}, {Int(4)});
  std::string d = canonical_public_io("e", {Int(1), Int(2)}, {Int(3)});
  CHECK(a != b);
  CHECK(a != c);
  CHECK(a != d);
  CHECK(a == canonical_public_io("d", {Int(1), Int(2)}, {Int(3)}));
}

TEST_CASE("unknown backend ids are refused") {
  CHECK(make_backend("mock") != nullptr);
  CHECK_THROWS_AS(make_backend("groth16"), Error);
}
