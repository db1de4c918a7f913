#include <doctest.h>

#include "zkmedian/audit.hpp"
#include "zkmedian/errors.hpp"
#include "zkmedian/reference.hpp"

using namespace zkmedian;

namespace {

std::vector<Int> iota_range(int64_t lo, int64_t hi) {
  std::vector<Int> r;
  for (int64_t v = lo; v <= hi; ++v) r.emplace_back(v);
  return r;
}

Rat make_rat(long num, long den) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

} // namespace

TEST_CASE("privacy ratio audit certifies the epsilon = 2 ln 2 pair grid") {
  AuditReport rep = dp_ratio_audit(iota_range(0, 2), 2, "1.3863", TailMethod::setk, 3);
  CHECK(rep.passed);
  // Worst multiplicative ratio over all neighboring pairs on this grid is
  // exactly 9/5, comfortably under e^1.3863.
  CHECK(rep.document.at("max_ratio").get<std::string>() == "9/5");
  CHECK(rep.document.at("pairs").get<uint64_t>() > 0);
  CHECK(rep.document.at("violations").empty());

  AuditReport zero = dp_ratio_audit(iota_range(0, 2), 2, "1.3863", TailMethod::set0, 3);
  CHECK(zero.passed);
}

TEST_CASE("privacy audit covers single records and both methods") {
  for (TailMethod method : {TailMethod::setk, TailMethod::set0}) {
    AuditReport rep = dp_ratio_audit(iota_range(0, 3), 1, "0.5", method, 3);
    CHECK(rep.passed);
  }
}

TEST_CASE("set0 leaves a bounded additive gap on the larger fixture") {
  // Replacing one record can move an outcome's mass from zero to positive
  // under set0. The gap itself: db [3,1,4,1,5] gives element 6 zero mass,
  // its neighbor [3,1,4,1,6] gives it 1/14, and the certified bound is 1/2.
  ProtocolParams p;
  p.p = (Int(1) << 61) - 1;
  p.epsilon = "1.3863";
  p.method = TailMethod::set0;
  p.l = 3;
  p.range = iota_range(0, 6);
  p.m = 5;
  p.bit_width = 8;
  LookupTable t = build_table(p.epsilon, p.l, p.method);
  auto before = exact_distribution(p, t, {Int(3), Int(1), Int(4), Int(1), Int(5)});
  auto after = exact_distribution(p, t, {Int(3), Int(1), Int(4), Int(1), Int(6)});
  CHECK(before.masses[6] == Rat(0));
  CHECK(before.denominator == Int(13));
  CHECK(after.masses[6] == make_rat(1, 14));
  CHECK(after.denominator == Int(14));
  // e^(eps/2) * k / T[0] with k = 1, T[0] = 4 and e^(eps/2) just above 2.
  CHECK(after.masses[6] < make_rat(1, 2));
}

TEST_CASE("utility tail audit passes on the privacy grid") {
  AuditReport rep = utility_bound_audit(iota_range(0, 2), 2, "1.3863", TailMethod::setk, 3);
  CHECK(rep.passed);
  AuditReport zero = utility_bound_audit(iota_range(0, 2), 2, "1.3863", TailMethod::set0, 3);
  CHECK(zero.passed);
  AuditReport one = utility_bound_audit(iota_range(0, 3), 1, "1", TailMethod::setk, 3);
  CHECK(one.passed);
}

TEST_CASE("table audit certifies shape and geometric drift") {
  CHECK(table_error_audit("1", TailMethod::setk, 4).passed);
  CHECK(table_error_audit("1.3863", TailMethod::set0, 3).passed);
  CHECK(table_error_audit("0.25", TailMethod::setk, 64).passed);
  CHECK(table_error_audit("2", TailMethod::set0, 2).passed);
}

TEST_CASE("rho distance audit matches the closed form exactly") {
  AuditReport rep = rho_distance_audit(Int(97), Int(13));
  CHECK(rep.passed);
  CHECK(rep.document.at("tv_closed_form").get<std::string>() == "42/1261");
  CHECK(rep.document.at("tv_brute").get<std::string>() == "42/1261");
  CHECK(rep.document.at("bound").get<std::string>() == "13/388");

  AuditReport rep2 = rho_distance_audit(Int(97), Int(7));
  CHECK(rep2.passed);
  CHECK(rep2.document.at("tv_closed_form").get<std::string>() == "6/679");

  // s dividing p-1 exactly, and s = 1 (distance zero), both still certify.
  CHECK(rho_distance_audit(Int(97), Int(96)).passed);
  CHECK(rho_distance_audit(Int(97), Int(1)).passed);

  CHECK_THROWS_AS(rho_distance_audit(Int(13), Int(97)), Error);
  CHECK_THROWS_AS(rho_distance_audit(Int(97), Int(0)), Error);
}

TEST_CASE("chi square accepts an honest histogram and flags impossible cells") {
  // Exact masses for db [1,2] at epsilon 1 with the setk table of length 3.
  std::vector<Rat> masses = {make_rat(4, 11), make_rat(4, 11), make_rat(3, 11)};
  std::vector<uint64_t> good = {36400, 36300, 27300}; // 100k draws, near-exact
  ChiSquareOutcome ok = chi_square_against(masses, good, 1e-3);
  CHECK(ok.passed);
  CHECK(!ok.zero_mass_hit);
  CHECK(ok.df == 2);
  CHECK(ok.p_value > 1e-3);

  // Grossly skewed counts must fail the test.
  std::vector<uint64_t> skew = {90000, 5000, 5000};
  ChiSquareOutcome bad = chi_square_against(masses, skew, 1e-3);
  CHECK(!bad.passed);

  // A single observation where the exact mass is zero is a hard failure,
  // regardless of how clean the rest of the histogram looks.
  std::vector<Rat> with_zero = {make_rat(1, 2), make_rat(1, 2), Rat(0)};
  std::vector<uint64_t> hist = {50000, 49999, 1};
  ChiSquareOutcome z = chi_square_against(with_zero, hist, 1e-3);
  CHECK(!z.passed);
  CHECK(z.zero_mass_hit);

  std::vector<uint64_t> clean = {50000, 50000, 0};
  ChiSquareOutcome c = chi_square_against(with_zero, clean, 1e-3);
  CHECK(c.passed);
  CHECK(c.df == 1);
}

TEST_CASE("chi square handles the degenerate single-cell distribution") {
  std::vector<Rat> point = {Rat(1)};
  std::vector<uint64_t> hist = {1000};
  ChiSquareOutcome out = chi_square_against(point, hist, 1e-3);
  CHECK(out.passed);
  CHECK(out.df == 0);
}

TEST_CASE("seeded sampling matches the exact distribution") {
  AuditReport rep = sampling_chisquare_audit(iota_range(0, 2), "1", TailMethod::setk, 3,
                                             {Int(1), Int(2)}, 20000, 1e-3, "chisq-seed");
  CHECK(rep.passed);

  AuditReport rep2 = sampling_chisquare_audit(iota_range(0, 2), "1.3863", TailMethod::set0, 3,
                                              {Int(1), Int(1)}, 20000, 1e-3, "chisq-seed-2");
  CHECK(rep2.passed);

  // Same seed, same histogram: the audit document is reproducible.
  AuditReport again = sampling_chisquare_audit(iota_range(0, 2), "1", TailMethod::setk, 3,
                                               {Int(1), Int(2)}, 20000, 1e-3, "chisq-seed");
  CHECK(again.document == rep.document);
}

TEST_CASE("audit reports carry their name and a one line detail") {
  AuditReport rep = rho_distance_audit(Int(11), Int(4));
  CHECK(rep.name == "rho_distance");
  CHECK(!rep.detail.empty());
  CHECK(rep.detail.find('\n') == std::string::npos);
}
