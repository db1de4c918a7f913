#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zkmedian/params.hpp"

namespace zkmedian {

// Exact-arithmetic certification passes. Every comparison against an
// irrational quantity is decided by an outward-rounded interval; a comparison
// that stays undecided at the precision cap raises errc::audit_precision
// rather than guessing.

struct AuditReport {
  std::string name;
  bool passed = false;
  std::string detail; // one line for console output
  json document;      // full findings
};

// Exhaustive per-record privacy check: every database in range^m against
// every single-position replacement. Positive/positive outcome pairs must
// stay within e^epsilon; positive/zero pairs (set0 only) must stay under the
// additive leakage bound e^(eps/2)*k/T[0].
AuditReport dp_ratio_audit(const std::vector<Int>& range, uint32_t m, const std::string& epsilon,
                           TailMethod method, uint32_t l);

// Accuracy tail: for every database and every integer threshold c in
// [-(l+2), 0], Pr[utility <= c] stays under the analytic envelope; with set0
// the mass at c <= -l must vanish exactly.
AuditReport utility_bound_audit(const std::vector<Int>& range, uint32_t m,
                                const std::string& epsilon, TailMethod method, uint32_t l);

// Table shape: non-increasing entries, floor k at the end, exact floor
// recurrence, and geometric drift |T[i] - T[0]*e^(-eps*i/2)| < a/(a-1).
AuditReport table_error_audit(const std::string& epsilon, TailMethod method, uint32_t l);

// Total-variation distance of (uniform mod p) mod s from uniform on [0, s):
// the brute-force sum must equal z(s-z)/(p*s) with z = p mod s and stay at or
// below s/(4p). Entirely rational, no intervals involved.
AuditReport rho_distance_audit(const Int& p, const Int& s);

struct ChiSquareOutcome {
  bool passed = false;
  bool zero_mass_hit = false;
  uint64_t df = 0;
  double statistic = 0;
  double p_value = 1;
};

// Pearson test of a histogram against exact masses. A single observation in
// a zero-mass cell fails outright; zero-mass cells never enter the statistic.
ChiSquareOutcome chi_square_against(const std::vector<Rat>& masses,
                                    const std::vector<uint64_t>& histogram, double alpha);

// Draws seeded selections from the mechanism's exact distribution for one
// database and chi-square-tests the empirical histogram.
AuditReport sampling_chisquare_audit(const std::vector<Int>& range, const std::string& epsilon,
                                     TailMethod method, uint32_t l, const std::vector<Int>& db,
                                     uint64_t samples, double alpha, const std::string& seed);

} // namespace zkmedian
