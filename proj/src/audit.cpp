#include "zkmedian/audit.hpp"

#include <algorithm>
#include <functional>

#include <boost/math/distributions/chi_squared.hpp>
#include <gmpxx.h>

#include "zkmedian/digest.hpp"
#include "zkmedian/errors.hpp"
#include "zkmedian/realnum.hpp"
#include "zkmedian/reference.hpp"

namespace zkmedian {

namespace {

constexpr mpfr_prec_t kPrecFloor = 160;
constexpr mpfr_prec_t kPrecCap = mpfr_prec_t(1) << 20;

mpfr_prec_t prec_for(const Rat& x) {
  size_t bits = mpz_sizeinbase(x.get_num().get_mpz_t(), 2) +
                mpz_sizeinbase(x.get_den().get_mpz_t(), 2);
  return std::max<mpfr_prec_t>(kPrecFloor, mpfr_prec_t(bits) + 96);
}

// Runs the comparison at increasing precision until the interval decides it.
bool resolve(mpfr_prec_t start, const std::function<std::optional<bool>(mpfr_prec_t)>& decide) {
  for (mpfr_prec_t prec = start; prec <= kPrecCap; prec *= 2) {
    std::optional<bool> r = decide(prec);
    if (r.has_value()) return *r;
  }
  fail(errc::audit_precision, "comparison undecided at precision cap");
}

// q <= e^exponent, certified.
bool le_exp_certified(const Rat& q, const Rat& exponent) {
  return resolve(prec_for(q), [&](mpfr_prec_t prec) {
    return Interval::exp_rat(exponent, prec).le_certain(q);
  });
}

double rat_to_double(const Rat& q) { return mpq_get_d(q.get_mpq_t()); }

Rat make_rat(const Int& num, const Int& den) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

std::string rat_str(const Rat& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Advances db through range^m in odometer order; false once wrapped.
bool next_db(std::vector<size_t>& idx, size_t n) {
  for (size_t pos = 0; pos < idx.size(); ++pos) {
    if (++idx[pos] < n) return true;
    idx[pos] = 0;
  }
  return false;
}

std::vector<Int> db_of(const std::vector<size_t>& idx, const std::vector<Int>& range) {
  std::vector<Int> db;
  db.reserve(idx.size());
  for (size_t i : idx) db.push_back(range[i]);
  return db;
}

} // namespace

AuditReport dp_ratio_audit(const std::vector<Int>& range, uint32_t m, const std::string& epsilon,
                           TailMethod method, uint32_t l) {
  if (range.empty() || m == 0) fail(errc::parameter, "audit needs a range and m >= 1");
  LookupTable table = build_table(epsilon, l, method);
  Rat eps = rat_from_decimal(epsilon);
  Rat half_eps = eps / 2;
  const Int& t0 = table.entries.front();

  uint64_t pairs = 0, ratio_checks = 0, gap_checks = 0, zero_pairs = 0;
  Rat max_ratio(0), max_gap(0);
  json worst_pair;
  json violations = json::array();
  auto db_json = [](const std::vector<Int>& db) {
    json arr = json::array();
    for (const auto& x : db) arr.push_back(x.get_str());
    return arr;
  };

  std::vector<size_t> idx(m, 0);
  const size_t n = range.size();
  do {
    std::vector<Int> db = db_of(idx, range);
    WeightSums w1 = weights(calibrate(utilities(db, range)), table);
    const Int& total1 = w1.cumulative.back();
    for (uint32_t pos = 0; pos < m; ++pos) {
      for (size_t rep = 0; rep < n; ++rep) {
        if (rep == idx[pos]) continue;
        std::vector<Int> db2 = db;
        db2[pos] = range[rep];
        WeightSums w2 = weights(calibrate(utilities(db2, range)), table);
        const Int& total2 = w2.cumulative.back();
        ++pairs;
        for (size_t j = 0; j < n; ++j) {
          const Int& e1 = w1.expvals[j];
          const Int& e2 = w2.expvals[j];
          if (e1 > 0 && e2 > 0) {
            ++ratio_checks;
            Rat q(e1 * total2, e2 * total1);
            q.canonicalize();
            if (q > max_ratio) {
              max_ratio = q;
              worst_pair = json{{"db", db_json(db)},
                                {"db2", db_json(db2)},
                                {"element", range[j].get_str()}};
            }
            if (!le_exp_certified(q, eps)) {
              json v;
              v["kind"] = "ratio";
              v["outcome"] = range[j].get_str();
              v["ratio"] = rat_str(q);
              violations.push_back(std::move(v));
            }
          } else if (e1 > 0) {
            // The replaced database zeroes this outcome; only set0 can get
            // here, and the surviving mass must stay under the leakage bound.
            ++gap_checks;
            if (method != TailMethod::set0) {
              json v;
              v["kind"] = "unexpected_zero_weight";
              v["outcome"] = range[j].get_str();
              violations.push_back(std::move(v));
              continue;
            }
            Rat mass(e1, total1);
            mass.canonicalize();
            if (mass > max_gap) max_gap = mass;
            Rat k_over_t0 = make_rat(table.k, t0);
            bool ok = resolve(prec_for(mass), [&](mpfr_prec_t prec) {
              Interval delta = mul(Interval::exp_rat(half_eps, prec),
                                   Interval::from_rat(k_over_t0, prec));
              return delta.le_certain(mass);
            });
            if (!ok) {
              json v;
              v["kind"] = "gap";
              v["outcome"] = range[j].get_str();
              v["mass"] = rat_str(mass);
              violations.push_back(std::move(v));
            }
          } else if (e2 > 0) {
            // Covered when the enumeration reaches (db2, db).
          } else {
            ++zero_pairs;
          }
        }
      }
    }
  } while (next_db(idx, n));

  AuditReport rep;
  rep.name = "dp_ratio";
  rep.passed = violations.empty();
  json doc;
  doc["epsilon"] = epsilon;
  doc["method"] = method_name(method);
  doc["l"] = l;
  doc["m"] = m;
  doc["n"] = n;
  doc["pairs"] = pairs;
  doc["ratio_checks"] = ratio_checks;
  doc["gap_checks"] = gap_checks;
  doc["zero_outcome_pairs"] = zero_pairs;
  doc["max_ratio"] = rat_str(max_ratio);
  doc["worst_pair"] = worst_pair.is_null() ? json(nullptr) : worst_pair;
  doc["additive_gap"] = rat_str(max_gap);
  {
    // Enclosure of the leakage bound e^(eps/2) * k / T[0] for the report.
    Interval delta = mul(Interval::exp_rat(half_eps, kPrecFloor),
                         Interval::from_rat(make_rat(table.k, t0), kPrecFloor));
    doc["delta_bound"] = delta.str(8);
  }
  doc["violations"] = std::move(violations);
  rep.document = std::move(doc);
  rep.detail = "eps=" + epsilon + " " + method_name(method) + " m=" + std::to_string(m) + ": " +
               std::to_string(ratio_checks) + " ratio and " + std::to_string(gap_checks) +
               " gap checks, max ratio " + rat_str(max_ratio);
  return rep;
}

AuditReport utility_bound_audit(const std::vector<Int>& range, uint32_t m,
                                const std::string& epsilon, TailMethod method, uint32_t l) {
  if (range.empty() || m == 0) fail(errc::parameter, "audit needs a range and m >= 1");
  LookupTable table = build_table(epsilon, l, method);
  Rat eps = rat_from_decimal(epsilon);
  Rat half_eps = eps / 2;
  const Int& t0 = table.entries.front();
  const Int big_r(range.size());

  uint64_t databases = 0, thresholds = 0, zero_cases = 0;
  json violations = json::array();

  std::vector<size_t> idx(m, 0);
  const size_t n = range.size();
  do {
    std::vector<Int> db = db_of(idx, range);
    std::vector<Int> dists = utilities(db, range);
    Int opt_dist = *std::min_element(dists.begin(), dists.end());
    Int r_opt = 0;
    for (const auto& d : dists)
      if (d == opt_dist) ++r_opt;
    WeightSums w = weights(calibrate(dists), table);
    const Int& total = w.cumulative.back();
    ++databases;

    // c is measured relative to the optimum: Pr[u <= OPT + c] with
    // u = -distance, so the event is distance >= min_distance - c.
    for (int64_t c = -int64_t(l) - 2; c <= 0; ++c) {
      ++thresholds;
      Int need = opt_dist - Int(c);
      Int num = 0;
      for (size_t j = 0; j < n; ++j)
        if (dists[j] >= need) num += w.expvals[j];
      Rat prob(num, total);
      prob.canonicalize();

      if (method == TailMethod::set0 && c <= -int64_t(l)) {
        ++zero_cases;
        if (prob != 0) {
          json v;
          v["kind"] = "nonzero_truncated_tail";
          v["c"] = c;
          v["prob"] = rat_str(prob);
          violations.push_back(std::move(v));
        }
        continue;
      }

      Rat shift = eps * Rat(Int(c)) / 2; // exponent eps*c/2, c already OPT-relative
      Rat spread = make_rat(big_r, r_opt);
      bool ok = resolve(prec_for(prob), [&](mpfr_prec_t prec) -> std::optional<bool> {
        Interval a = Interval::exp_rat(half_eps, prec);
        Interval denom = sub(a, Interval::from_rat(Rat(1), prec));
        if (!denom.strictly_positive()) return std::nullopt;
        Interval term2 = div(a, denom.mul_int(t0));
        Interval term1 = Interval::exp_rat(shift, prec);
        Interval bound = mul(Interval::from_rat(spread, prec), add(term1, term2));
        return bound.le_certain(prob);
      });
      if (!ok) {
        json v;
        v["kind"] = "tail_bound_exceeded";
        v["c"] = c;
        v["prob"] = rat_str(prob);
        violations.push_back(std::move(v));
      }
    }
  } while (next_db(idx, n));

  AuditReport rep;
  rep.name = "utility_bound";
  rep.passed = violations.empty();
  json doc;
  doc["epsilon"] = epsilon;
  doc["method"] = method_name(method);
  doc["l"] = l;
  doc["m"] = m;
  doc["n"] = n;
  doc["databases"] = databases;
  doc["thresholds"] = thresholds;
  doc["exact_zero_cases"] = zero_cases;
  doc["violations"] = std::move(violations);
  rep.document = std::move(doc);
  rep.detail = "eps=" + epsilon + " " + method_name(method) + " m=" + std::to_string(m) + ": " +
               std::to_string(thresholds) + " thresholds over " + std::to_string(databases) +
               " databases, " + std::to_string(zero_cases) + " exact-zero cases";
  return rep;
}

AuditReport table_error_audit(const std::string& epsilon, TailMethod method, uint32_t l) {
  LookupTable table = build_table(epsilon, l, method);
  Rat eps = rat_from_decimal(epsilon);
  Rat half_eps = eps / 2;
  const Int& t0 = table.entries.front();
  json violations = json::array();

  if (table.entries.back() != table.k) {
    json v;
    v["kind"] = "floor_mismatch";
    violations.push_back(std::move(v));
  }
  for (uint32_t i = 0; i + 1 < l; ++i) {
    if (table.entries[i] < table.entries[i + 1]) {
      json v;
      v["kind"] = "not_nonincreasing";
      v["i"] = i;
      violations.push_back(std::move(v));
    }
  }

  // Certified real checks in one precision pass over the whole table: the
  // exponential is evaluated once per pass and the ideal geometric sequence
  // T[0] a^(-i) advances by interval division, keeping the per-entry cost
  // flat. Any indeterminate comparison restarts the pass at doubled
  // precision. The start scales with T[0] because the drift difference
  // cancels almost completely.
  mpfr_prec_t prec = std::max<mpfr_prec_t>(
      kPrecFloor, mpfr_prec_t(mpz_sizeinbase(t0.get_mpz_t(), 2)) + 96);
  std::string max_drift_str = "0";
  for (;; prec *= 2) {
    if (prec > kPrecCap) fail(errc::audit_precision, "table audit undecided at precision cap");
    json real_viol = json::array();
    bool indeterminate = false;
    Interval a = Interval::exp_rat(half_eps, prec);
    Interval denom = sub(a, Interval::from_rat(Rat(1), prec));
    if (!denom.strictly_positive()) continue;
    Interval bound = div(a, denom);
    Interval ideal = Interval::from_int(t0, prec);
    for (uint32_t i = 0; i < l; ++i) {
      if (i + 1 < l) {
        // Exact floor recurrence: T[i] <= a*T[i+1] < T[i] + 1.
        const Int& ti = table.entries[i];
        Interval prod = a.mul_int(table.entries[i + 1]);
        auto lower = prod.le_certain(Rat(ti));
        auto upper = prod.le_certain(Rat(ti + 1));
        if (!lower.has_value() || !upper.has_value()) {
          indeterminate = true;
          break;
        }
        if (!*lower || *upper) {
          json v;
          v["kind"] = "floor_recurrence_broken";
          v["i"] = i;
          real_viol.push_back(std::move(v));
        }
      }
      // Geometric drift: |T[i] - T[0] a^(-i)| < a/(a-1).
      Interval drift = sub(Interval::from_int(table.entries[i], prec), ideal).abs();
      auto ok = certified_lt(drift, bound);
      if (!ok.has_value()) {
        indeterminate = true;
        break;
      }
      if (i + 1 == l) max_drift_str = drift.str(8); // drift grows toward the tail
      if (!*ok) {
        json v;
        v["kind"] = "drift_bound_exceeded";
        v["i"] = i;
        v["drift"] = drift.str(8);
        real_viol.push_back(std::move(v));
      }
      ideal = div(ideal, a);
    }
    if (!indeterminate) {
      for (auto& v : real_viol) violations.push_back(std::move(v));
      break;
    }
  }

  AuditReport rep;
  rep.name = "table_error";
  rep.passed = violations.empty();
  json doc;
  doc["epsilon"] = epsilon;
  doc["method"] = method_name(method);
  doc["l"] = l;
  doc["k"] = table.k.get_str();
  doc["t0"] = t0.get_str();
  doc["last_drift"] = max_drift_str;
  doc["violations"] = std::move(violations);
  rep.document = std::move(doc);
  rep.detail = "eps=" + epsilon + " l=" + std::to_string(l) + ": k=" + table.k.get_str() +
               ", T[0]=" + t0.get_str() + ", last drift " + max_drift_str;
  return rep;
}

AuditReport rho_distance_audit(const Int& p, const Int& s) {
  if (s < 1 || s > p) fail(errc::parameter, "need 1 <= s <= p");
  Int z;
  mpz_mod(z.get_mpz_t(), p.get_mpz_t(), s.get_mpz_t());

  Rat closed = make_rat(z * (s - z), p * s);

  // Residue r is hit by floor((p-1-r)/s) + 1 of the p uniform values.
  Rat brute(0);
  Rat ideal = make_rat(1, s);
  for (Int r = 0; r < s; ++r) {
    Int count = (p - 1 - r) / s + 1;
    Rat term = make_rat(count, p) - ideal;
    if (term < 0) term = -term;
    brute += term;
  }
  brute /= 2;
  brute.canonicalize();

  Rat bound = make_rat(s, 4 * p);

  bool matches = brute == closed;
  bool under = closed <= bound;

  AuditReport rep;
  rep.name = "rho_distance";
  rep.passed = matches && under;
  json doc;
  doc["p"] = p.get_str();
  doc["s"] = s.get_str();
  doc["z"] = z.get_str();
  doc["tv_closed_form"] = rat_str(closed);
  doc["tv_brute"] = rat_str(brute);
  doc["bound"] = rat_str(bound);
  doc["matches_closed_form"] = matches;
  doc["within_bound"] = under;
  rep.document = std::move(doc);
  rep.detail = "p=" + p.get_str() + " s=" + s.get_str() + ": tv=" + rat_str(closed) +
               " bound=" + rat_str(bound);
  return rep;
}

ChiSquareOutcome chi_square_against(const std::vector<Rat>& masses,
                                    const std::vector<uint64_t>& histogram, double alpha) {
  if (masses.size() != histogram.size())
    fail(errc::input_shape, "histogram size differs from mass vector");
  ChiSquareOutcome out;
  uint64_t total = 0;
  for (uint64_t h : histogram) total += h;
  if (total == 0) fail(errc::input_shape, "empty histogram");

  uint64_t positive_cells = 0;
  for (size_t j = 0; j < masses.size(); ++j) {
    if (masses[j] == 0) {
      if (histogram[j] > 0) {
        out.zero_mass_hit = true;
        out.passed = false;
        out.p_value = 0;
        return out;
      }
      continue;
    }
    ++positive_cells;
    double expected = rat_to_double(masses[j]) * double(total);
    double diff = double(histogram[j]) - expected;
    out.statistic += diff * diff / expected;
  }
  out.df = positive_cells - 1;
  if (out.df == 0) {
    out.p_value = 1;
    out.passed = true;
    return out;
  }
  boost::math::chi_squared dist(double(out.df));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  out.passed = out.p_value >= alpha;
  return out;
}

AuditReport sampling_chisquare_audit(const std::vector<Int>& range, const std::string& epsilon,
                                     TailMethod method, uint32_t l, const std::vector<Int>& db,
                                     uint64_t samples, double alpha, const std::string& seed) {
  if (samples == 0) fail(errc::parameter, "need at least one sample");
  LookupTable table = build_table(epsilon, l, method);
  std::vector<Int> dists = utilities(db, range);
  WeightSums w = weights(calibrate(dists), table);
  const Int& total = w.cumulative.back();

  std::vector<Rat> masses;
  masses.reserve(w.expvals.size());
  for (const auto& e : w.expvals) {
    Rat q(e, total);
    q.canonicalize();
    masses.push_back(std::move(q));
  }

  gmp_randclass rng(gmp_randinit_mt);
  Int rng_seed;
  auto seed_bytes = sha256("chisq|" + seed);
  mpz_import(rng_seed.get_mpz_t(), seed_bytes.size(), 1, 1, 0, 0, seed_bytes.data());
  rng.seed(rng_seed);

  std::vector<uint64_t> hist(range.size(), 0);
  for (uint64_t i = 0; i < samples; ++i) {
    Int rho = rng.get_z_range(total);
    hist[select_index(w.cumulative, rho)] += 1;
  }

  ChiSquareOutcome cs = chi_square_against(masses, hist, alpha);

  AuditReport rep;
  rep.name = "sampling_chisquare";
  rep.passed = cs.passed;
  json doc;
  doc["epsilon"] = epsilon;
  doc["method"] = method_name(method);
  doc["l"] = l;
  doc["samples"] = samples;
  doc["alpha"] = alpha;
  doc["seed"] = seed;
  doc["statistic"] = cs.statistic;
  doc["df"] = cs.df;
  doc["p_value"] = cs.p_value;
  doc["zero_mass_hit"] = cs.zero_mass_hit;
  json hj = json::array();
  for (uint64_t hcount : hist) hj.push_back(hcount);
  doc["histogram"] = std::move(hj);
  json mj = json::array();
  for (const auto& q : masses) mj.push_back(rat_str(q));
  doc["masses"] = std::move(mj);
  rep.document = std::move(doc);
  rep.detail = "chi2=" + std::to_string(cs.statistic) + " df=" + std::to_string(cs.df) +
               " p=" + std::to_string(cs.p_value) + " over " + std::to_string(samples) +
               " samples";
  return rep;
}

} // namespace zkmedian
