#include "zkmedian/reference.hpp"

#include <algorithm>

#include "zkmedian/errors.hpp"

namespace zkmedian {

Int rank_below(const std::vector<Int>& db, const Int& r) {
  Int count = 0;
  for (const auto& x : db)
    if (x < r) ++count;
  return count;
}

std::vector<Int> utilities(const std::vector<Int>& db, const std::vector<Int>& range) {
  if (db.empty()) fail(errc::input_shape, "empty database");
  Int center = Int(db.size() - 1) / 2;
  std::vector<Int> out;
  out.reserve(range.size());
  for (const auto& r : range) {
    Int d = rank_below(db, r) - center;
    out.push_back(abs(d));
  }
  return out;
}

std::vector<Int> calibrate(const std::vector<Int>& utils) {
  if (utils.empty()) fail(errc::input_shape, "empty utility vector");
  Int mn = *std::min_element(utils.begin(), utils.end());
  std::vector<Int> out;
  out.reserve(utils.size());
  for (const auto& u : utils) out.push_back(u - mn);
  return out;
}

WeightSums weights(const std::vector<Int>& calibrated, const LookupTable& table) {
  WeightSums ws;
  ws.expvals.reserve(calibrated.size());
  ws.cumulative.reserve(calibrated.size());
  Int running = 0;
  Int l(table.l());
  for (const auto& c : calibrated) {
    if (c < 0) fail(errc::input_shape, "calibrated utility below zero");
    const Int& w = c < l ? table.entries[c.get_ui()] : table.tail;
    ws.expvals.push_back(w);
    running += w;
    ws.cumulative.push_back(running);
  }
  if (running == 0) fail(errc::degenerate, "all selection weights are zero");
  return ws;
}

Int rho_of(const std::vector<Int>& rands, const Int& p, const Int& s_last) {
  if (rands.empty()) fail(errc::input_shape, "no provider randomness");
  if (s_last <= 0) fail(errc::degenerate, "non-positive weight total");
  Int sum = 0;
  for (const auto& r : rands) sum += r;
  Int reduced;
  mpz_mod(reduced.get_mpz_t(), sum.get_mpz_t(), p.get_mpz_t());
  Int rho;
  mpz_mod(rho.get_mpz_t(), reduced.get_mpz_t(), s_last.get_mpz_t());
  return rho;
}

size_t select_index(const std::vector<Int>& cumulative, const Int& rho) {
  if (cumulative.empty()) fail(errc::input_shape, "empty cumulative vector");
  if (rho < 0 || rho >= cumulative.back())
    fail(errc::domain, "selector outside [0, total)");
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), rho);
  return static_cast<size_t>(it - cumulative.begin());
}

MechanismTrace run_reference(const ProtocolParams& params, const LookupTable& table,
                             const std::vector<Int>& db, const std::vector<Int>& rands) {
  if (db.size() != params.m || rands.size() != params.m)
    fail(errc::input_shape, "database/randomness size differs from m");
  MechanismTrace t;
  t.ranks.reserve(params.n());
  for (const auto& r : params.range) t.ranks.push_back(rank_below(db, r));
  t.utilities = utilities(db, params.range);
  t.calibrated = calibrate(t.utilities);
  WeightSums ws = weights(t.calibrated, table);
  t.expvals = std::move(ws.expvals);
  t.cumulative = std::move(ws.cumulative);
  t.rho = rho_of(rands, params.p, t.cumulative.back());
  t.med_index = select_index(t.cumulative, t.rho);
  t.med = params.range[t.med_index];
  return t;
}

ExactDistribution exact_distribution(const ProtocolParams& params, const LookupTable& table,
                                     const std::vector<Int>& db) {
  WeightSums ws = weights(calibrate(utilities(db, params.range)), table);
  ExactDistribution d;
  d.denominator = ws.cumulative.back();
  d.masses.reserve(ws.expvals.size());
  for (const auto& w : ws.expvals) {
    Rat q(w, d.denominator);
    q.canonicalize();
    d.masses.push_back(std::move(q));
  }
  return d;
}

json trace_to_json(const MechanismTrace& trace) {
  auto list = [](const std::vector<Int>& v) {
    json arr = json::array();
    for (const auto& x : v) arr.push_back(x.get_str());
    return arr;
  };
  json doc;
  doc["calibrated"] = list(trace.calibrated);
  doc["cumulative"] = list(trace.cumulative);
  doc["expvals"] = list(trace.expvals);
  doc["med"] = trace.med.get_str();
  doc["med_index"] = trace.med_index;
  doc["ranks"] = list(trace.ranks);
  doc["rho"] = trace.rho.get_str();
  doc["utilities"] = list(trace.utilities);
  return doc;
}

} // namespace zkmedian
