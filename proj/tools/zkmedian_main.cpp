#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "zkmedian/audit.hpp"
#include "zkmedian/backend.hpp"
#include "zkmedian/board.hpp"
#include "zkmedian/board_net.hpp"
#include "zkmedian/circuit.hpp"
#include "zkmedian/digest.hpp"
#include "zkmedian/errors.hpp"
#include "zkmedian/protocol.hpp"
#include "zkmedian/realnum.hpp"
#include "zkmedian/reference.hpp"

using namespace zkmedian;

namespace {

// Exit codes: 0 accept/pass, 1 reject/fail, 2 bad parameters or usage,
// 3 incomplete board, 4 transport failure, 5 internal error.
enum ExitCode { kOk = 0, kReject = 1, kUsage = 2, kIncomplete = 3, kTransport = 4, kInternal = 5 };

int code_for(const Error& e) {
  switch (e.kind()) {
    case errc::parameter:
    case errc::input_shape:
    case errc::serialization:
      return kUsage;
    case errc::incomplete_board:
      return kIncomplete;
    case errc::transport:
      return kTransport;
    default:
      return kInternal;
  }
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) fail(errc::parameter, "cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const void* data, size_t len) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) fail(errc::parameter, "cannot write " + path);
  out.write(static_cast<const char*>(data), std::streamsize(len));
  if (!out.good()) fail(errc::parameter, "short write to " + path);
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, text.data(), text.size());
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "A:B", "a,b,c", or "@file" holding comma/newline separated values.
std::vector<Int> load_range(const std::string& spec) {
  if (!spec.empty() && spec[0] == '@') {
    auto bytes = read_file(spec.substr(1));
    std::string text(bytes.begin(), bytes.end());
    for (char& c : text)
      if (c == '\n' || c == '\r' || c == ' ' || c == '\t') c = ',';
    std::string joined;
    for (const auto& part : split_list(text, ',')) joined += (joined.empty() ? "" : ",") + part;
    return parse_range_spec(joined);
  }
  return parse_range_spec(spec);
}

// Shared parameter flags. Small-profile defaults: a 61-bit Mersenne modulus
// and 16-bit comparators keep witness generation fast; pass --params for a
// document produced elsewhere (the 254-bit profile included).
struct ParamFlags {
  std::string epsilon = "1";
  std::string range_spec = "0:9";
  uint32_t m = 0;
  std::string method = "setk";
  uint32_t l = 8;
  uint32_t bit_width = 16;
  std::string prime;
  std::string hash_id = "poseidon-x5-w3-r8";
  std::string params_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--params", params_file, "params JSON file; overrides individual flags");
    cmd->add_option("--epsilon", epsilon, "privacy budget as a decimal string");
    cmd->add_option("--range", range_spec, "candidate outputs: A:B, a,b,c, or @file");
    cmd->add_option("--m", m, "number of providers");
    cmd->add_option("--method", method, "tail method: set0 | setk");
    cmd->add_option("--l", l, "lookup table length");
    cmd->add_option("--bit-width", bit_width, "comparator width in bits");
    cmd->add_option("--prime", prime, "field modulus (decimal); default 2^61-1");
    cmd->add_option("--hash", hash_id, "commitment hash id");
  }

  ProtocolParams build() const {
    if (!params_file.empty()) {
      auto bytes = read_file(params_file);
      json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
      if (doc.is_discarded()) fail(errc::serialization, "malformed params file");
      return params_from_json(doc);
    }
    ProtocolParams p;
    p.epsilon = epsilon;
    p.method = method_from_name(method);
    p.l = l;
    p.range = load_range(range_spec);
    p.m = m;
    p.bit_width = bit_width;
    p.hash_id = hash_id;
    p.p = prime.empty() ? Int((Int(1) << 61) - 1) : int_from_decimal(prime);
    return p;
  }
};

LookupTable table_for(const ProtocolParams& p) { return build_table(p.epsilon, p.l, p.method); }

int report_audit(const AuditReport& rep, const std::string& json_out) {
  if (!json_out.empty()) write_text(json_out, rep.document.dump(2) + "\n");
  std::cout << (rep.passed ? "[PASS] " : "[FAIL] ") << rep.name << ": " << rep.detail << "\n";
  return rep.passed ? kOk : kReject;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"verifiable exponential-mechanism median over committed inputs"};
  app.require_subcommand(1);

  // ---- table ----
  auto* c_table = app.add_subcommand("table", "build and print a weight table");
  std::string t_eps = "1", t_method = "setk", t_json;
  uint32_t t_l = 128;
  c_table->add_option("--epsilon", t_eps, "privacy budget decimal")->required();
  c_table->add_option("--l", t_l, "table length");
  c_table->add_option("--method", t_method, "set0 | setk");
  c_table->add_option("--json", t_json, "write the table document here");

  // ---- params ----
  auto* c_params = app.add_subcommand("params", "validate parameters and print the document");
  ParamFlags p_params;
  p_params.attach(c_params);
  std::string params_out;
  c_params->add_option("--out", params_out, "write the params JSON here");

  // ---- pipeline ----
  auto* c_pipe = app.add_subcommand("pipeline", "run providers, analyst and verifier end to end");
  ParamFlags p_pipe;
  p_pipe.attach(c_pipe);
  std::string pipe_seed = "0", pipe_tamper = "none", pipe_board = "memory", pipe_transcript;
  uint32_t pipe_lambda = 96;
  c_pipe->add_option("--seed", pipe_seed, "deterministic run seed");
  c_pipe->add_option("--tamper", pipe_tamper,
                     "none | input | rand | med | commitment | range (fault injection)");
  c_pipe->add_option("--board", pipe_board, "memory | file:PATH | tcp:HOST:PORT")
      ->envname("ZKMEDIAN_BOARD");
  c_pipe->add_option("--lambda", pipe_lambda, "backend security parameter");
  c_pipe->add_option("--transcript", pipe_transcript, "write the run transcript here");

  // ---- bench ----
  auto* c_bench = app.add_subcommand("bench", "time witness/prove/verify across provider counts");
  ParamFlags p_bench;
  p_bench.attach(c_bench);
  std::string bench_ms = "10,50,100", bench_seed = "0";
  uint32_t bench_reps = 1;
  c_bench->add_option("--m-list", bench_ms, "provider counts, comma separated");
  c_bench->add_option("--reps", bench_reps, "repetitions per count");
  c_bench->add_option("--seed", bench_seed);

  // ---- audit ----
  auto* c_audit = app.add_subcommand("audit", "exact-arithmetic certification passes");
  c_audit->require_subcommand(1);
  std::string audit_json;
  c_audit->add_option("--json", audit_json, "write the audit document here");

  auto* a_dp = c_audit->add_subcommand("dp", "exhaustive per-record privacy ratios");
  ParamFlags p_dp;
  p_dp.attach(a_dp);

  auto* a_util = c_audit->add_subcommand("utility", "accuracy tail bounds");
  ParamFlags p_util;
  p_util.attach(a_util);

  auto* a_table = c_audit->add_subcommand("table", "table construction invariants");
  std::string at_eps = "1", at_method = "setk";
  uint32_t at_l = 128;
  a_table->add_option("--epsilon", at_eps)->required();
  a_table->add_option("--l", at_l);
  a_table->add_option("--method", at_method);

  auto* a_rho = c_audit->add_subcommand("rho", "selector uniformity distance");
  std::string ar_p, ar_s;
  a_rho->add_option("--p", ar_p, "modulus")->required();
  a_rho->add_option("--s", ar_s, "weight total")->required();

  auto* a_chi = c_audit->add_subcommand("chisq", "sampled distribution vs exact masses");
  ParamFlags p_chi;
  p_chi.attach(a_chi);
  std::string chi_db, chi_seed = "0";
  uint64_t chi_samples = 100000;
  double chi_alpha = 0.001;
  a_chi->add_option("--db", chi_db, "database values, comma separated")->required();
  a_chi->add_option("--samples", chi_samples);
  a_chi->add_option("--alpha", chi_alpha);
  a_chi->add_option("--seed", chi_seed);

  // ---- board-serve ----
  auto* c_serve = app.add_subcommand("board-serve", "serve a board over TCP");
  std::string serve_backing = "memory";
  uint32_t serve_port = 0;
  c_serve->add_option("--backing", serve_backing, "memory | file:PATH");
  c_serve->add_option("--port", serve_port, "TCP port; 0 picks an ephemeral one");

  // ---- setup ----
  auto* c_setup = app.add_subcommand("setup", "synthesize the circuit and produce key material");
  ParamFlags p_setup;
  p_setup.attach(c_setup);
  std::string setup_seed = "0", setup_out = "keys.bin", setup_backend = "mock";
  uint32_t setup_lambda = 96;
  c_setup->add_option("--seed", setup_seed);
  c_setup->add_option("--lambda", setup_lambda);
  c_setup->add_option("--backend", setup_backend);
  c_setup->add_option("--out", setup_out, "key material file");

  // ---- commit ----
  auto* c_commit = app.add_subcommand("commit", "post one provider commitment");
  ParamFlags p_commit;
  p_commit.attach(c_commit);
  uint32_t commit_index = 0;
  std::string commit_x, commit_r, commit_seed, commit_board = "memory", commit_secret;
  c_commit->add_option("--index", commit_index, "provider index")->required();
  c_commit->add_option("--x", commit_x, "input value (decimal)")->required();
  c_commit->add_option("--r", commit_r, "commitment randomness; derived from --seed if absent");
  c_commit->add_option("--seed", commit_seed, "seed for deriving randomness");
  c_commit->add_option("--board", commit_board, "board URI")->envname("ZKMEDIAN_BOARD");
  c_commit->add_option("--secret-out", commit_secret,
                       "file for the provider's private (x, r) record");

  // ---- prove ----
  auto* c_prove = app.add_subcommand("prove", "generate the witness and post result and proof");
  ParamFlags p_prove;
  p_prove.attach(c_prove);
  std::string prove_keys = "keys.bin", prove_board = "memory";
  std::vector<std::string> prove_secrets;
  c_prove->add_option("--keys", prove_keys, "key material file");
  c_prove->add_option("--board", prove_board, "board URI")->envname("ZKMEDIAN_BOARD");
  c_prove->add_option("--secrets", prove_secrets, "provider secret files")->required();

  // ---- verify ----
  auto* c_verify = app.add_subcommand("verify", "check the board against the verifying key");
  ParamFlags p_verify;
  p_verify.attach(c_verify);
  std::string verify_keys = "keys.bin", verify_board_uri = "memory";
  c_verify->add_option("--keys", verify_keys, "key material file");
  c_verify->add_option("--board", verify_board_uri, "board URI")->envname("ZKMEDIAN_BOARD");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*c_table) {
      LookupTable t = build_table(t_eps, t_l, method_from_name(t_method));
      json doc = table_to_json(t);
      if (!t_json.empty()) write_text(t_json, doc.dump(2) + "\n");
      std::cout << doc.dump(2) << "\n";
      return kOk;
    }

    if (*c_params) {
      ProtocolParams params = p_params.build();
      LookupTable t = table_for(params);
      auto violations = validate_params(params, t);
      if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
        return kUsage;
      }
      json doc = params_to_json(params);
      if (!params_out.empty()) write_text(params_out, doc.dump(2) + "\n");
      std::cout << doc.dump(2) << "\n";
      std::cout << "params digest: " << params_digest(params) << "\n";
      return kOk;
    }

    if (*c_pipe) {
      ProtocolParams params = p_pipe.build();
      LookupTable t = table_for(params);
      auto backend = make_backend("mock");
      auto board = open_board(pipe_board);
      PipelineResult res = run_pipeline(params, t, *backend, pipe_lambda, pipe_seed, *board,
                                        tamper_from_name(pipe_tamper));
      if (!pipe_transcript.empty()) write_text(pipe_transcript, res.transcript + "\n");
      std::cout << "verdict: " << (res.accepted ? "accept" : "reject") << " (" << res.reason
                << ")\n";
      std::cout << "median: " << res.posted_med.get_str() << "\n";
      std::cout << "constraints: " << res.num_constraints << "\n";
      std::cout << "t_witness_ms: " << res.t_witness_ms << "\n";
      std::cout << "t_prove_ms: " << res.t_prove_ms << "\n";
      std::cout << "t_verify_ms: " << res.t_verify_ms << "\n";
      return res.accepted ? kOk : kReject;
    }

    if (*c_bench) {
      auto backend = make_backend("mock");
      std::cout << "m\tconstraints\tt_witness_ms\tt_prove_ms\tt_verify_ms\n";
      for (const auto& ms : split_list(bench_ms, ',')) {
        ParamFlags flags = p_bench;
        flags.m = uint32_t(std::stoul(ms));
        ProtocolParams params = flags.build();
        LookupTable t = table_for(params);
        double tw = 0, tp = 0, tv = 0;
        uint64_t nc = 0;
        for (uint32_t rep = 0; rep < bench_reps; ++rep) {
          MemoryBoard board;
          PipelineResult res = run_pipeline(params, t, *backend, 96,
                                            bench_seed + "-" + std::to_string(rep), board,
                                            TamperClass::none);
          if (!res.accepted) fail(errc::degenerate, "benchmark run rejected unexpectedly");
          tw += res.t_witness_ms;
          tp += res.t_prove_ms;
          tv += res.t_verify_ms;
          nc = res.num_constraints;
        }
        std::cout << ms << "\t" << nc << "\t" << tw / bench_reps << "\t" << tp / bench_reps
                  << "\t" << tv / bench_reps << "\n";
      }
      return kOk;
    }

    if (*a_dp) {
      ProtocolParams params = p_dp.build();
      return report_audit(
          dp_ratio_audit(params.range, params.m, params.epsilon, params.method, params.l),
          audit_json);
    }
    if (*a_util) {
      ProtocolParams params = p_util.build();
      return report_audit(
          utility_bound_audit(params.range, params.m, params.epsilon, params.method, params.l),
          audit_json);
    }
    if (*a_table) {
      return report_audit(table_error_audit(at_eps, method_from_name(at_method), at_l),
                          audit_json);
    }
    if (*a_rho) {
      return report_audit(rho_distance_audit(int_from_decimal(ar_p), int_from_decimal(ar_s)),
                          audit_json);
    }
    if (*a_chi) {
      ProtocolParams params = p_chi.build();
      std::vector<Int> db;
      for (const auto& part : split_list(chi_db, ',')) db.push_back(int_from_decimal(part));
      return report_audit(sampling_chisquare_audit(params.range, params.epsilon, params.method,
                                                   params.l, db, chi_samples, chi_alpha,
                                                   chi_seed),
                          audit_json);
    }

    if (*c_serve) {
      std::unique_ptr<Board> backing = open_board(serve_backing);
      BoardServer server(*backing, uint16_t(serve_port));
      std::cout << "board listening on 127.0.0.1:" << server.port() << std::endl;
      server.run(); // runs until the process is signalled
      return kOk;
    }

    if (*c_setup) {
      ProtocolParams params = p_setup.build();
      LookupTable t = table_for(params);
      auto h = hash_instance(params.hash_id, params.p);
      ConstraintSystem cs = synthesize_main(params, t, *h);
      auto backend = make_backend(setup_backend);
      KeyMaterial km = backend->setup(cs, setup_lambda, setup_seed);
      auto bytes = serialize_keys(km);
      write_file(setup_out, bytes.data(), bytes.size());
      std::cout << "constraints: " << cs.constraints.size() << "\n";
      std::cout << "wires: " << cs.num_wires << "\n";
      std::cout << "keys: " << setup_out << "\n";
      return kOk;
    }

    if (*c_commit) {
      ProtocolParams params = p_commit.build();
      if (params.m != 0 && commit_index >= params.m)
        fail(errc::parameter, "provider index exceeds m");
      Int x = int_from_decimal(commit_x);
      if (bit_length(x) > params.bit_width)
        fail(errc::parameter, "input value exceeds the comparator bit width");
      Int r;
      if (!commit_r.empty()) {
        r = int_from_decimal(commit_r);
      } else if (!commit_seed.empty()) {
        gmp_randclass rng(gmp_randinit_mt);
        Int rng_seed;
        auto seed_bytes = sha256("commit|" + commit_seed + "|" + std::to_string(commit_index));
        mpz_import(rng_seed.get_mpz_t(), seed_bytes.size(), 1, 1, 0, 0, seed_bytes.data());
        rng.seed(rng_seed);
        r = rng.get_z_range(params.p);
      } else {
        fail(errc::parameter, "need --r or --seed for commitment randomness");
      }
      auto h = hash_instance(params.hash_id, params.p);
      auto board = open_board(commit_board);
      Int com = provider_commit(*board, *h, commit_index, x, r);
      if (!commit_secret.empty()) {
        json sec;
        sec["index"] = commit_index;
        sec["x"] = x.get_str();
        sec["r"] = r.get_str();
        write_text(commit_secret, sec.dump(2) + "\n");
      }
      std::cout << "commitment: " << com.get_str() << "\n";
      return kOk;
    }

    if (*c_prove) {
      ProtocolParams params = p_prove.build();
      LookupTable t = table_for(params);
      auto h = hash_instance(params.hash_id, params.p);
      KeyMaterial km = deserialize_keys(read_file(prove_keys));
      auto backend = make_backend(km.backend_id);
      std::vector<Int> inputs(params.m), rands(params.m);
      std::vector<bool> seen(params.m, false);
      for (const auto& path : prove_secrets) {
        auto bytes = read_file(path);
        json sec = json::parse(bytes.begin(), bytes.end(), nullptr, false);
        if (sec.is_discarded()) fail(errc::serialization, "malformed secret file " + path);
        uint32_t idx = sec.at("index").get<uint32_t>();
        if (idx >= params.m) fail(errc::parameter, "secret file index exceeds m");
        if (seen[idx])
          fail(errc::parameter, "duplicate secret for provider " + std::to_string(idx));
        seen[idx] = true;
        inputs[idx] = int_from_decimal(sec.at("x").get<std::string>());
        rands[idx] = int_from_decimal(sec.at("r").get<std::string>());
      }
      for (uint32_t i = 0; i < params.m; ++i)
        if (!seen[i]) fail(errc::parameter, "missing secret for provider " + std::to_string(i));
      auto board = open_board(prove_board);
      AnalystOutput out = analyst_prove(*board, params, t, *h, *backend, km, inputs, rands);
      std::cout << "median: " << out.med.get_str() << "\n";
      return kOk;
    }

    if (*c_verify) {
      ProtocolParams params = p_verify.build();
      KeyMaterial km = deserialize_keys(read_file(verify_keys));
      auto backend = make_backend(km.backend_id);
      auto board = open_board(verify_board_uri);
      VerifyReport rep = verify_board(*board, params, *backend, km);
      std::cout << "verdict: " << (rep.accepted ? "accept" : "reject") << " (" << rep.reason
                << ")\n";
      return rep.accepted ? kOk : kReject;
    }

    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << errc_name(e.kind()) << "): " << e.what() << "\n";
    return code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}
