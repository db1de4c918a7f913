#pragma once

#include <stdexcept>
#include <string>

namespace zkmedian {

enum class errc {
  parameter,        // invalid or inconsistent protocol parameters
  input_shape,      // wrong vector length, stray index, malformed document
  domain,           // value outside the query range or the bit width
  degenerate,       // every selection weight vanished
  witness,          // witness generation cannot satisfy a gadget
  backend_refusal,  // prover refused: witness does not satisfy the system
  key_mismatch,     // key material bound to different params or backend
  incomplete_board, // verification attempted before all entries are posted
  transport,        // board I/O failure (socket or file)
  audit_precision,  // a certified comparison landed inside its interval
  serialization,    // malformed or version-mismatched blob
};

const char* errc_name(errc kind);

class Error : public std::runtime_error {
public:
  Error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  errc kind() const { return kind_; }

private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) { throw Error(kind, what); }

} // namespace zkmedian
