#pragma once

#include <stdexcept>
#include <string>

namespace freqlab {

/// Error taxonomy shared by every module. The CLI maps kinds to exit codes:
/// check failures -> 2, hypothesis violations -> 3, numerical degeneracy -> 4.
enum class ErrorKind {
  Structural,          // malformed algebra / config / dimension mismatch
  Domain,              // argument outside the operation's domain
  Unsupported,         // requested feature intentionally out of scope
  HypothesisViolation, // theorem hypothesis (e.g. alpha != sqrt(K)) violated
  Degenerate,          // quantity below numeric floor, nothing to measure
  Singular,            // nonfinite integrand at an interior node
  Numerical,           // solver non-convergence and similar
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

} // namespace freqlab
