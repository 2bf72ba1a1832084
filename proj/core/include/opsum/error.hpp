#pragma once

#include <stdexcept>
#include <string>

namespace opsum {

/// Broad failure category. The CLI maps these onto exit codes.
enum class ErrorKind {
  kShape,      // tensor shapes do not conform to an operation
  kNumeric,    // NaN/Inf where finite values are required
  kArgument,   // invalid argument or precondition
  kData,       // malformed corpus, vocabulary, or checkpoint
  kCheck,      // a self-check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace opsum
