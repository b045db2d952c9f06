#pragma once

#include <stdexcept>
#include <string>

namespace qmlab {

/// Broad classification of a failure; the command-line front end maps each
/// kind onto a process exit code.
enum class ErrorKind {
  invalid_argument,  ///< malformed input, dimension mismatch, bad config
  precondition,      ///< numerical precondition: aliasing, ellipticity, empty window
  check_failed,      ///< a mathematical construction could not be completed
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

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace qmlab
