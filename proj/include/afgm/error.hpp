#pragma once

#include <stdexcept>
#include <string>

namespace afgm {

enum class ErrorKind {
  invalid_argument,  // malformed grid, bad dimensions, out-of-domain input
  precondition,      // input violates an operation precondition
  degenerate,        // degenerate spectrum, ill-conditioned component, degenerate truth graph
  numerical,         // non-finite intermediate values
  config,            // configuration field missing or invalid
  io,                // unreadable or malformed file
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace afgm
