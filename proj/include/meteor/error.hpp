#pragma once

#include <stdexcept>
#include <string>

namespace meteor {

enum class ErrorKind {
  invalid_parameter,
  invalid_graph,
  invalid_edge,
  invalid_state,
  invalid_target,
  budget_exceeded,
  unsupported_topology,
  window_exhausted,
  insufficient_samples,
  io_error,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace meteor
