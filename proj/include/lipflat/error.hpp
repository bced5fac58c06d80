#pragma once

#include <stdexcept>
#include <string>

namespace lipflat {

enum class Errc {
  invalid_argument,
  self_loop,
  duplicate_edge,
  odd_cycle,
  parity,
  retry_exhausted,
  budget_exceeded,
  size_guard,
  not_bipartite,
  not_regular,
  not_connected,
  no_convergence,
  invalid_lambda,
  precondition,
  cap_exceeded,
  internal,
  io,
  parse,
};

const char* errc_name(Errc code);

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace lipflat
