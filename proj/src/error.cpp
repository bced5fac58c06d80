#include "lipflat/error.hpp"

namespace lipflat {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::self_loop: return "self-loop";
    case Errc::duplicate_edge: return "duplicate edge";
    case Errc::odd_cycle: return "odd cycle";
    case Errc::parity: return "parity";
    case Errc::retry_exhausted: return "retry budget exhausted";
    case Errc::budget_exceeded: return "search budget exceeded";
    case Errc::size_guard: return "size guard exceeded";
    case Errc::not_bipartite: return "not bipartite";
    case Errc::not_regular: return "not regular";
    case Errc::not_connected: return "not connected";
    case Errc::no_convergence: return "no convergence";
    case Errc::invalid_lambda: return "invalid lambda";
    case Errc::precondition: return "precondition violated";
    case Errc::cap_exceeded: return "cap exceeded";
    case Errc::internal: return "internal check failed";
    case Errc::io: return "i/o";
    case Errc::parse: return "parse";
  }
  return "unknown";
}

}  // namespace lipflat
