#include "error.hpp"

namespace porohom {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::domain: return "domain";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::solver: return "solver";
    case ErrorKind::state: return "state";
    case ErrorKind::step_rejected: return "step_rejected";
    case ErrorKind::io: return "io";
    case ErrorKind::verification: return "verification";
    case ErrorKind::harness: return "harness";
  }
  return "unknown";
}

}  // namespace porohom
