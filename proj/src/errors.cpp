#include "lorenz/errors.hpp"

namespace lorenz {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::construction: return "construction";
    case ErrorKind::domain: return "domain";
    case ErrorKind::composition: return "composition";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::range: return "range";
    case ErrorKind::singular: return "singular";
    case ErrorKind::blow_up: return "blow_up";
    case ErrorKind::branch: return "branch";
    case ErrorKind::inconsistent: return "inconsistent";
    case ErrorKind::bracket: return "bracket";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::invariant: return "invariant";
    case ErrorKind::not_renormalizable: return "not_renormalizable";
    case ErrorKind::config: return "config";
    case ErrorKind::parse: return "parse";
    case ErrorKind::verification: return "verification";
    }
    return "unknown";
}

}  // namespace lorenz
