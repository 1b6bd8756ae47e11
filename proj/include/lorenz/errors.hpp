#pragma once

#include <stdexcept>
#include <string>

namespace lorenz {

enum class ErrorKind {
    usage,          // argument out of the operation's contract
    construction,   // non-finite sample while building a FuncRep
    domain,         // evaluation point or argument outside the admissible set
    composition,    // inner range escapes the outer domain
    precondition,   // e.g. non-monotone function passed to an inverter
    range,          // target value outside the range of a function
    singular,       // vanishing derivative where a quotient is needed
    blow_up,        // comparison bound denominator is not positive
    branch,         // negative argument to the real rho-th root
    inconsistent,   // sign conditions of a proven-monotone equation violated
    bracket,        // no sign change on a root bracket
    convergence,    // iteration cap reached
    invariant,      // a monitored invariant was breached
    not_renormalizable,
    config,
    parse,
    verification,
};

const char* to_string(ErrorKind kind);

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

}  // namespace lorenz
