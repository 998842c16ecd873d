#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace asymnet {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorCode {
    ContractViolation,     // caller broke a documented precondition
    Structural,            // cycle in a graph that must be acyclic
    Acyclicity,            // a transformation would introduce a cycle
    Resource,              // joint-enumeration cap exceeded
    InconsistentEvidence,  // evidence has probability zero under the model
    UndefinedLikelihood,   // likelihood requested for a zero-probability hypothesis
    UndefinedConditional,  // conditioning event has probability zero
    ZeroPrior,             // a within-edge hypothesis conditional is zero
    InconsistentSimnet,    // elicited local networks disagree on shared quantities
    ValidationFailed,      // model violates its structural/numerical invariants
    Parse,                 // malformed document text
    Schema,                // well-formed document with the wrong shape
    Io,                    // file could not be read or written
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace asymnet
