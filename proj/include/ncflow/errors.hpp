#pragma once

#include <stdexcept>
#include <string>

namespace ncflow {

// Error taxonomy shared by every module.  The CLI maps kinds onto process
// exit codes, so new kinds must be added to cli_exit_code() as well.
enum class ErrorKind {
    parameter,       // invalid argument / malformed configuration
    precondition,    // admissibility check failed (ordering, sign, MOTS, ...)
    domain,          // surface or sample point left [0, Lambda)
    focal_point,     // theta_bar hit zero while integrating the optical ODE
    discretization,  // grid too coarse / non-finite discrete quantity
    solver,          // linear solve or iteration diverged
    hypothesis,      // barrier-branch smallness hypothesis violated
    interval,        // requested interval exceeds certificate validity window
    io,              // file read/write failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool ok, ErrorKind kind, const std::string& message) {
    if (!ok) fail(kind, message);
}

} // namespace ncflow
