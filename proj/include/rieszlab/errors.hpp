//==============================================================================
// errors.hpp
// Exception taxonomy mirrored by the CLI exit codes: bad configuration (1),
// solution breakdown / blowup (2), verification failure (3), internal
// numeric trouble (4).
//==============================================================================
#pragma once

#include <stdexcept>
#include <string>

namespace rieszlab {

struct config_error : std::runtime_error {
    explicit config_error(const std::string& m) : std::runtime_error(m) {}
};

// run breakdown: non-finite fields, CFL guard trip, Newton divergence, ODE blowup
struct blowup_error : std::runtime_error {
    double when = 0.0;   // tau (solver), t (flows/ODEs); see message
    explicit blowup_error(const std::string& m, double when_ = 0.0)
        : std::runtime_error(m), when(when_) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& m) : std::runtime_error(m) {}
};

enum ExitCode {
    kExitOk = 0,
    kExitConfig = 1,
    kExitBlowup = 2,
    kExitVerification = 3,
    kExitNumeric = 4,
};

}  // namespace rieszlab
