#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bosample {

// Kernel matrix could not be factorized even after jitter escalation.
// Carries the jitter levels that were tried so callers can report them.
class SingularKernelError : public std::runtime_error {
public:
    SingularKernelError(const std::string& msg, std::vector<double> attempted)
        : std::runtime_error(msg), attempted_jitters(std::move(attempted)) {}

    std::vector<double> attempted_jitters;
};

// A sampling-design operation was asked for something the scheme cannot
// provide (e.g. analytic joint inclusion under weighted without-replacement).
class UnsupportedSchemeError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration file / flag combination. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem / parse failures on input or output files. CLI exit code 4.
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bosample
