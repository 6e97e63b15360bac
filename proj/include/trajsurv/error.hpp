#pragma once

#include <stdexcept>
#include <string>

namespace trajsurv {

/// Input that is well-formed but violates a domain rule (e.g. an entry year
/// outside the supported periodisation). The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that cannot be read at all (missing file, wrong header).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace trajsurv
