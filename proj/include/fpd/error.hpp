#pragma once

#include <stdexcept>
#include <string>

namespace fpd {

// Bad configuration: unknown labels, missing files, invalid parameter values.
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input data: undecodable images, corrupt track files, shape
// mismatches. The CLI maps this to exit code 3.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal invariant violation. The CLI maps this to exit code 4.
struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace fpd
