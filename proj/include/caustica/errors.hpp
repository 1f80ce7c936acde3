#pragma once

#include <stdexcept>
#include <string>

namespace caustica {

// Bad user input: config documents, CLI arguments, malformed deformation specs.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A quantity the theory guarantees (vanishing means, compatible difference
// equations) came out wrong. Indicates corrupted state, not bad input.
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical validation failure in the billiard map: convexity loss,
// root bracketing, Newton non-convergence.
struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace caustica
