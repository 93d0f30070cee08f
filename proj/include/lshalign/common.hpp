#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lshalign {

// Error taxonomy. The CLI maps ParseError/ValidationError/ConfigError to
// exit code 1 and NumericError (plus anything unexpected) to exit code 2.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using TokenId = std::uint32_t;

} // namespace lshalign
