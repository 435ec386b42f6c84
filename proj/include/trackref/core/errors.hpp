#pragma once

#include <stdexcept>
#include <string>

namespace trackref {

// Error taxonomy shared across the toolkit. The CLI maps these onto
// process exit codes (parse 2, config 3, numeric 4).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace trackref
