#pragma once

#include <stdexcept>
#include <string>

namespace paragram {

// Error families map onto CLI exit codes: config -> 2, data -> 3, cap -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct CapError : Error {
    using Error::Error;
};

}  // namespace paragram
