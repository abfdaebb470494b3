#pragma once

#include <stdexcept>
#include <string>

namespace cbf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

/// configuration file / CLI parameter problems (CLI exit code 2)
struct ConfigError : Error {
    using Error::Error;
};

/// NaN/Inf detected in a trajectory (CLI exit code 3)
struct BlowupError : Error {
    BlowupError(const std::string& what, long step) : Error(what), step(step) {}
    long step;
};

/// disallowed parameter regime (d=3, r<3 without the unsafe flag)
struct RegimeError : Error {
    using Error::Error;
};

/// a runtime check stated by the contracts failed (CLI exit code 4)
struct AssertionError : Error {
    using Error::Error;
};

}  // namespace cbf
