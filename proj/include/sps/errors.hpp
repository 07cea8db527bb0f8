#pragma once

#include <stdexcept>
#include <string>

namespace sps {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// exit codes: InvalidInput/ConfigError -> 2, ConvergenceFailure -> 3,
// IoError -> 4.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidInput : Error {
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct ConvergenceFailure : Error {
    explicit ConvergenceFailure(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sps
