#pragma once

#include <stdexcept>
#include <string>

namespace vibrotherm {

// Domain errors map to CLI exit code 1, usage errors to 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct ExtractionError : Error { using Error::Error; };
struct IntegrationError : Error { using Error::Error; };
struct SearchError : Error { using Error::Error; };

} // namespace vibrotherm
