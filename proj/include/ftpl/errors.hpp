#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftpl {

enum class ErrorKind {
    InvalidParameters,
    ReducibleChain,
    NonPositiveState,
    NonPositiveMarginal,
    UnsupportedBorrowingLimit,
    RateBelowNegDepreciation,
    InvalidRate,
    NonConvergence,
    TruncationTooSmall,
    DegenerateNullSpace,
    GridMismatch,
    OutOfSweepRange,
    ScanTooCoarse,
    ZeroAssetDemand,
    RootLost,
    NonMonetary,
    ConfigSyntax,
    ConfigDomain,
};

std::string_view to_string(ErrorKind kind);

// Every failure in the library is reported through this type; `kind()` is the
// stable, testable part, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(int iterations, double residual);

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

class ConfigSyntaxError : public Error {
public:
    ConfigSyntaxError(int line, const std::string& detail)
        : Error(ErrorKind::ConfigSyntax, "line " + std::to_string(line) + ": " + detail), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class ConfigDomainError : public Error {
public:
    ConfigDomainError(std::string key, std::string reason)
        : Error(ErrorKind::ConfigDomain, key + ": " + reason), key_(std::move(key)), reason_(std::move(reason)) {}

    const std::string& key() const noexcept { return key_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string key_;
    std::string reason_;
};

}  // namespace ftpl
