#pragma once

#include <stdexcept>
#include <string>

namespace fmcw {

enum class ErrorKind {
    InvalidArgument,
    NoInterferenceFreeData,
    InsufficientData,
    OutOfRange,
    RankDeficient,
    IllConditioned,
    NoInterference,
    SweepUnusable,
    Config,
    Data,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures onto stable exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace fmcw
