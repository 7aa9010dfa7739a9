#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pskfade {

enum class ErrorKind {
    InvalidArgument,
    InvalidInterval,
    NonConvergence,
    DivergentTail,
    Divergent,
    NotPositiveDefinite,
    OutOfDomain,
    AliasTruncation,
    NotRegular,
    EmbeddingFailure,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Argument and I/O problems are caller mistakes; everything else is a numeric failure.
    bool is_usage_error() const noexcept {
        return kind_ == ErrorKind::InvalidArgument || kind_ == ErrorKind::OutOfDomain ||
               kind_ == ErrorKind::Io;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
    if (!condition) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace pskfade
