#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace docspace {

enum class ErrorCode {
    InvalidArgument = 1,
    Io,
    Parse,
    DimensionMismatch,
    EmptyCorpus,
    EmptyVocabulary,
    ZeroColumn,
    OutOfRange,
    PerplexityInfeasible,
    ZeroVariance,
    ZeroNorm,
    Degenerate,
    NotConverged,
    Timeout,
    MemoryLimit,
    NoPairs,
    UnknownDataset,
};

/// Short kebab-case slug used in `failed:<reason>` result rows.
std::string_view error_slug(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) {
        throw Error(code, message);
    }
}

}  // namespace docspace
