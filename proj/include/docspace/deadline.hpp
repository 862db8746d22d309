#pragma once

#include <chrono>
#include <optional>

#include "docspace/error.hpp"

namespace docspace {

namespace detail {
inline thread_local std::optional<std::chrono::steady_clock::time_point> current_deadline;
}

/// Installs a wall-clock deadline for iterative routines on this thread.
class ScopedDeadline {
public:
    explicit ScopedDeadline(std::optional<std::chrono::steady_clock::time_point> deadline)
        : previous_(detail::current_deadline) {
        detail::current_deadline = deadline;
    }
    ~ScopedDeadline() { detail::current_deadline = previous_; }
    ScopedDeadline(const ScopedDeadline&) = delete;
    ScopedDeadline& operator=(const ScopedDeadline&) = delete;

private:
    std::optional<std::chrono::steady_clock::time_point> previous_;
};

/// Called from optimizer loops; throws ErrorCode::Timeout once the deadline has passed.
inline void check_deadline() {
    if (detail::current_deadline && std::chrono::steady_clock::now() > *detail::current_deadline) {
        throw Error(ErrorCode::Timeout, "job exceeded its wall-clock limit");
    }
}

}  // namespace docspace
