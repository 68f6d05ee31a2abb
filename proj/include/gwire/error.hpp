#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gwire {

enum class ErrorCode {
    invalid_input,
    shape,
    singular_matrix,
    decomposition,
    insufficient_data,
    incompatible_response,
    invalid_slicing,
    configuration,
    numerical_failure,
    requires_solver_state,
    degenerate_fit,
    degenerate_directions,
    io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// True for failures caused by the numbers themselves rather than by
    /// malformed input or configuration.
    bool is_numerical() const noexcept {
        return code_ == ErrorCode::numerical_failure ||
               code_ == ErrorCode::singular_matrix ||
               code_ == ErrorCode::decomposition ||
               code_ == ErrorCode::degenerate_fit ||
               code_ == ErrorCode::degenerate_directions;
    }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace gwire
