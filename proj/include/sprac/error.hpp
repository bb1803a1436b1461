#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sprac {

enum class ErrorCode {
    invalid_argument,
    no_inverse,
    out_of_range,
    shape_mismatch,
    rank_deficient,
    layout,
    frame_length,
    pattern,
    io,
    format,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Thrown when a coefficient matrix cannot be inverted; more packets are needed.
class RankDeficientError : public Error {
public:
    RankDeficientError(std::size_t achieved, std::size_t required);

    std::size_t achieved_rank() const noexcept { return achieved_; }
    std::size_t required_rank() const noexcept { return required_; }

private:
    std::size_t achieved_;
    std::size_t required_;
};

} // namespace sprac
