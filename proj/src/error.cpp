#include "sprac/error.hpp"

namespace sprac {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::no_inverse: return "no_inverse";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::shape_mismatch: return "shape_mismatch";
    case ErrorCode::rank_deficient: return "rank_deficient";
    case ErrorCode::layout: return "layout";
    case ErrorCode::frame_length: return "frame_length";
    case ErrorCode::pattern: return "pattern";
    case ErrorCode::io: return "io";
    case ErrorCode::format: return "format";
    }
    return "unknown";
}

RankDeficientError::RankDeficientError(std::size_t achieved, std::size_t required)
    : Error(ErrorCode::rank_deficient,
            "coefficient matrix has rank " + std::to_string(achieved) + ", need "
                + std::to_string(required) + "; more packets are needed"),
      achieved_(achieved), required_(required)
{
}

} // namespace sprac
