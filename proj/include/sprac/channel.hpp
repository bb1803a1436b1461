#pragma once

#include "sprac/framing.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sprac {

using Frame = std::vector<std::uint8_t>;

enum class Placement {
    uniform,            // e distinct bits uniformly over the eligible bits
    spread,             // round-robin over segments, uniform inside each segment payload
    explicit_positions, // caller-supplied frame bit offsets
};

std::string_view to_string(Placement placement);
/// Throws Error(invalid_argument) for an unknown name.
Placement parse_placement(std::string_view name);

/// Bit-flip injection for a noisy point-to-point link. Frame bit p is byte
/// p / 8, mask 0x80 >> (p % 8).
struct ErrorPattern {
    std::vector<std::size_t> target_packets{0, 1};
    std::size_t bits_per_packet = 0;
    Placement placement = Placement::uniform;
    /// Explicit placement only: one list of frame bit offsets per target.
    std::vector<std::vector<std::size_t>> positions;
    std::uint64_t seed = 0;
    /// Lets flips land in inner CRC bytes and the outer CRC field. The
    /// coefficient header is never corrupted.
    bool allow_crc_corruption = false;
};

struct PacketFlips {
    std::size_t packet = 0;
    std::vector<std::size_t> bits;   // sorted frame bit offsets

    friend bool operator==(const PacketFlips&, const PacketFlips&) = default;
};

using RealizedErrors = std::vector<PacketFlips>;

/// Expands a pattern into concrete bit positions. Deterministic in the seed.
/// Throws Error(pattern) when the pattern cannot be realized.
RealizedErrors realize(const ErrorPattern& pattern, const FrameGeometry& geometry, std::size_t frame_count);

std::vector<Frame> apply_flips(std::span<const Frame> frames, const RealizedErrors& flips);

/// realize() followed by apply_flips(). Non-target frames are returned unchanged.
std::vector<Frame> corrupt(std::span<const Frame> frames, const ErrorPattern& pattern,
                           const FrameGeometry& geometry);

struct ErrorTally {
    std::size_t packet = 0;
    std::vector<std::size_t> per_segment;   // payload flips per segment
    std::size_t inner_crc_bits = 0;
    std::size_t outer_crc_bits = 0;
    std::size_t coefficient_bits = 0;

    std::size_t total() const noexcept;
};

std::vector<ErrorTally> describe_realized_errors(const RealizedErrors& flips, const FrameGeometry& geometry);

} // namespace sprac
