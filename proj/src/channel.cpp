#include "sprac/channel.hpp"

#include "sprac/error.hpp"
#include "sprac/rng.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace sprac {

std::string_view to_string(Placement placement)
{
    switch (placement) {
    case Placement::uniform: return "uniform";
    case Placement::spread: return "spread";
    case Placement::explicit_positions: return "explicit";
    }
    return "unknown";
}

Placement parse_placement(std::string_view name)
{
    if (name == "uniform") {
        return Placement::uniform;
    }
    if (name == "spread") {
        return Placement::spread;
    }
    if (name == "explicit") {
        return Placement::explicit_positions;
    }
    throw Error(ErrorCode::invalid_argument, "unknown placement '" + std::string(name) + "'");
}

namespace {

bool eligible_byte(const FrameGeometry& geometry, std::size_t byte, bool allow_crc)
{
    switch (geometry.region_of(byte)) {
    case FrameGeometry::Region::payload: return true;
    case FrameGeometry::Region::inner_crc:
    case FrameGeometry::Region::outer_crc: return allow_crc;
    case FrameGeometry::Region::coefficients: return false;
    }
    return false;
}

// Floyd's sampling: `count` distinct values from [0, range), sorted.
std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t range, std::size_t count)
{
    std::set<std::size_t> picked;
    for (std::size_t j = range - count; j < range; ++j) {
        const auto t = static_cast<std::size_t>(uniform_below(rng, j + 1));
        if (!picked.insert(t).second) {
            picked.insert(j);
        }
    }
    return {picked.begin(), picked.end()};
}

std::vector<std::size_t> place_uniform(const ErrorPattern& pattern, const FrameGeometry& geometry, Rng& rng)
{
    std::vector<std::size_t> bytes;
    for (std::size_t b = 0; b < geometry.frame_bytes(); ++b) {
        if (eligible_byte(geometry, b, pattern.allow_crc_corruption)) {
            bytes.push_back(b);
        }
    }
    const std::size_t range = bytes.size() * 8;
    if (pattern.bits_per_packet > range) {
        throw Error(ErrorCode::pattern,
                    std::to_string(pattern.bits_per_packet) + " flips exceed the "
                        + std::to_string(range) + " eligible bits");
    }
    std::vector<std::size_t> bits;
    for (const std::size_t index : sample_distinct(rng, range, pattern.bits_per_packet)) {
        bits.push_back(bytes[index / 8] * 8 + index % 8);
    }
    std::sort(bits.begin(), bits.end());
    return bits;
}

std::vector<std::size_t> place_spread(const ErrorPattern& pattern, const FrameGeometry& geometry, Rng& rng)
{
    const SegmentLayout& layout = geometry.layout();
    const std::size_t k = layout.segment_count;
    const std::size_t segment_bits = layout.segment_payload_bytes * 8;
    std::vector<std::size_t> bits;
    for (std::size_t s = 0; s < k; ++s) {
        const std::size_t count = pattern.bits_per_packet / k + (s < pattern.bits_per_packet % k ? 1 : 0);
        if (count > segment_bits) {
            throw Error(ErrorCode::pattern, "spread placement overfills a segment");
        }
        for (const std::size_t offset : sample_distinct(rng, segment_bits, count)) {
            bits.push_back(geometry.segment_offset(s) * 8 + offset);
        }
    }
    std::sort(bits.begin(), bits.end());
    return bits;
}

std::vector<std::size_t> place_explicit(const ErrorPattern& pattern, const FrameGeometry& geometry,
                                        std::size_t target_slot)
{
    if (target_slot >= pattern.positions.size()) {
        throw Error(ErrorCode::pattern, "explicit placement needs one position list per target");
    }
    std::vector<std::size_t> bits = pattern.positions[target_slot];
    if (bits.size() != pattern.bits_per_packet) {
        throw Error(ErrorCode::pattern, "explicit position list length differs from bits per packet");
    }
    std::sort(bits.begin(), bits.end());
    if (std::adjacent_find(bits.begin(), bits.end()) != bits.end()) {
        throw Error(ErrorCode::pattern, "explicit positions must be distinct");
    }
    for (const std::size_t bit : bits) {
        if (bit >= geometry.frame_bytes() * 8) {
            throw Error(ErrorCode::pattern, "explicit position " + std::to_string(bit) + " is outside the frame");
        }
        if (!eligible_byte(geometry, bit / 8, pattern.allow_crc_corruption)) {
            throw Error(ErrorCode::pattern,
                        "explicit position " + std::to_string(bit) + " is not eligible for corruption");
        }
    }
    return bits;
}

} // namespace

RealizedErrors realize(const ErrorPattern& pattern, const FrameGeometry& geometry, std::size_t frame_count)
{
    RealizedErrors out;
    std::set<std::size_t> seen;
    for (std::size_t slot = 0; slot < pattern.target_packets.size(); ++slot) {
        const std::size_t packet = pattern.target_packets[slot];
        if (packet >= frame_count) {
            throw Error(ErrorCode::pattern, "target packet " + std::to_string(packet) + " was not sent");
        }
        if (!seen.insert(packet).second) {
            throw Error(ErrorCode::pattern, "target packet listed twice");
        }
        Rng rng(derive_seed(pattern.seed, packet));
        PacketFlips flips;
        flips.packet = packet;
        switch (pattern.placement) {
        case Placement::uniform: flips.bits = place_uniform(pattern, geometry, rng); break;
        case Placement::spread: flips.bits = place_spread(pattern, geometry, rng); break;
        case Placement::explicit_positions: flips.bits = place_explicit(pattern, geometry, slot); break;
        }
        out.push_back(std::move(flips));
    }
    return out;
}

std::vector<Frame> apply_flips(std::span<const Frame> frames, const RealizedErrors& flips)
{
    std::vector<Frame> out(frames.begin(), frames.end());
    for (const auto& packet : flips) {
        Frame& frame = out.at(packet.packet);
        for (const std::size_t bit : packet.bits) {
            frame.at(bit / 8) ^= static_cast<std::uint8_t>(0x80U >> (bit % 8));
        }
    }
    return out;
}

std::vector<Frame> corrupt(std::span<const Frame> frames, const ErrorPattern& pattern,
                           const FrameGeometry& geometry)
{
    for (const std::size_t packet : pattern.target_packets) {
        if (packet < frames.size() && frames[packet].size() != geometry.frame_bytes()) {
            throw Error(ErrorCode::frame_length, "target frame does not match the frame geometry");
        }
    }
    return apply_flips(frames, realize(pattern, geometry, frames.size()));
}

std::size_t ErrorTally::total() const noexcept
{
    return std::accumulate(per_segment.begin(), per_segment.end(), std::size_t{0}) + inner_crc_bits
        + outer_crc_bits + coefficient_bits;
}

std::vector<ErrorTally> describe_realized_errors(const RealizedErrors& flips, const FrameGeometry& geometry)
{
    std::vector<ErrorTally> out;
    for (const auto& packet : flips) {
        ErrorTally tally;
        tally.packet = packet.packet;
        tally.per_segment.assign(geometry.layout().segment_count, 0);
        for (const std::size_t bit : packet.bits) {
            const std::size_t byte = bit / 8;
            switch (geometry.region_of(byte)) {
            case FrameGeometry::Region::payload: ++tally.per_segment[geometry.segment_of(byte)]; break;
            case FrameGeometry::Region::inner_crc: ++tally.inner_crc_bits; break;
            case FrameGeometry::Region::outer_crc: ++tally.outer_crc_bits; break;
            case FrameGeometry::Region::coefficients: ++tally.coefficient_bits; break;
            }
        }
        out.push_back(std::move(tally));
    }
    return out;
}

} // namespace sprac
