#pragma once

#include "sprac/galois.hpp"
#include "sprac/rlnc.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sprac {

/// Split of a packet's g symbols into k equal segments.
struct SegmentLayout {
    std::size_t segment_count = 1;
    std::size_t symbols_per_segment = 0;
    std::size_t segment_payload_bytes = 0;

    /// Throws Error(layout) when g is not a multiple of @p segment_count.
    static SegmentLayout for_config(const GenerationConfig& config, std::size_t segment_count);

    std::size_t symbol_size() const noexcept { return segment_payload_bytes / symbols_per_segment; }
    std::size_t payload_bytes() const noexcept { return segment_count * segment_payload_bytes; }
    std::size_t symbol_count() const noexcept { return segment_count * symbols_per_segment; }

    friend bool operator==(const SegmentLayout&, const SegmentLayout&) = default;
};

/// Byte geometry of one wire frame:
///
///   [coefficients: K elements packed at m bits, padded to a byte]
///   k x ([segment payload] [inner CRC-8])
///   [outer CRC-32, big-endian]
///
/// The outer CRC covers every byte before it.
class FrameGeometry {
public:
    enum class Region { coefficients, payload, inner_crc, outer_crc };

    FrameGeometry(Field field, std::size_t originals, SegmentLayout layout);

    const Field& field() const noexcept { return field_; }
    std::size_t originals() const noexcept { return originals_; }
    const SegmentLayout& layout() const noexcept { return layout_; }

    std::size_t coefficient_bytes() const noexcept { return coefficient_bytes_; }
    std::size_t segment_offset(std::size_t segment) const noexcept
    {
        return coefficient_bytes_ + segment * (layout_.segment_payload_bytes + 1);
    }
    std::size_t inner_crc_offset(std::size_t segment) const noexcept
    {
        return segment_offset(segment) + layout_.segment_payload_bytes;
    }
    std::size_t outer_crc_offset() const noexcept { return segment_offset(layout_.segment_count); }
    std::size_t frame_bytes() const noexcept { return outer_crc_offset() + 4; }
    std::size_t elements_per_segment() const noexcept
    {
        return layout_.segment_payload_bytes * 8 / field_.degree();
    }

    Region region_of(std::size_t byte) const noexcept;
    /// Segment index owning a payload or inner-CRC byte.
    std::size_t segment_of(std::size_t byte) const noexcept;

private:
    Field field_;
    std::size_t originals_;
    SegmentLayout layout_;
    std::size_t coefficient_bytes_;
};

struct Segment {
    std::vector<std::uint8_t> payload;
    std::uint8_t inner_crc = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct CodedPacket {
    CoefficientVector coefficients;
    std::vector<Segment> segments;
    std::uint32_t outer_crc = 0;

    /// Segment payloads concatenated, i.e. the coded row.
    std::vector<std::uint8_t> payload() const;

    friend bool operator==(const CodedPacket&, const CodedPacket&) = default;
};

struct ValidityReport {
    bool outer_valid = false;
    std::vector<bool> segment_valid;

    std::size_t invalid_segments() const noexcept;
    bool all_valid() const noexcept { return outer_valid && invalid_segments() == 0; }
};

/// Segments @p coded_row, appends an inner CRC-8 per segment and the outer CRC-32.
/// Throws Error(layout) if the row does not split into the layout's segments.
CodedPacket frame(std::span<const std::uint8_t> coded_row, const CoefficientVector& coefficients,
                  const FrameGeometry& geometry);

std::vector<std::uint8_t> serialize(const CodedPacket& packet, const FrameGeometry& geometry);

/// CRC-32 over the serialized coefficients, payloads and inner CRCs.
std::uint32_t compute_outer_crc(const CodedPacket& packet, const FrameGeometry& geometry);

ValidityReport validate(const CodedPacket& packet, const FrameGeometry& geometry);

/// Corrupted content is returned as data; only a wrong length is an error
/// (Error(frame_length)).
std::pair<CodedPacket, ValidityReport> parse_and_validate(std::span<const std::uint8_t> raw,
                                                          const FrameGeometry& geometry);

/// Inner CRC bytes divided by the original packet size.
double overhead_ratio(const SegmentLayout& layout, const GenerationConfig& config);

} // namespace sprac
