#include "sprac/framing.hpp"

#include "sprac/crc.hpp"
#include "sprac/error.hpp"

#include <algorithm>
#include <string>

namespace sprac {

SegmentLayout SegmentLayout::for_config(const GenerationConfig& config, std::size_t segment_count)
{
    if (segment_count == 0) {
        throw Error(ErrorCode::layout, "segment count must be >= 1");
    }
    if (config.generation_size % segment_count != 0) {
        throw Error(ErrorCode::layout,
                    std::to_string(config.generation_size) + " symbols do not split into "
                        + std::to_string(segment_count) + " equal segments");
    }
    SegmentLayout layout;
    layout.segment_count = segment_count;
    layout.symbols_per_segment = config.generation_size / segment_count;
    layout.segment_payload_bytes = layout.symbols_per_segment * config.symbol_size;
    return layout;
}

FrameGeometry::FrameGeometry(Field field, std::size_t originals, SegmentLayout layout)
    : field_(std::move(field)), originals_(originals), layout_(layout),
      coefficient_bytes_(field_.packed_bytes(originals))
{
    if (layout_.segment_count == 0 || layout_.symbols_per_segment == 0
        || layout_.segment_payload_bytes % layout_.symbols_per_segment != 0) {
        throw Error(ErrorCode::layout, "inconsistent segment layout");
    }
    if ((layout_.segment_payload_bytes * 8) % field_.degree() != 0) {
        throw Error(ErrorCode::layout, "segment payload does not hold whole field elements");
    }
}

FrameGeometry::Region FrameGeometry::region_of(std::size_t byte) const noexcept
{
    if (byte < coefficient_bytes_) {
        return Region::coefficients;
    }
    if (byte >= outer_crc_offset()) {
        return Region::outer_crc;
    }
    const std::size_t within = (byte - coefficient_bytes_) % (layout_.segment_payload_bytes + 1);
    return within == layout_.segment_payload_bytes ? Region::inner_crc : Region::payload;
}

std::size_t FrameGeometry::segment_of(std::size_t byte) const noexcept
{
    return (byte - coefficient_bytes_) / (layout_.segment_payload_bytes + 1);
}

std::vector<std::uint8_t> CodedPacket::payload() const
{
    std::vector<std::uint8_t> out;
    for (const auto& segment : segments) {
        out.insert(out.end(), segment.payload.begin(), segment.payload.end());
    }
    return out;
}

std::size_t ValidityReport::invalid_segments() const noexcept
{
    return static_cast<std::size_t>(std::count(segment_valid.begin(), segment_valid.end(), false));
}

namespace {

void write_coefficients(std::vector<std::uint8_t>& out, const CoefficientVector& coefficients,
                        const FrameGeometry& geometry)
{
    const std::size_t start = out.size();
    out.resize(start + geometry.coefficient_bytes(), 0);
    std::span<std::uint8_t> region(out.data() + start, geometry.coefficient_bytes());
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        geometry.field().set(region, i, coefficients[i]);
    }
}

std::vector<std::uint8_t> serialize_body(const CodedPacket& packet, const FrameGeometry& geometry)
{
    std::vector<std::uint8_t> out;
    out.reserve(geometry.frame_bytes());
    write_coefficients(out, packet.coefficients, geometry);
    for (const auto& segment : packet.segments) {
        out.insert(out.end(), segment.payload.begin(), segment.payload.end());
        out.push_back(segment.inner_crc);
    }
    return out;
}

} // namespace

CodedPacket frame(std::span<const std::uint8_t> coded_row, const CoefficientVector& coefficients,
                  const FrameGeometry& geometry)
{
    const SegmentLayout& layout = geometry.layout();
    if (coded_row.size() != layout.payload_bytes()) {
        throw Error(ErrorCode::layout,
                    "coded row of " + std::to_string(coded_row.size()) + " bytes does not fill "
                        + std::to_string(layout.segment_count) + " segments of "
                        + std::to_string(layout.segment_payload_bytes) + " bytes");
    }
    if (coefficients.size() != geometry.originals()) {
        throw Error(ErrorCode::shape_mismatch, "coefficient vector length differs from K");
    }
    CodedPacket packet;
    packet.coefficients = coefficients;
    packet.segments.reserve(layout.segment_count);
    for (std::size_t s = 0; s < layout.segment_count; ++s) {
        const auto bytes = coded_row.subspan(s * layout.segment_payload_bytes, layout.segment_payload_bytes);
        Segment segment;
        segment.payload.assign(bytes.begin(), bytes.end());
        segment.inner_crc = crc8(segment.payload);
        packet.segments.push_back(std::move(segment));
    }
    packet.outer_crc = compute_outer_crc(packet, geometry);
    return packet;
}

std::uint32_t compute_outer_crc(const CodedPacket& packet, const FrameGeometry& geometry)
{
    return crc32(serialize_body(packet, geometry));
}

std::vector<std::uint8_t> serialize(const CodedPacket& packet, const FrameGeometry& geometry)
{
    std::vector<std::uint8_t> out = serialize_body(packet, geometry);
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<std::uint8_t>(packet.outer_crc >> shift));
    }
    return out;
}

ValidityReport validate(const CodedPacket& packet, const FrameGeometry& geometry)
{
    ValidityReport report;
    report.segment_valid.reserve(packet.segments.size());
    for (const auto& segment : packet.segments) {
        report.segment_valid.push_back(verify_crc8(segment.payload, segment.inner_crc));
    }
    report.outer_valid = compute_outer_crc(packet, geometry) == packet.outer_crc;
    return report;
}

std::pair<CodedPacket, ValidityReport> parse_and_validate(std::span<const std::uint8_t> raw,
                                                          const FrameGeometry& geometry)
{
    if (raw.size() != geometry.frame_bytes()) {
        throw Error(ErrorCode::frame_length,
                    "frame is " + std::to_string(raw.size()) + " bytes, layout needs "
                        + std::to_string(geometry.frame_bytes()));
    }
    const SegmentLayout& layout = geometry.layout();
    CodedPacket packet;
    packet.coefficients.resize(geometry.originals());
    const auto coefficient_region = raw.first(geometry.coefficient_bytes());
    for (std::size_t i = 0; i < geometry.originals(); ++i) {
        packet.coefficients[i] = geometry.field().get(coefficient_region, i);
    }
    packet.segments.resize(layout.segment_count);
    for (std::size_t s = 0; s < layout.segment_count; ++s) {
        const auto bytes = raw.subspan(geometry.segment_offset(s), layout.segment_payload_bytes);
        packet.segments[s].payload.assign(bytes.begin(), bytes.end());
        packet.segments[s].inner_crc = raw[geometry.inner_crc_offset(s)];
    }
    std::uint32_t outer = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        outer = (outer << 8) | raw[geometry.outer_crc_offset() + i];
    }
    packet.outer_crc = outer;

    ValidityReport report;
    report.segment_valid.reserve(layout.segment_count);
    for (const auto& segment : packet.segments) {
        report.segment_valid.push_back(verify_crc8(segment.payload, segment.inner_crc));
    }
    report.outer_valid = crc32(raw.first(geometry.outer_crc_offset())) == outer;
    return {std::move(packet), std::move(report)};
}

double overhead_ratio(const SegmentLayout& layout, const GenerationConfig& config)
{
    return static_cast<double>(layout.segment_count) / static_cast<double>(config.payload_bytes());
}

} // namespace sprac
