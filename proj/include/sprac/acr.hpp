#pragma once

#include "sprac/framing.hpp"
#include "sprac/galois.hpp"
#include "sprac/rlnc.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sprac {

/// Packets used to guess the originals (chosen) and the packet checked against
/// the re-encoding (target).
struct AcrSelection {
    std::vector<std::size_t> chosen;
    std::size_t target = 0;

    friend bool operator==(const AcrSelection&, const AcrSelection&) = default;
};

/// Trust in a received packet, or in one segment of it.
enum class Standing { valid, repaired, invalid };

struct PacketStanding {
    Standing standing = Standing::valid;
    std::size_t invalid_segments = 0;
};

/// Picks K packets with an invertible coefficient submatrix, preferring
/// valid packets, then repaired ones, then invalid ones with the fewest
/// invalid segments (lowest index breaks ties). When @p target is empty the
/// first invalid packet becomes the target, or the first unchosen packet if
/// every packet is valid. Throws RankDeficientError if no K-subset of the
/// non-target packets is invertible.
AcrSelection select_subset(std::span<const PacketStanding> packets,
                           std::span<const CoefficientVector> coefficients, const Field& field,
                           std::optional<std::size_t> target = std::nullopt);

/// Same selection driven by outer-CRC validity.
AcrSelection select_subset(std::span<const ValidityReport> reports,
                           std::span<const CoefficientVector> coefficients, const Field& field);

/// True if no chosen packet is invalid.
bool chosen_are_trusted(const AcrSelection& selection, std::span<const PacketStanding> packets);

/// Disagreement between a received packet and its re-encoding inside one segment.
/// `symbols` are symbol indices within the segment; `elements` are field-element
/// offsets within the segment payload. Both strictly increasing.
struct SegmentMismatch {
    std::vector<std::size_t> symbols;
    std::vector<std::size_t> elements;

    bool empty() const noexcept { return symbols.empty(); }
    friend bool operator==(const SegmentMismatch&, const SegmentMismatch&) = default;
};

struct MismatchMap {
    std::vector<SegmentMismatch> segments;
    /// Symbol comparisons performed in the compare step.
    std::size_t comparisons = 0;

    bool empty() const noexcept;
    std::size_t mismatched_elements() const noexcept;
};

/// One ACR round restricted to segment @p segment: decode the chosen packets'
/// segment columns, re-encode the target's coefficients, compare.
/// Propagates RankDeficientError from decoding.
SegmentMismatch acr_segment_round(const AcrSelection& selection, std::span<const CodedPacket> packets,
                                  const FrameGeometry& geometry, std::size_t segment);

/// One ACR round over the whole packet, grouped per segment.
MismatchMap acr_round(const AcrSelection& selection, std::span<const CodedPacket> packets,
                      const FrameGeometry& geometry);

} // namespace sprac
