#include "sprac/acr.hpp"

#include "sprac/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sprac {

namespace {

int weight(Standing standing)
{
    switch (standing) {
    case Standing::valid: return 0;
    case Standing::repaired: return 1;
    case Standing::invalid: return 2;
    }
    return 2;
}

// Guess the originals from the chosen rows, re-encode the target row and
// compare symbol by symbol. Rows are payload slices of equal length.
SegmentMismatch compare_window(const AcrSelection& selection, std::span<const CodedPacket> packets,
                               const Field& field, std::size_t originals,
                               const std::vector<std::span<const std::uint8_t>>& rows,
                               std::size_t symbol_size, std::size_t& comparisons)
{
    const std::size_t bytes = rows[selection.target].size();
    const std::size_t elements = bytes * 8 / field.degree();

    SymbolMatrix chosen_coefficients(field, originals, originals);
    SymbolMatrix chosen_rows(field, originals, elements);
    for (std::size_t i = 0; i < originals; ++i) {
        const std::size_t p = selection.chosen[i];
        for (std::size_t j = 0; j < originals; ++j) {
            chosen_coefficients.set(i, j, packets[p].coefficients[j]);
        }
        std::copy(rows[p].begin(), rows[p].end(), chosen_rows.row(i).begin());
    }
    const SymbolMatrix guessed = decode(chosen_rows, chosen_coefficients);

    std::vector<std::uint8_t> reencoded(bytes, 0);
    const auto& target_coefficients = packets[selection.target].coefficients;
    for (std::size_t j = 0; j < originals; ++j) {
        field.axpy(reencoded, guessed.row(j), target_coefficients[j]);
    }

    SegmentMismatch out;
    const auto received = rows[selection.target];
    const std::size_t elements_per_symbol = symbol_size * 8 / field.degree();
    for (std::size_t sym = 0; sym * symbol_size < bytes; ++sym) {
        ++comparisons;
        const std::size_t begin = sym * symbol_size;
        if (std::equal(received.begin() + begin, received.begin() + begin + symbol_size,
                       reencoded.begin() + begin)) {
            continue;
        }
        out.symbols.push_back(sym);
        for (std::size_t e = sym * elements_per_symbol; e < (sym + 1) * elements_per_symbol; ++e) {
            if (field.get(received, e) != field.get(reencoded, e)) {
                out.elements.push_back(e);
            }
        }
    }
    return out;
}

void check_selection(const AcrSelection& selection, std::span<const CodedPacket> packets,
                     std::size_t originals)
{
    if (selection.chosen.size() != originals) {
        throw Error(ErrorCode::invalid_argument, "ACR needs exactly K chosen packets");
    }
    if (selection.target >= packets.size()) {
        throw Error(ErrorCode::out_of_range, "ACR target index out of range");
    }
    for (const std::size_t p : selection.chosen) {
        if (p >= packets.size() || p == selection.target) {
            throw Error(ErrorCode::invalid_argument, "ACR chosen set must exclude the target");
        }
    }
}

} // namespace

AcrSelection select_subset(std::span<const PacketStanding> packets,
                           std::span<const CoefficientVector> coefficients, const Field& field,
                           std::optional<std::size_t> target)
{
    if (packets.size() != coefficients.size() || packets.empty()) {
        throw Error(ErrorCode::shape_mismatch, "need one coefficient vector per packet");
    }
    const std::size_t originals = coefficients.front().size();
    if (target && *target >= packets.size()) {
        throw Error(ErrorCode::out_of_range, "ACR target index out of range");
    }
    if (!target) {
        const auto it = std::find_if(packets.begin(), packets.end(),
                                     [](const PacketStanding& p) { return p.standing == Standing::invalid; });
        if (it != packets.end()) {
            target = static_cast<std::size_t>(it - packets.begin());
        }
    }

    std::vector<std::size_t> order(packets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const int wa = weight(packets[a].standing);
        const int wb = weight(packets[b].standing);
        if (wa != wb) {
            return wa < wb;
        }
        return packets[a].invalid_segments < packets[b].invalid_segments;
    });

    AcrSelection selection;
    RankTracker basis(field, originals);
    for (const std::size_t p : order) {
        if (target && p == *target) {
            continue;
        }
        if (basis.rank() == originals) {
            break;
        }
        if (basis.try_add(coefficients[p])) {
            selection.chosen.push_back(p);
        }
    }
    if (basis.rank() < originals) {
        throw RankDeficientError(basis.rank(), originals);
    }
    if (target) {
        selection.target = *target;
    } else {
        std::size_t p = 0;
        while (std::find(selection.chosen.begin(), selection.chosen.end(), p) != selection.chosen.end()) {
            ++p;
        }
        if (p >= packets.size()) {
            throw RankDeficientError(originals, originals + 1);
        }
        selection.target = p;
    }
    std::sort(selection.chosen.begin(), selection.chosen.end());
    return selection;
}

AcrSelection select_subset(std::span<const ValidityReport> reports,
                           std::span<const CoefficientVector> coefficients, const Field& field)
{
    std::vector<PacketStanding> standings;
    standings.reserve(reports.size());
    for (const auto& report : reports) {
        standings.push_back({report.outer_valid ? Standing::valid : Standing::invalid,
                             report.invalid_segments()});
    }
    return select_subset(standings, coefficients, field);
}

bool chosen_are_trusted(const AcrSelection& selection, std::span<const PacketStanding> packets)
{
    return std::all_of(selection.chosen.begin(), selection.chosen.end(),
                       [&](std::size_t p) { return packets[p].standing != Standing::invalid; });
}

bool MismatchMap::empty() const noexcept
{
    return std::all_of(segments.begin(), segments.end(), [](const SegmentMismatch& s) { return s.empty(); });
}

std::size_t MismatchMap::mismatched_elements() const noexcept
{
    std::size_t n = 0;
    for (const auto& s : segments) {
        n += s.elements.size();
    }
    return n;
}

SegmentMismatch acr_segment_round(const AcrSelection& selection, std::span<const CodedPacket> packets,
                                  const FrameGeometry& geometry, std::size_t segment)
{
    check_selection(selection, packets, geometry.originals());
    if (segment >= geometry.layout().segment_count) {
        throw Error(ErrorCode::out_of_range, "segment index out of range");
    }
    std::vector<std::span<const std::uint8_t>> rows(packets.size());
    rows[selection.target] = packets[selection.target].segments[segment].payload;
    for (const std::size_t p : selection.chosen) {
        rows[p] = packets[p].segments[segment].payload;
    }
    std::size_t comparisons = 0;
    return compare_window(selection, packets, geometry.field(), geometry.originals(), rows,
                          geometry.layout().symbol_size(), comparisons);
}

MismatchMap acr_round(const AcrSelection& selection, std::span<const CodedPacket> packets,
                      const FrameGeometry& geometry)
{
    check_selection(selection, packets, geometry.originals());
    std::vector<std::vector<std::uint8_t>> payloads(packets.size());
    std::vector<std::span<const std::uint8_t>> rows(packets.size());
    payloads[selection.target] = packets[selection.target].payload();
    rows[selection.target] = payloads[selection.target];
    for (const std::size_t p : selection.chosen) {
        payloads[p] = packets[p].payload();
        rows[p] = payloads[p];
    }

    MismatchMap map;
    const SegmentMismatch whole = compare_window(selection, packets, geometry.field(), geometry.originals(),
                                                 rows, geometry.layout().symbol_size(), map.comparisons);
    const SegmentLayout& layout = geometry.layout();
    const std::size_t per_segment = geometry.elements_per_segment();
    map.segments.resize(layout.segment_count);
    for (const std::size_t sym : whole.symbols) {
        map.segments[sym / layout.symbols_per_segment].symbols.push_back(sym % layout.symbols_per_segment);
    }
    for (const std::size_t e : whole.elements) {
        map.segments[e / per_segment].elements.push_back(e % per_segment);
    }
    return map;
}

} // namespace sprac
