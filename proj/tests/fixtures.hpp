#pragma once

#include "sprac/channel.hpp"
#include "sprac/framing.hpp"
#include "sprac/rlnc.hpp"
#include "sprac/rng.hpp"

#include <vector>

namespace fixture {

// A fully encoded generation with its clean frames.
struct Generation {
    sprac::GenerationConfig config;
    sprac::Field field;
    sprac::FrameGeometry geometry;
    sprac::SymbolMatrix originals;
    sprac::SymbolMatrix coefficients;
    std::vector<sprac::CodedPacket> packets;
    std::vector<sprac::Frame> frames;

    Generation(unsigned q, std::size_t k_originals, std::size_t n_coded, std::size_t g, std::size_t symbol_size,
               std::size_t segments, std::uint64_t seed)
        : config(make_config(q, k_originals, n_coded, g, symbol_size)),
          field(q),
          geometry(field, k_originals, sprac::SegmentLayout::for_config(config, segments)),
          originals(field, k_originals, config.elements_per_packet(field)),
          coefficients(sprac::coefficient_matrix(config, field, sprac::derive_seed(seed, 2)))
    {
        sprac::Rng rng(sprac::derive_seed(seed, 1));
        for (std::size_t r = 0; r < originals.rows(); ++r) {
            for (auto& byte : originals.row(r)) {
                byte = static_cast<std::uint8_t>(rng());
            }
        }
        const auto coded = sprac::encode(originals, coefficients);
        for (std::size_t i = 0; i < n_coded; ++i) {
            packets.push_back(sprac::frame(coded.row(i), coefficients.row_elements(i), geometry));
            frames.push_back(sprac::serialize(packets.back(), geometry));
        }
    }

    const sprac::SegmentLayout& layout() const { return geometry.layout(); }

    // Parses `raw` frames back into packets and reports.
    std::pair<std::vector<sprac::CodedPacket>, std::vector<sprac::ValidityReport>>
    receive(const std::vector<sprac::Frame>& raw) const
    {
        std::pair<std::vector<sprac::CodedPacket>, std::vector<sprac::ValidityReport>> out;
        for (const auto& f : raw) {
            auto [packet, report] = sprac::parse_and_validate(f, geometry);
            out.first.push_back(std::move(packet));
            out.second.push_back(std::move(report));
        }
        return out;
    }

    // Frame bit offset of payload bit `bit` inside segment `segment`.
    std::size_t payload_bit(std::size_t segment, std::size_t bit) const
    {
        return geometry.segment_offset(segment) * 8 + bit;
    }

private:
    static sprac::GenerationConfig make_config(unsigned q, std::size_t k, std::size_t n, std::size_t g,
                                               std::size_t symbol_size)
    {
        sprac::GenerationConfig c;
        c.field_size = q;
        c.originals = k;
        c.coded = n;
        c.generation_size = g;
        c.symbol_size = symbol_size;
        return c;
    }
};

inline sprac::ErrorPattern explicit_flips(std::vector<std::size_t> targets, std::vector<std::vector<std::size_t>> bits,
                                          bool allow_crc = false)
{
    sprac::ErrorPattern p;
    p.target_packets = std::move(targets);
    p.placement = sprac::Placement::explicit_positions;
    p.bits_per_packet = bits.empty() ? 0 : bits.front().size();
    p.positions = std::move(bits);
    p.allow_crc_corruption = allow_crc;
    return p;
}

} // namespace fixture
