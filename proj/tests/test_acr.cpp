#include "fixtures.hpp"
#include "oracles.hpp"

#include "sprac/acr.hpp"
#include "sprac/error.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace sprac;

namespace {

std::vector<CoefficientVector> coefficient_list(const std::vector<CodedPacket>& packets)
{
    std::vector<CoefficientVector> out;
    for (const auto& p : packets) {
        out.push_back(p.coefficients);
    }
    return out;
}

// Symbols and elements of `target` whose bits differ from `clean`.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> differing(const fixture::Generation& gen,
                                                                          const std::vector<std::uint8_t>& target,
                                                                          std::span<const std::uint8_t> clean)
{
    std::set<std::size_t> symbols, elements;
    const std::size_t m = gen.field.degree();
    for (std::size_t bit = 0; bit < target.size() * 8; ++bit) {
        const bool a = (target[bit / 8] >> (7 - bit % 8)) & 1U;
        const bool b = (clean[bit / 8] >> (7 - bit % 8)) & 1U;
        if (a != b) {
            symbols.insert(bit / 8 / gen.config.symbol_size);
            elements.insert(bit / m);
        }
    }
    return {{symbols.begin(), symbols.end()}, {elements.begin(), elements.end()}};
}

} // namespace

TEST(Acr, PrefersValidPacketsAndTargetsTheInvalidOne)
{
    const fixture::Generation gen(2, 2, 3, 4, 2, 1, 1);
    const std::vector<PacketStanding> standings{{Standing::valid, 0}, {Standing::invalid, 1}, {Standing::valid, 0}};
    const auto selection = select_subset(standings, coefficient_list(gen.packets), gen.field);
    EXPECT_EQ(selection.chosen, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(selection.target, 1U);
    EXPECT_TRUE(chosen_are_trusted(selection, standings));
}

TEST(Acr, AllValidGivesEmptyMap)
{
    const fixture::Generation gen(2, 3, 6, 6, 4, 3, 2);
    const auto [packets, reports] = gen.receive(gen.frames);
    const auto selection = select_subset(std::span<const ValidityReport>(reports), coefficient_list(packets), gen.field);
    EXPECT_EQ(selection.chosen.size(), 3U);
    EXPECT_EQ(std::count(selection.chosen.begin(), selection.chosen.end(), selection.target), 0);
    const auto map = acr_round(selection, packets, gen.geometry);
    EXPECT_TRUE(map.empty());
    EXPECT_EQ(map.comparisons, 6U);
    EXPECT_EQ(map.segments.size(), 3U);
}

TEST(Acr, ParallelCoefficientsAreRankDeficient)
{
    const Field f(4);
    const std::vector<CoefficientVector> coeffs{{1, 2}, {2, 3}, {3, 1}};   // multiples of (1, 2)
    const std::vector<PacketStanding> standings(3);
    EXPECT_EQ(f.mul(2, 2), 3);
    EXPECT_THROW((void)select_subset(standings, coeffs, f), RankDeficientError);
}

TEST(Acr, FallsBackToFewestInvalidSegments)
{
    const fixture::Generation gen(2, 2, 4, 4, 2, 1, 3);
    const std::vector<PacketStanding> standings{
        {Standing::invalid, 3}, {Standing::invalid, 1}, {Standing::valid, 0}, {Standing::invalid, 2}};
    const auto selection = select_subset(standings, coefficient_list(gen.packets), gen.field, 3);
    EXPECT_EQ(selection.target, 3U);
    EXPECT_FALSE(chosen_are_trusted(selection, standings));
    EXPECT_EQ(std::count(selection.chosen.begin(), selection.chosen.end(), 2U), 1);
    EXPECT_EQ(std::count(selection.chosen.begin(), selection.chosen.end(), 0U), 0);
}

TEST(Acr, SoundOnCleanChosenSetsExhaustiveSingleAndDoubleFlips)
{
    for (unsigned q : {2U, 4U, 256U}) {
        const fixture::Generation gen(q, 2, 4, 4, 1, 2, q);
        const std::size_t payload_bits = gen.layout().payload_bytes() * 8;
        const std::size_t target = 3;
        for (std::size_t a = 0; a < payload_bits; ++a) {
            for (std::size_t b = a; b < payload_bits; b += 5) {
                auto packets = gen.packets;
                auto payload = packets[target].payload();
                payload[a / 8] ^= static_cast<std::uint8_t>(0x80 >> (a % 8));
                if (b != a) {
                    payload[b / 8] ^= static_cast<std::uint8_t>(0x80 >> (b % 8));
                }
                const std::size_t per = gen.layout().segment_payload_bytes;
                for (std::size_t s = 0; s < 2; ++s) {
                    std::copy_n(payload.begin() + static_cast<long>(s * per), per, packets[target].segments[s].payload.begin());
                }
                AcrSelection selection{{0, 1}, target};
                const auto map = acr_round(selection, packets, gen.geometry);
                const auto [symbols, elements] = differing(gen, payload, gen.packets[target].payload());
                std::vector<std::size_t> got_symbols, got_elements;
                for (std::size_t s = 0; s < map.segments.size(); ++s) {
                    for (auto x : map.segments[s].symbols) {
                        got_symbols.push_back(s * gen.layout().symbols_per_segment + x);
                    }
                    for (auto x : map.segments[s].elements) {
                        got_elements.push_back(s * gen.geometry.elements_per_segment() + x);
                    }
                }
                ASSERT_EQ(got_symbols, symbols);
                ASSERT_EQ(got_elements, elements);
                for (std::size_t s = 0; s < 2; ++s) {
                    ASSERT_EQ(acr_segment_round(selection, packets, gen.geometry, s), map.segments[s]);
                }
            }
        }
    }
}

TEST(Acr, CorruptedChosenPacketMatchesBruteForceReencoding)
{
    // K=2, 4 symbols of 1 byte: the mismatch set equals the symbols whose
    // re-encoding from the corrupted chosen rows differs from the target.
    const fixture::Generation gen(2, 2, 8, 4, 1, 1, 9);
    // Pair the systematic packet 0 with a coded packet that completes the basis.
    std::size_t partner = 2;
    while (partner < gen.packets.size() && gen.packets[partner].coefficients[1] == 0) {
        ++partner;
    }
    ASSERT_LT(partner, gen.packets.size());
    const std::size_t target = partner + 1 < gen.packets.size() ? partner + 1 : 1;
    for (std::size_t bit = 0; bit < 32; ++bit) {
        auto packets = gen.packets;
        packets[0].segments[0].payload[bit / 8] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
        const AcrSelection selection{{0, partner}, target};
        const auto map = acr_round(selection, packets, gen.geometry);

        oracle::Matrix g, x;
        for (std::size_t p : selection.chosen) {
            g.push_back({packets[p].coefficients[0], packets[p].coefficients[1]});
            std::vector<unsigned> row;
            for (std::size_t e = 0; e < 32; ++e) {
                const auto& pl = packets[p].segments[0].payload;
                row.push_back((pl[e / 8] >> (7 - e % 8)) & 1U);
            }
            x.push_back(row);
        }
        const auto m = oracle::solve(g, x, 1, 0x3);
        const oracle::Matrix t{{packets[target].coefficients[0], packets[target].coefficients[1]}};
        const auto re = oracle::matmul(t, m, 1, 0x3)[0];
        std::set<std::size_t> expected;
        for (std::size_t e = 0; e < 32; ++e) {
            const auto& pl = packets[target].segments[0].payload;
            if (re[e] != ((pl[e / 8] >> (7 - e % 8)) & 1U)) {
                expected.insert(e / 8);
            }
        }
        ASSERT_EQ(map.segments[0].symbols, (std::vector<std::size_t>(expected.begin(), expected.end())));
    }
}

TEST(Acr, Deterministic)
{
    const fixture::Generation gen(16, 3, 7, 6, 2, 3, 10);
    const auto [packets, reports] = gen.receive(gen.frames);
    const auto coeffs = coefficient_list(packets);
    const auto a = select_subset(std::span<const ValidityReport>(reports), coeffs, gen.field);
    const auto b = select_subset(std::span<const ValidityReport>(reports), coeffs, gen.field);
    EXPECT_EQ(a, b);
}

TEST(Acr, RejectsMalformedSelections)
{
    const fixture::Generation gen(2, 2, 4, 4, 1, 1, 11);
    EXPECT_THROW((void)acr_round(AcrSelection{{0}, 3}, gen.packets, gen.geometry), Error);
    EXPECT_THROW((void)acr_round(AcrSelection{{0, 1}, 9}, gen.packets, gen.geometry), Error);
    EXPECT_THROW((void)acr_segment_round(AcrSelection{{0, 1}, 3}, gen.packets, gen.geometry, 1), Error);
}
