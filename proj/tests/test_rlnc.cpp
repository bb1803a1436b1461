#include "oracles.hpp"

#include "sprac/error.hpp"
#include "sprac/rlnc.hpp"
#include "sprac/rng.hpp"

#include <gtest/gtest.h>

using namespace sprac;

namespace {

SymbolMatrix random_matrix(const Field& f, std::size_t rows, std::size_t cols, Rng& rng)
{
    SymbolMatrix m(f, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m.set(r, c, static_cast<Element>(rng() % f.order()));
        }
    }
    return m;
}

oracle::Matrix to_oracle(const SymbolMatrix& m)
{
    oracle::Matrix out(m.rows(), std::vector<unsigned>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            out[r][c] = m.at(r, c);
        }
    }
    return out;
}

SymbolMatrix random_invertible(const Field& f, std::size_t n, Rng& rng)
{
    for (;;) {
        auto g = random_matrix(f, n, n, rng);
        if (rank(g) == n) {
            return g;
        }
    }
}

GenerationConfig small_config(unsigned q, std::size_t k, std::size_t n)
{
    GenerationConfig c;
    c.field_size = q;
    c.originals = k;
    c.coded = n;
    c.generation_size = 4;
    c.symbol_size = 2;
    return c;
}

} // namespace

TEST(Rlnc, SystematicCoefficients)
{
    const auto config = small_config(2, 2, 3);
    const Field f(2);
    EXPECT_EQ(generate_coefficients(config, f, 0, 9), (CoefficientVector{1, 0}));
    EXPECT_EQ(generate_coefficients(config, f, 1, 9), (CoefficientVector{0, 1}));
    const auto a = generate_coefficients(config, f, 2, 9);
    EXPECT_EQ(a, generate_coefficients(config, f, 2, 9));
    EXPECT_NE(std::count(a.begin(), a.end(), 0), 2);
    EXPECT_THROW((void)generate_coefficients(config, f, 3, 9), Error);
}

TEST(Rlnc, RandomCoefficientsAreNeverZero)
{
    for (unsigned q : {2U, 4U, 256U}) {
        const Field f(q);
        const auto config = small_config(q, 1, 2000);
        for (std::size_t i = 1; i < config.coded; ++i) {
            ASSERT_NE(generate_coefficients(config, f, i, 3)[0], 0);
        }
    }
}

TEST(Rlnc, EncodeExamples)
{
    const Field f(2);
    const auto identity = SymbolMatrix::identity(f, 2);
    EXPECT_EQ(encode(identity, identity), identity);
    const auto g = SymbolMatrix::from_elements(f, 2, {{1, 1}});
    EXPECT_EQ(encode(identity, g), g);
    EXPECT_THROW((void)encode(identity, SymbolMatrix(f, 1, 3)), Error);
}

TEST(Rlnc, EncodeMatchesNaiveMultiply)
{
    Rng rng(21);
    for (unsigned q : {2U, 4U, 16U, 256U}) {
        const Field f(q);
        for (int trial = 0; trial < 25; ++trial) {
            const auto m = random_matrix(f, 4, 13, rng);
            const auto g = random_matrix(f, 7, 4, rng);
            const auto x = encode(m, g);
            ASSERT_EQ(to_oracle(x), oracle::matmul(to_oracle(g), to_oracle(m), f.degree(), f.polynomial()));
        }
    }
}

TEST(Rlnc, DecodeRoundTrip)
{
    Rng rng(22);
    for (int trial = 0; trial < 1000; ++trial) {
        const unsigned q = std::array{2U, 4U, 256U}[trial % 3];
        const Field f(q);
        const std::size_t k = 2 + rng() % 15;
        const auto m = random_matrix(f, k, 1 + rng() % 24, rng);
        const auto g = random_invertible(f, k, rng);
        ASSERT_EQ(decode(encode(m, g), g), m);
    }
}

TEST(Rlnc, DecodeMatchesIndependentSolver)
{
    Rng rng(23);
    const Field f(16);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = random_invertible(f, 5, rng);
        const auto x = random_matrix(f, 5, 6, rng);
        ASSERT_EQ(to_oracle(decode(x, g)), oracle::solve(to_oracle(g), to_oracle(x), f.degree(), f.polynomial()));
    }
}

TEST(Rlnc, DecodeRankDeficiency)
{
    const Field f(2);
    const auto identity = SymbolMatrix::identity(f, 3);
    EXPECT_EQ(decode(identity, identity), identity);
    const auto g = SymbolMatrix::from_elements(f, 3, {{1, 1, 0}, {1, 1, 0}, {0, 0, 1}});
    try {
        (void)decode(SymbolMatrix(f, 3, 8), g);
        FAIL() << "expected rank deficiency";
    } catch (const RankDeficientError& e) {
        EXPECT_EQ(e.achieved_rank(), 2U);
        EXPECT_EQ(e.required_rank(), 3U);
        EXPECT_EQ(e.code(), ErrorCode::rank_deficient);
    }
}

TEST(Rlnc, RankExamplesAndOracle)
{
    const Field f(2);
    EXPECT_EQ(rank(SymbolMatrix::identity(f, 6)), 6U);
    EXPECT_EQ(rank(SymbolMatrix(f, 5, 5)), 0U);
    Rng rng(24);
    for (unsigned q : {2U, 8U}) {
        const Field field(q);
        for (int trial = 0; trial < 200; ++trial) {
            const auto m = random_matrix(field, 8, 8, rng);
            ASSERT_EQ(rank(m), oracle::rank(to_oracle(m), field.degree(), field.polynomial()));
        }
    }
}

TEST(Rlnc, Linearity)
{
    Rng rng(25);
    for (int trial = 0; trial < 1000; ++trial) {
        const Field f(trial % 2 ? 2U : 256U);
        const auto m1 = random_matrix(f, 3, 10, rng);
        const auto m2 = random_matrix(f, 3, 10, rng);
        const auto g = random_matrix(f, 5, 3, rng);
        auto sum = m1;
        for (std::size_t r = 0; r < 3; ++r) {
            f.axpy(sum.row(r), m2.row(r), 1);
        }
        auto expected = encode(m1, g);
        const auto x2 = encode(m2, g);
        for (std::size_t r = 0; r < expected.rows(); ++r) {
            f.axpy(expected.row(r), x2.row(r), 1);
        }
        ASSERT_EQ(encode(sum, g), expected);
    }
}

TEST(Rlnc, SystematicPrefixEqualsOriginals)
{
    Rng rng(26);
    GenerationConfig config;
    config.originals = 5;
    config.coded = 12;
    const Field f(config.field_size);
    const auto m = random_matrix(f, config.originals, config.elements_per_packet(f), rng);
    const auto x = encode(m, coefficient_matrix(config, f, 77));
    for (std::size_t r = 0; r < config.originals; ++r) {
        EXPECT_TRUE(std::ranges::equal(x.row(r), m.row(r)));
    }
}

TEST(Rlnc, RankTracker)
{
    const Field f(2);
    RankTracker t(f, 3);
    const CoefficientVector a{1, 1, 0}, b{0, 1, 1}, c{1, 0, 1}, d{0, 0, 1};
    EXPECT_TRUE(t.try_add(a));
    EXPECT_TRUE(t.try_add(b));
    EXPECT_FALSE(t.try_add(c));   // a + b
    EXPECT_TRUE(t.try_add(d));
    EXPECT_EQ(t.rank(), 3U);
}

TEST(Rlnc, ConfigValidation)
{
    GenerationConfig c;
    c.coded = c.originals;
    EXPECT_THROW(c.validate(), Error);
    c.coded = 3;
    c.field_size = 256;
    c.symbol_size = 3;
    EXPECT_NO_THROW(c.validate());
    c.field_size = 8;   // 24 bits per symbol hold 8 elements of 3 bits
    EXPECT_NO_THROW(c.validate());
    c.field_size = 32;  // 24 bits are not a multiple of 5
    EXPECT_THROW(c.validate(), Error);
}
