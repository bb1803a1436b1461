#include "sprac/galois.hpp"

#include "sprac/error.hpp"

#include <bit>
#include <string>

namespace sprac {

namespace {

constexpr std::array<std::uint16_t, 9> kDefaultPolynomials = {
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D,
};

// Carry-less multiply with reduction; only used to build the tables.
unsigned slow_mul(unsigned a, unsigned b, unsigned m, unsigned polynomial)
{
    unsigned product = 0;
    for (; b != 0; b >>= 1) {
        if (b & 1U) {
            product ^= a;
        }
        a <<= 1;
        if (a >> m) {
            a ^= polynomial;
        }
    }
    return product;
}

} // namespace

std::uint16_t Field::default_polynomial(unsigned degree)
{
    if (degree < 1 || degree > 8) {
        throw Error(ErrorCode::invalid_argument,
                    "field degree must be in 1..8, got " + std::to_string(degree));
    }
    return kDefaultPolynomials[degree];
}

Field::Field(unsigned q, std::uint16_t polynomial) : q_(q)
{
    if (q < 2 || q > 256 || !std::has_single_bit(q)) {
        throw Error(ErrorCode::invalid_argument,
                    "field size must be a power of two in [2, 256], got " + std::to_string(q));
    }
    m_ = static_cast<unsigned>(std::countr_zero(q));
    polynomial_ = polynomial == 0 ? default_polynomial(m_) : polynomial;
    if ((polynomial_ >> m_) != 1) {
        throw Error(ErrorCode::invalid_argument, "reduction polynomial degree does not match field");
    }
    if (m_ == 1) {
        return;
    }

    // Log/antilog tables over the first generator of the multiplicative
    // group. No generator exists when the polynomial is reducible.
    auto tables = std::make_shared<Tables>();
    bool built = false;
    for (unsigned g = 2; g < q_ && !built; ++g) {
        unsigned x = 1;
        unsigned i = 0;
        for (; i < q_ - 1; ++i) {
            if (i > 0 && x == 1) {
                break;
            }
            tables->exp[i] = static_cast<std::uint8_t>(x);
            tables->log[x] = static_cast<std::uint16_t>(i);
            x = slow_mul(x, g, m_, polynomial_);
        }
        built = i == q_ - 1 && x == 1;
    }
    if (!built) {
        throw Error(ErrorCode::invalid_argument, "reduction polynomial is not irreducible");
    }
    // Doubled table so mul can skip the modulo.
    for (unsigned i = q_ - 1; i < tables->exp.size(); ++i) {
        tables->exp[i] = tables->exp[i - (q_ - 1)];
    }
    tables_ = std::move(tables);
}

Element Field::mul(Element a, Element b) const noexcept
{
    if (a == 0 || b == 0) {
        return 0;
    }
    if (m_ == 1) {
        return 1;
    }
    return tables_->exp[tables_->log[a] + tables_->log[b]];
}

Element Field::inv(Element a) const
{
    if (a == 0) {
        throw Error(ErrorCode::no_inverse, "no inverse of zero");
    }
    if (m_ == 1) {
        return 1;
    }
    return tables_->exp[(q_ - 1 - tables_->log[a]) % (q_ - 1)];
}

Element Field::get(std::span<const std::uint8_t> row, std::size_t index) const noexcept
{
    const std::size_t bit = index * m_;
    const std::size_t byte = bit / 8;
    const unsigned offset = static_cast<unsigned>(bit % 8);
    const unsigned mask = q_ - 1;
    if (offset + m_ <= 8) {
        return static_cast<Element>((row[byte] >> (8 - offset - m_)) & mask);
    }
    const unsigned window = (static_cast<unsigned>(row[byte]) << 8) | row[byte + 1];
    return static_cast<Element>((window >> (16 - offset - m_)) & mask);
}

void Field::set(std::span<std::uint8_t> row, std::size_t index, Element value) const noexcept
{
    const std::size_t bit = index * m_;
    const std::size_t byte = bit / 8;
    const unsigned offset = static_cast<unsigned>(bit % 8);
    const unsigned mask = q_ - 1;
    if (offset + m_ <= 8) {
        const unsigned shift = 8 - offset - m_;
        row[byte] = static_cast<std::uint8_t>((row[byte] & ~(mask << shift)) | ((value & mask) << shift));
        return;
    }
    const unsigned shift = 16 - offset - m_;
    unsigned window = (static_cast<unsigned>(row[byte]) << 8) | row[byte + 1];
    window = (window & ~(mask << shift)) | ((value & mask) << shift);
    row[byte] = static_cast<std::uint8_t>(window >> 8);
    row[byte + 1] = static_cast<std::uint8_t>(window);
}

void Field::axpy(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src,
                 Element coefficient) const noexcept
{
    if (coefficient == 0) {
        return;
    }
    const std::size_t n = dst.size() < src.size() ? dst.size() : src.size();
    if (m_ == 1 || coefficient == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            dst[i] ^= src[i];
        }
        return;
    }
    if (m_ == 8) {
        const unsigned log_c = tables_->log[coefficient];
        for (std::size_t i = 0; i < n; ++i) {
            if (src[i] != 0) {
                dst[i] ^= tables_->exp[log_c + tables_->log[src[i]]];
            }
        }
        return;
    }
    const std::size_t count = n * 8 / m_;
    for (std::size_t i = 0; i < count; ++i) {
        const Element s = get(src, i);
        if (s != 0) {
            set(dst, i, add(get(dst, i), mul(coefficient, s)));
        }
    }
}

void Field::scale(std::span<std::uint8_t> row, Element coefficient) const noexcept
{
    if (coefficient == 1) {
        return;
    }
    if (coefficient == 0) {
        for (auto& b : row) {
            b = 0;
        }
        return;
    }
    // GF(2) has no other coefficient.
    const std::size_t count = row.size() * 8 / m_;
    for (std::size_t i = 0; i < count; ++i) {
        set(row, i, mul(coefficient, get(row, i)));
    }
}

} // namespace sprac
