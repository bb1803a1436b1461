#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

namespace sprac {

// A field element of GF(2^m), m <= 8. Always < Field::order() of its field.
using Element = std::uint8_t;

/// Arithmetic over GF(q), q = 2^m with 1 <= m <= 8.
///
/// GF(2) is handled without tables (add is XOR, mul is AND). Larger fields use
/// log/antilog tables built once from a primitive reduction polynomial.
///
/// Rows of elements are stored packed, MSB first: element i occupies bits
/// [i*m, (i+1)*m) of the byte string, bit 0 being the 0x80 bit of byte 0.
class Field {
public:
    /// Default reduction polynomial for GF(2^m); 0x11D for GF(256).
    static std::uint16_t default_polynomial(unsigned degree);

    /// @p q must be a power of two in [2, 256]. A zero @p polynomial selects
    /// the default. Throws Error(invalid_argument) for bad sizes or for a
    /// polynomial that is not primitive.
    explicit Field(unsigned q = 2, std::uint16_t polynomial = 0);

    unsigned order() const noexcept { return q_; }
    unsigned degree() const noexcept { return m_; }
    std::uint16_t polynomial() const noexcept { return polynomial_; }
    bool is_binary() const noexcept { return m_ == 1; }
    bool contains(unsigned value) const noexcept { return value < q_; }

    Element add(Element a, Element b) const noexcept { return static_cast<Element>(a ^ b); }
    Element sub(Element a, Element b) const noexcept { return add(a, b); }
    Element mul(Element a, Element b) const noexcept;
    /// Throws Error(no_inverse) for zero.
    Element inv(Element a) const;
    Element div(Element a, Element b) const { return mul(a, inv(b)); }

    // Packed row helpers.
    std::size_t packed_bytes(std::size_t count) const noexcept { return (count * m_ + 7) / 8; }
    Element get(std::span<const std::uint8_t> row, std::size_t index) const noexcept;
    void set(std::span<std::uint8_t> row, std::size_t index, Element value) const noexcept;

    /// dst += coefficient * src, element-wise over packed rows of equal length.
    void axpy(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src,
              Element coefficient) const noexcept;
    /// row *= coefficient.
    void scale(std::span<std::uint8_t> row, Element coefficient) const noexcept;

    friend bool operator==(const Field& a, const Field& b) noexcept
    {
        return a.q_ == b.q_ && a.polynomial_ == b.polynomial_;
    }

private:
    struct Tables {
        std::array<std::uint8_t, 512> exp{};
        std::array<std::uint16_t, 256> log{};
    };

    unsigned q_;
    unsigned m_;
    std::uint16_t polynomial_;
    std::shared_ptr<const Tables> tables_;
};

} // namespace sprac
