#include "sprac/crc.hpp"

#include "sprac/error.hpp"

namespace sprac {

namespace {

std::uint32_t reflect(std::uint32_t value, unsigned bits) noexcept
{
    std::uint32_t out = 0;
    for (unsigned i = 0; i < bits; ++i) {
        out = (out << 1) | ((value >> i) & 1U);
    }
    return out;
}

} // namespace

Crc::Crc(const CrcSpec& spec) : spec_(spec)
{
    if (spec.width < 8 || spec.width > 32) {
        throw Error(ErrorCode::invalid_argument, "CRC width must be in 8..32");
    }
    mask_ = spec.width == 32 ? 0xFFFFFFFFU : ((1U << spec.width) - 1U);

    if (spec.reflect_in) {
        // LSB-first register: table indexed by the low byte.
        const std::uint32_t poly = reflect(spec.polynomial, spec.width);
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t r = i;
            for (int bit = 0; bit < 8; ++bit) {
                r = (r & 1U) ? (r >> 1) ^ poly : r >> 1;
            }
            table_[i] = r & mask_;
        }
    } else {
        // MSB-first register aligned to the top of the width.
        const std::uint32_t top = 1U << (spec.width - 1);
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t r = i << (spec.width - 8);
            for (int bit = 0; bit < 8; ++bit) {
                r = (r & top) ? (r << 1) ^ spec.polynomial : r << 1;
            }
            table_[i] = r & mask_;
        }
    }
}

std::uint32_t Crc::compute(std::span<const std::uint8_t> data) const noexcept
{
    std::uint32_t r;
    if (spec_.reflect_in) {
        r = reflect(spec_.init, spec_.width);
        for (const std::uint8_t byte : data) {
            r = (r >> 8) ^ table_[(r ^ byte) & 0xFFU];
        }
        if (!spec_.reflect_out) {
            r = reflect(r, spec_.width);
        }
    } else {
        r = spec_.init;
        const unsigned shift = spec_.width - 8;
        for (const std::uint8_t byte : data) {
            r = ((r << 8) ^ table_[((r >> shift) ^ byte) & 0xFFU]) & mask_;
        }
        if (spec_.reflect_out) {
            r = reflect(r, spec_.width);
        }
    }
    return (r ^ spec_.xor_out) & mask_;
}

const Crc& crc8_engine()
{
    static const Crc engine(kCrc8Spec);
    return engine;
}

const Crc& crc32_engine()
{
    static const Crc engine(kCrc32Spec);
    return engine;
}

std::uint8_t crc8(std::span<const std::uint8_t> data) noexcept
{
    return static_cast<std::uint8_t>(crc8_engine().compute(data));
}

std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept
{
    return crc32_engine().compute(data);
}

bool verify_crc8(std::span<const std::uint8_t> data, std::uint8_t expected) noexcept
{
    return crc8(data) == expected;
}

bool verify_crc32(std::span<const std::uint8_t> data, std::uint32_t expected) noexcept
{
    return crc32(data) == expected;
}

} // namespace sprac
