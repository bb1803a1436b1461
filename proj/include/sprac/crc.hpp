#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sprac {

/// Rocksoft-style CRC parameterization, width 8..32.
struct CrcSpec {
    unsigned width;
    std::uint32_t polynomial;
    std::uint32_t init;
    bool reflect_in;
    bool reflect_out;
    std::uint32_t xor_out;
};

/// Inner per-segment code. Check value 0xF4.
inline constexpr CrcSpec kCrc8Spec{8, 0x07, 0x00, false, false, 0x00};
/// Outer per-packet code (IEEE 802.3). Check value 0xCBF43926.
inline constexpr CrcSpec kCrc32Spec{32, 0x04C11DB7, 0xFFFFFFFF, true, true, 0xFFFFFFFF};

/// Table-driven CRC engine. Immutable after construction.
class Crc {
public:
    explicit Crc(const CrcSpec& spec);

    const CrcSpec& spec() const noexcept { return spec_; }

    std::uint32_t compute(std::span<const std::uint8_t> data) const noexcept;
    bool verify(std::span<const std::uint8_t> data, std::uint32_t expected) const noexcept
    {
        return compute(data) == expected;
    }

private:
    CrcSpec spec_;
    std::uint32_t mask_;
    std::array<std::uint32_t, 256> table_{};
};

const Crc& crc8_engine();
const Crc& crc32_engine();

std::uint8_t crc8(std::span<const std::uint8_t> data) noexcept;
std::uint32_t crc32(std::span<const std::uint8_t> data) noexcept;
bool verify_crc8(std::span<const std::uint8_t> data, std::uint8_t expected) noexcept;
bool verify_crc32(std::span<const std::uint8_t> data, std::uint32_t expected) noexcept;

inline std::span<const std::uint8_t> as_bytes(std::string_view text) noexcept
{
    return {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()};
}

} // namespace sprac
