#pragma once

#include "sprac/channel.hpp"
#include "sprac/framing.hpp"
#include "sprac/rlnc.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace sprac::cli {

// Self-describing container for a generation's frames.
//
//   "SPRF" | version u8 | field_size u16 | originals u32 | generation_size u32
//   | symbol_size u32 | segment_count u32 | frame_count u32 | payload_length u64
//   | seed u64 | frame_count x (length u32 | frame bytes)
//
// All integers are big-endian.
struct FrameFile {
    GenerationConfig config;   // config.coded equals frames.size()
    std::size_t segment_count = 1;
    std::uint64_t payload_length = 0;
    std::uint64_t seed = 0;
    std::vector<Frame> frames;

    SegmentLayout layout() const { return SegmentLayout::for_config(config, segment_count); }
};

inline constexpr std::uint8_t kFrameFileVersion = 1;

std::vector<std::uint8_t> encode_frame_file(const FrameFile& file);
FrameFile decode_frame_file(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path);
void write_binary(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace sprac::cli
