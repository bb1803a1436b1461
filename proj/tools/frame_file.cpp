#include "frame_file.hpp"

#include "sprac/error.hpp"

#include <fstream>
#include <iterator>
#include <string>

namespace sprac::cli {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'R', 'F'};

void put(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes)
{
    for (int i = bytes - 1; i >= 0; --i) {
        out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t take(int bytes)
    {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t value = 0;
        for (int i = 0; i < bytes; ++i) {
            value = (value << 8) | bytes_[pos_++];
        }
        return value;
    }

    std::span<const std::uint8_t> take_span(std::size_t n)
    {
        need(n);
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    bool done() const noexcept { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const
    {
        if (bytes_.size() - pos_ < n) {
            throw Error(ErrorCode::format, "frame file is truncated");
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> encode_frame_file(const FrameFile& file)
{
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put(out, kFrameFileVersion, 1);
    put(out, file.config.field_size, 2);
    put(out, file.config.originals, 4);
    put(out, file.config.generation_size, 4);
    put(out, file.config.symbol_size, 4);
    put(out, file.segment_count, 4);
    put(out, file.frames.size(), 4);
    put(out, file.payload_length, 8);
    put(out, file.seed, 8);
    for (const auto& frame : file.frames) {
        put(out, frame.size(), 4);
        out.insert(out.end(), frame.begin(), frame.end());
    }
    return out;
}

FrameFile decode_frame_file(std::span<const std::uint8_t> bytes)
{
    Reader in(bytes);
    const auto magic = in.take_span(4);
    if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) {
        throw Error(ErrorCode::format, "not a frame file (bad magic)");
    }
    if (const auto version = in.take(1); version != kFrameFileVersion) {
        throw Error(ErrorCode::format, "unsupported frame file version " + std::to_string(version));
    }
    FrameFile file;
    file.config.field_size = static_cast<unsigned>(in.take(2));
    file.config.originals = in.take(4);
    file.config.generation_size = in.take(4);
    file.config.symbol_size = in.take(4);
    file.segment_count = in.take(4);
    file.config.coded = in.take(4);
    file.payload_length = in.take(8);
    file.seed = in.take(8);
    file.config.validate();

    const Field field(file.config.field_size);
    const FrameGeometry geometry(field, file.config.originals, file.layout());
    if (file.payload_length > file.config.originals * file.config.payload_bytes()) {
        throw Error(ErrorCode::format, "payload length exceeds the generation capacity");
    }
    for (std::size_t i = 0; i < file.config.coded; ++i) {
        const std::size_t length = in.take(4);
        if (length != geometry.frame_bytes()) {
            throw Error(ErrorCode::frame_length, "frame " + std::to_string(i) + " has " + std::to_string(length)
                                                     + " bytes, expected " + std::to_string(geometry.frame_bytes()));
        }
        const auto body = in.take_span(length);
        file.frames.emplace_back(body.begin(), body.end());
    }
    if (!in.done()) {
        throw Error(ErrorCode::format, "trailing bytes after the last frame");
    }
    return file;
}

std::vector<std::uint8_t> read_binary(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw Error(ErrorCode::io, "failed to read '" + path.string() + "'");
    }
    return bytes;
}

void write_binary(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::io, "failed to write '" + path.string() + "'");
    }
}

} // namespace sprac::cli
