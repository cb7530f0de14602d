#include "minav/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "minav/dataset.hpp"
#include "minav/error.hpp"

namespace minav {

namespace {

constexpr char kMagic[5] = {'M', 'I', 'N', 'C', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct Cursor {
    std::span<const std::uint8_t> in;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > in.size()) throw Error(ErrorCode::truncated_file, "checkpoint ends early");
    }
    std::uint64_t uint(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
        pos += static_cast<std::size_t>(bytes);
        return v;
    }
};

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
    std::vector<std::uint8_t> out(kMagic, kMagic + sizeof(kMagic));
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(ckpt.role));
    put_u32(out, static_cast<std::uint32_t>(ckpt.actor.head()));
    put_u32(out, static_cast<std::uint32_t>(ckpt.actor.dims().size()));
    for (auto d : ckpt.actor.dims()) put_u32(out, static_cast<std::uint32_t>(d));
    put_u64(out, ckpt.step);
    put_u64(out, ckpt.fingerprint);
    out.push_back(ckpt.fqe_score ? 1 : 0);
    put_u64(out, std::bit_cast<std::uint64_t>(ckpt.fqe_score.value_or(0.0)));
    put_u32(out, static_cast<std::uint32_t>(ckpt.actor.param_count()));
    for (float v : ckpt.actor.params()) put_u32(out, std::bit_cast<std::uint32_t>(v));
    put_u32(out, crc32_of(out));
    return out;
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw Error(ErrorCode::format_error, "not a checkpoint file (bad magic)");
    }
    Cursor c{bytes, sizeof(kMagic)};
    if (const auto v = c.uint(4); v != kVersion) {
        throw Error(ErrorCode::version_mismatch, "checkpoint version " + std::to_string(v));
    }
    Checkpoint ckpt;
    ckpt.role = static_cast<NetRole>(c.uint(4));
    const auto head = static_cast<OutputHead>(c.uint(4));
    const auto ndims = c.uint(4);
    if (ndims < 2 || ndims > 64) throw Error(ErrorCode::format_error, "implausible layer count");
    std::vector<std::size_t> dims;
    for (std::uint64_t i = 0; i < ndims; ++i) dims.push_back(c.uint(4));
    ckpt.step = c.uint(8);
    ckpt.fingerprint = c.uint(8);
    c.need(1);
    const bool has_score = bytes[c.pos++] != 0;
    const double score = std::bit_cast<double>(c.uint(8));
    if (has_score) ckpt.fqe_score = score;
    ckpt.actor = Mlp<float>(dims, head);
    const auto count = c.uint(4);
    if (count != ckpt.actor.param_count()) {
        throw Error(ErrorCode::format_error, "parameter count does not match layer dims");
    }
    c.need(4 * count);
    auto params = ckpt.actor.mutable_params();
    for (auto& p : params) p = std::bit_cast<float>(static_cast<std::uint32_t>(c.uint(4)));
    const std::size_t body = c.pos;
    const auto stored = static_cast<std::uint32_t>(c.uint(4));
    if (crc32_of(bytes.first(body)) != stored) {
        throw Error(ErrorCode::checksum_mismatch, "checkpoint CRC32 mismatch");
    }
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    const auto bytes = serialize_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

std::string checkpoint_filename(std::uint64_t step) {
    return "ckpt_" + std::to_string(step) + ".bin";
}

}  // namespace minav
