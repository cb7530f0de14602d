#include "minav/dataset.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "minav/error.hpp"

namespace minav {

namespace {

constexpr char kMagic[5] = {'M', 'I', 'N', 'V', '1'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
    std::vector<std::uint8_t>& data() { return out_; }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
    bool has(std::size_t n) const { return pos_ + n <= in_.size(); }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::size_t pos() const { return pos_; }

private:
    void need(std::size_t n) const {
        if (!has(n)) throw Error(ErrorCode::truncated_file, "dataset file ends early");
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

void Episode::push(std::span<const float> embedding, std::span<const float> action,
                   PoseRecord pose, float ssd) {
    if (embedding.size() != dim_ || action.size() != action_dims_) {
        throw Error(ErrorCode::dimension_mismatch, "episode record shape mismatch");
    }
    embeddings_.insert(embeddings_.end(), embedding.begin(), embedding.end());
    actions_.insert(actions_.end(), action.begin(), action.end());
    poses_.push_back(pose);
    ssd_.push_back(ssd);
}

void OfflineDataset::add_episode(Episode episode) {
    if (episode.dim() != dim_ || episode.action_dims() != action_dims_) {
        throw Error(ErrorCode::dimension_mismatch, "episode shape does not match dataset");
    }
    episodes_.push_back(std::move(episode));
}

std::size_t OfflineDataset::total_steps() const {
    std::size_t n = 0;
    for (const auto& e : episodes_) n += e.length();
    return n;
}

std::size_t OfflineDataset::transition_count() const {
    std::size_t n = 0;
    for (const auto& e : episodes_) n += e.length() > 0 ? e.length() - 1 : 0;
    return n;
}

void stack_state(const Episode& episode, std::size_t t, std::span<float> out) {
    if (t >= episode.length()) throw Error(ErrorCode::invalid_input, "stack index out of range");
    const std::size_t dim = episode.dim();
    if (out.size() != kStackFrames * dim) {
        throw Error(ErrorCode::dimension_mismatch, "stacked state buffer has wrong size");
    }
    for (std::size_t k = 0; k < kStackFrames; ++k) {
        const std::size_t back = kStackFrames - 1 - k;
        const std::size_t src = t >= back ? t - back : 0;
        const auto frame = episode.embedding(src);
        std::copy(frame.begin(), frame.end(), out.begin() + static_cast<std::ptrdiff_t>(k * dim));
    }
}

std::vector<float> stack_state(const Episode& episode, std::size_t t) {
    std::vector<float> out(kStackFrames * episode.dim());
    stack_state(episode, t, out);
    return out;
}

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    std::size_t off = 0;
    while (off < bytes.size()) {
        const std::size_t n = std::min<std::size_t>(bytes.size() - off, 1u << 30);
        crc = ::crc32(crc, bytes.data() + off, static_cast<uInt>(n));
        off += n;
    }
    return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> serialize_dataset(const OfflineDataset& dataset) {
    Writer w;
    w.bytes(kMagic, sizeof(kMagic));
    w.u32(kDatasetVersion);
    w.u32(static_cast<std::uint32_t>(dataset.dim()));
    w.u32(static_cast<std::uint32_t>(dataset.action_dims()));
    w.u32(static_cast<std::uint32_t>(dataset.episode_count()));
    for (const auto& ep : dataset.episodes()) {
        w.u32(static_cast<std::uint32_t>(ep.length()));
        for (std::size_t t = 0; t < ep.length(); ++t) {
            for (float v : ep.embedding(t)) w.f32(v);
            for (float v : ep.action(t)) w.f32(v);
            w.f32(ep.pose(t).x);
            w.f32(ep.pose(t).y);
            w.f32(ep.pose(t).theta);
            w.f32(ep.ssd(t));
        }
    }
    const std::uint32_t crc = crc32_of(w.data());
    w.u32(crc);
    return std::move(w.data());
}

OfflineDataset deserialize_dataset(std::span<const std::uint8_t> bytes, std::size_t expected_dim) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw Error(ErrorCode::format_error, "not a dataset file (bad magic)");
    }
    Reader r(bytes.subspan(sizeof(kMagic)));
    const std::uint32_t version = r.u32();
    if (version != kDatasetVersion) {
        throw Error(ErrorCode::version_mismatch,
                    "dataset version " + std::to_string(version) + " unsupported");
    }
    const std::uint32_t dim = r.u32();
    const std::uint32_t action_dims = r.u32();
    const std::uint32_t episodes = r.u32();
    if (expected_dim != 0 && dim != expected_dim) {
        throw Error(ErrorCode::dimension_mismatch, "dataset embedding dim " + std::to_string(dim) +
                                                       " != expected " +
                                                       std::to_string(expected_dim));
    }
    OfflineDataset ds(dim, action_dims);
    std::vector<float> emb(dim), act(action_dims);
    const std::size_t record_bytes = 4ull * (dim + action_dims + 4);
    for (std::uint32_t e = 0; e < episodes; ++e) {
        const std::uint32_t length = r.u32();
        if (!r.has(record_bytes * length)) {
            throw Error(ErrorCode::truncated_file, "dataset file ends inside an episode");
        }
        Episode ep(dim, action_dims);
        for (std::uint32_t t = 0; t < length; ++t) {
            for (auto& v : emb) v = r.f32();
            for (auto& v : act) v = r.f32();
            PoseRecord pose;
            pose.x = r.f32();
            pose.y = r.f32();
            pose.theta = r.f32();
            const float ssd = r.f32();
            ep.push(emb, act, pose, ssd);
        }
        ds.add_episode(std::move(ep));
    }
    const std::size_t body = sizeof(kMagic) + r.pos();
    const std::uint32_t stored = r.u32();
    if (crc32_of(bytes.first(body)) != stored) {
        throw Error(ErrorCode::checksum_mismatch, "dataset CRC32 mismatch");
    }
    if (r.has(1)) throw Error(ErrorCode::format_error, "trailing bytes after dataset CRC");
    return ds;
}

void save_dataset(const OfflineDataset& dataset, const std::string& path) {
    const auto bytes = serialize_dataset(dataset);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

OfflineDataset load_dataset(const std::string& path, std::size_t expected_dim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_dataset(bytes, expected_dim);
}

}  // namespace minav
