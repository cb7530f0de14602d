#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minav/mlp.hpp"

namespace minav {

enum class NetRole : std::uint32_t { actor = 0, critic = 1, fqe = 2 };

struct Checkpoint {
    Mlp<float> actor;
    std::uint64_t step = 0;
    std::optional<double> fqe_score;
    std::uint64_t fingerprint = 0;
    NetRole role = NetRole::actor;
};

/// "MINC1", u32 version, u32 role, u32 head, u32 dim count, u32 dims...,
/// u64 step, u64 fingerprint, u8 has_score, f64 score, u32 param count,
/// f32 params..., CRC32. Integers and floats little-endian.
std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// `ckpt_<step>.bin`
std::string checkpoint_filename(std::uint64_t step);

}  // namespace minav
