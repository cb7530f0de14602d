#pragma once

// Episodic offline dataset of encoder outputs. Rewards are not stored: they are
// computed after goal relabeling at sample time.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace minav {

inline constexpr std::size_t kStackFrames = 4;

/// Ground-truth pose as stored on disk (metrics only, never a network input).
struct PoseRecord {
    float x = 0.0f;
    float y = 0.0f;
    float theta = 0.0f;
    bool operator==(const PoseRecord&) const = default;
};

class Episode {
public:
    Episode() = default;
    Episode(std::size_t dim, std::size_t action_dims) : dim_(dim), action_dims_(action_dims) {}

    std::size_t length() const { return ssd_.size(); }
    std::size_t dim() const { return dim_; }
    std::size_t action_dims() const { return action_dims_; }

    void push(std::span<const float> embedding, std::span<const float> action, PoseRecord pose,
              float ssd);

    std::span<const float> embedding(std::size_t t) const {
        return {embeddings_.data() + t * dim_, dim_};
    }
    std::span<const float> action(std::size_t t) const {
        return {actions_.data() + t * action_dims_, action_dims_};
    }
    const PoseRecord& pose(std::size_t t) const { return poses_[t]; }
    float ssd(std::size_t t) const { return ssd_[t]; }

    bool operator==(const Episode&) const = default;

private:
    std::size_t dim_ = 0;
    std::size_t action_dims_ = 0;
    std::vector<float> embeddings_;
    std::vector<float> actions_;
    std::vector<PoseRecord> poses_;
    std::vector<float> ssd_;
};

class OfflineDataset {
public:
    OfflineDataset() = default;
    OfflineDataset(std::size_t dim, std::size_t action_dims) : dim_(dim), action_dims_(action_dims) {}

    std::size_t dim() const { return dim_; }
    std::size_t action_dims() const { return action_dims_; }
    std::size_t episode_count() const { return episodes_.size(); }
    const Episode& episode(std::size_t i) const { return episodes_.at(i); }
    const std::vector<Episode>& episodes() const { return episodes_; }

    /// Throws dimension-mismatch when the episode shape differs.
    void add_episode(Episode episode);

    std::size_t total_steps() const;
    /// Steps that have a successor within their episode.
    std::size_t transition_count() const;
    bool empty() const { return total_steps() == 0; }

    bool operator==(const OfflineDataset&) const = default;

private:
    std::size_t dim_ = 0;
    std::size_t action_dims_ = 0;
    std::vector<Episode> episodes_;
};

/// Writes frames t-3..t of an episode into `out` (size 4 * dim), repeating
/// frame 0 for t < 3. Throws invalid-input when t is out of range.
void stack_state(const Episode& episode, std::size_t t, std::span<float> out);
std::vector<float> stack_state(const Episode& episode, std::size_t t);

/// Binary layout: "MINV1", u32 version, u32 dim, u32 action_dims, u32 episode
/// count, then per episode a u32 length followed by `length` records of
/// (dim + action_dims + 4) little-endian f32 (embedding, action, x, y, theta,
/// ssd), then a CRC32 of everything before it.
inline constexpr std::uint32_t kDatasetVersion = 1;

void save_dataset(const OfflineDataset& dataset, const std::string& path);
std::vector<std::uint8_t> serialize_dataset(const OfflineDataset& dataset);

/// `expected_dim` of 0 accepts any embedding size.
OfflineDataset load_dataset(const std::string& path, std::size_t expected_dim = 0);
OfflineDataset deserialize_dataset(std::span<const std::uint8_t> bytes, std::size_t expected_dim = 0);

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes);

}  // namespace minav
