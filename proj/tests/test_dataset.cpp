#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "minav/dataset.hpp"
#include "minav/error.hpp"

using namespace minav;

namespace {

OfflineDataset make_dataset(std::size_t dim, std::uint64_t seed, std::vector<std::size_t> lengths) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> n01;
    OfflineDataset ds(dim, 2);
    for (auto len : lengths) {
        Episode ep(dim, 2);
        for (std::size_t t = 0; t < len; ++t) {
            std::vector<float> e(dim);
            float nn = 0.0f;
            for (auto& x : e) {
                x = n01(rng);
                nn += x * x;
            }
            for (auto& x : e) x /= std::sqrt(nn);
            const float a[2] = {n01(rng), n01(rng)};
            ep.push(e, a, {float(t), 0.5f, 0.1f}, std::abs(n01(rng)));
        }
        ds.add_episode(ep);
    }
    return ds;
}

ErrorCode code_of(const std::vector<std::uint8_t>& bytes, std::size_t expected_dim = 0) {
    try {
        deserialize_dataset(bytes, expected_dim);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::invalid_input;
}

}  // namespace

TEST_CASE("stack_state padding and order") {
    OfflineDataset ds(1, 2);
    Episode ep(1, 2);
    const float a[2] = {0, 0};
    for (int t = 0; t < 100; ++t) {
        const float e[1] = {float(t)};
        ep.push(e, a, {}, 0.1f);
    }
    CHECK(stack_state(ep, 0) == std::vector<float>{0, 0, 0, 0});
    CHECK(stack_state(ep, 1) == std::vector<float>{0, 0, 0, 1});
    CHECK(stack_state(ep, 3) == std::vector<float>{0, 1, 2, 3});
    CHECK(stack_state(ep, 99) == std::vector<float>{96, 97, 98, 99});
    CHECK_THROWS_AS(stack_state(ep, 100), Error);
}

TEST_CASE("episode and dataset shape checks") {
    Episode ep(3, 2);
    const float e[2] = {1, 0}, a[2] = {0, 0};
    CHECK_THROWS_AS(ep.push(e, a, {}, 0.1f), Error);
    OfflineDataset ds(4, 2);
    CHECK_THROWS_AS(ds.add_episode(Episode(3, 2)), Error);
    const auto d = make_dataset(4, 1, {5, 1, 7});
    CHECK(d.total_steps() == 13);
    CHECK(d.transition_count() == 10);
}

TEST_CASE("binary round trip") {
    const auto ds = make_dataset(16, 2, {30, 1, 12});
    const auto path = std::filesystem::temp_directory_path() / "minav_test_dataset.bin";
    save_dataset(ds, path.string());
    const auto back = load_dataset(path.string());
    CHECK(back == ds);
    CHECK(serialize_dataset(back) == serialize_dataset(ds));
    std::filesystem::remove(path);
}

TEST_CASE("corruptions map to distinct errors") {
    const auto bytes = serialize_dataset(make_dataset(16, 3, {10, 4}));

    auto magic = bytes;
    magic[0] = 'X';
    CHECK(code_of(magic) == ErrorCode::format_error);

    auto version = bytes;
    version[5] = 9;
    CHECK(code_of(version) == ErrorCode::version_mismatch);

    auto truncated = bytes;
    truncated.resize(bytes.size() - 9);
    CHECK(code_of(truncated) == ErrorCode::truncated_file);
    CHECK(code_of(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 7)) == ErrorCode::truncated_file);

    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x40;
    CHECK(code_of(flipped) == ErrorCode::checksum_mismatch);

    CHECK(code_of(bytes, 32) == ErrorCode::dimension_mismatch);
    CHECK_NOTHROW(deserialize_dataset(bytes, 16));

    CHECK_THROWS_AS(load_dataset("/nonexistent/minav.bin"), Error);
}

TEST_CASE("crc32 matches the standard check value") {
    const std::string s = "123456789";
    CHECK(crc32_of(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())) ==
          0xCBF43926u);
}
