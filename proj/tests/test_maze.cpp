#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "minav/error.hpp"
#include "minav/maze.hpp"

using namespace minav;

namespace {


std::string open_room(int n) {
    std::string s;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) s += (r == 0 || c == 0 || r == n - 1 || c == n - 1) ? '#' : '.';
        s += '\n';
    }
    return s;
}

// Floyd-Warshall over free cells with the same move rules, written without
// the production priority queue.
double brute_force_time(const MazeWorld& w, Cell a, Cell b) {
    const int n = w.rows() * w.cols();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> d(std::size_t(n) * n, inf);
    auto id = [&](int r, int c) { return r * w.cols() + c; };
    const double edge = w.cell_size() / w.params().v_max;
    for (int r = 0; r < w.rows(); ++r)
        for (int c = 0; c < w.cols(); ++c) {
            if (w.is_wall(r, c)) continue;
            d[std::size_t(id(r, c)) * n + id(r, c)] = 0.0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc) {
                    if (!dr && !dc) continue;
                    if (w.is_wall(r + dr, c + dc)) continue;
                    if (dr && dc && (w.is_wall(r + dr, c) || w.is_wall(r, c + dc))) continue;
                    d[std::size_t(id(r, c)) * n + id(r + dr, c + dc)] = edge;
                }
        }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[std::size_t(i) * n + j] = std::min(d[std::size_t(i) * n + j],
                                                     d[std::size_t(i) * n + k] + d[std::size_t(k) * n + j]);
    return d[std::size_t(id(a.row, a.col)) * n + id(b.row, b.col)];
}

}  // namespace

TEST_CASE("loader") {
    const auto w = MazeWorld::from_ascii("####\n#..#\n####\n");
    CHECK(w.rows() == 3);
    CHECK(w.cols() == 4);
    CHECK(w.free_cell_count() == 2);
    CHECK(w.to_ascii() == "####\n#..#\n####\n");
    CHECK_THROWS_AS(MazeWorld::from_ascii("####\n#..\n####\n"), Error);
    CHECK_THROWS_AS(MazeWorld::from_ascii("####\n#...\n####\n"), Error);
    CHECK_THROWS_AS(MazeWorld::from_ascii("####\n####\n"), Error);
    CHECK_THROWS_AS(MazeWorld::from_ascii("####\n#x.#\n####\n"), Error);
    for (auto name : {"simple", "standard", "complex"}) CHECK_NOTHROW(preset_maze(name));
    CHECK(preset_maze("complex").rows() == 16);
}

TEST_CASE("step kinematics") {
    const auto w = preset_maze("simple");
    const Pose p{3.5, 3.5, 0.0};
    const double zero[2] = {0.0, 0.0};
    CHECK(step(w, p, zero) == p);
    const double fwd[2] = {1.0, 0.0};
    const Pose q = step(w, p, fwd);
    CHECK(q.x == doctest::Approx(3.75).epsilon(1e-12));
    CHECK(q.y == p.y);
    const double big[2] = {7.0, std::nan("")};
    CHECK(step(w, p, big) == q);

    MazeParams p3;
    p3.action_dims = 3;
    const auto w3 = preset_maze("simple", p3);
    const double turn[3] = {-1.0, 0.0, 1.0};
    const Pose r = step(w3, {3.5, 3.5, 0.0}, turn);
    CHECK(r.x == p.x);  // surge maps to [0, v_max]; -1 is standstill
    CHECK(r.theta == doctest::Approx(0.5));
    const double surge[3] = {1.0, 0.0, 0.0};
    const Pose s = step(w3, {3.5, 3.5, std::numbers::pi / 2}, surge);
    CHECK(s.y == doctest::Approx(3.75));
    CHECK(s.x == doctest::Approx(3.5));
}

TEST_CASE("wall contact cancels only the blocked axis") {
    // Vertical corridor one cell wide; wall face at x = 2.
    const auto w = MazeWorld::from_ascii("###\n#.#\n#.#\n#.#\n#.#\n###\n");
    const double r = w.agent_radius();
    const Pose start{2.0 - r - 1e-9, 2.5, 0.0};
    REQUIRE_FALSE(w.collides(start.x, start.y));
    const double push[2] = {1.0, 1.0};
    const Pose got = step(w, start, push);

    // Fine-step oracle: 1000 substeps, each axis move rejected when it overlaps.
    Pose o = start;
    const double dx = 0.5 * 0.5 / 1000, dy = dx;
    for (int i = 0; i < 1000; ++i) {
        if (!w.collides(o.x + dx, o.y)) o.x += dx;
        if (!w.collides(o.x, o.y + dy)) o.y += dy;
    }
    CHECK(got.x == doctest::Approx(o.x).epsilon(1e-6));
    CHECK(got.x == start.x);
    CHECK(got.y == doctest::Approx(o.y).epsilon(1e-9));
    CHECK(got.y == doctest::Approx(2.75));
}

TEST_CASE("reset") {
    const auto w = preset_maze("complex");
    const Pose fixed{1.5, 1.5, 0.3};
    CHECK(reset(w, fixed) == fixed);
    CHECK_THROWS_AS(reset(w, Pose{0.5, 0.5, 0.0}), Error);
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const Pose p = reset(w, s, true);
        CHECK_FALSE(w.collides(p.x, p.y));
        CHECK(p.theta >= -std::numbers::pi);
        CHECK(p.theta < std::numbers::pi);
    }
    CHECK(reset(w, 99) == reset(w, 99));
    CHECK(reset(w, 99).theta == 0.0);
}

TEST_CASE("random walk never enters a wall") {
    for (std::size_t dims : {2u, 3u}) {
        MazeParams prm;
        prm.action_dims = dims;
        const auto w = preset_maze("standard", prm);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Pose p = reset(w, 1, dims == 3);
        const double bound = std::sqrt(2.0) * prm.v_max * prm.dt + 1e-12;
        double a[3];
        for (int i = 0; i < 500000; ++i) {
            for (auto& x : a) x = u(rng);
            const Pose q = step(w, p, std::span<const double>(a, dims));
            REQUIRE_FALSE(w.collides(q.x, q.y));
            REQUIRE(std::hypot(q.x - p.x, q.y - p.y) <= bound);
            p = q;
        }
    }
}

TEST_CASE("raycast") {
    const auto w = MazeWorld::from_ascii(open_room(5));  // free interior spans [1, 4]
    const auto d = raycast(w, {3.0, 2.5, 0.0}, 1, 1.0, 10.0);
    CHECK(d[0] == doctest::Approx(1.0).epsilon(1e-9));

    const auto room = MazeWorld::from_ascii(open_room(20));
    for (double depth : raycast(room, {10.0, 10.0, 0.7}, 16, 2.0, 3.0)) CHECK(depth == 3.0);

    // 45 degrees from (1.3, 2.6): first wall face is y = 4 after 1.4 in y.
    const auto diag = raycast(w, {1.3, 2.6, std::numbers::pi / 4}, 1, 0.5, 10.0);
    CHECK(diag[0] == doctest::Approx(1.4 * std::sqrt(2.0)).epsilon(1e-9));
    // Exactly through the corner point (4, 4).
    const auto corner = raycast(w, {2.5, 2.5, std::numbers::pi / 4}, 1, 0.5, 10.0);
    CHECK(corner[0] == doctest::Approx(1.5 * std::sqrt(2.0)).epsilon(1e-9));

    const auto hits = cast_rays(w, {2.5, 2.5, 0.0}, 8, 2.0 * std::numbers::pi / 3, 10.0);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].hit_wall);
        CHECK(w.is_wall(hits[i].cell));
        CHECK(hits[i].depth == doctest::Approx(std::hypot(hits[i].hit_x - 2.5, hits[i].hit_y - 2.5)));
    }
    CHECK_THROWS_AS(raycast(w, {2.5, 2.5, 0.0}, 0, 1.0, 1.0), Error);
}

TEST_CASE("shortest path time") {
    const auto w = preset_maze("standard");
    CHECK(*shortest_path_time(w, {1.2, 1.2, 0}, {1.8, 1.7, 0}) == 0.0);
    CHECK(*shortest_path_time(w, {1.5, 1.5, 0}, {2.5, 1.5, 0}) == doctest::Approx(2.0));

    // L-shaped three-cell path.
    const auto l = MazeWorld::from_ascii("####\n#..#\n##.#\n####\n");
    const double t = *shortest_path_time(l, {1.5, 1.5, 0}, {2.5, 2.5, 0});
    CHECK(t == doctest::Approx(brute_force_time(l, {1, 1}, {2, 2})));
    CHECK(t == doctest::Approx(4.0));  // the corner may not be cut

    std::mt19937_64 rng(2);
    const auto cells = w.free_cells();
    for (int i = 0; i < 30; ++i) {
        const Cell a = cells[rng() % cells.size()], b = cells[rng() % cells.size()];
        const Pose pa{(a.col + 0.5), (a.row + 0.5), 0}, pb{(b.col + 0.5), (b.row + 0.5), 0};
        const double ab = *shortest_path_time(w, pa, pb);
        CHECK(ab == doctest::Approx(brute_force_time(w, a, b)));
        CHECK(ab == *shortest_path_time(w, pb, pa));
        const auto path = shortest_path_cells(w, a, b);
        CHECK(path.front() == a);
        CHECK(path.back() == b);
        CHECK(double(path.size() - 1) * 2.0 == doctest::Approx(ab));
    }

    const auto split = MazeWorld::from_ascii("#####\n#.#.#\n#####\n");
    CHECK_FALSE(shortest_path_time(split, {1.5, 1.5, 0}, {3.5, 1.5, 0}).has_value());
    CHECK(shortest_path_cells(split, {1, 1}, {1, 3}).empty());
}

TEST_CASE("wrap_angle") {
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(-std::numbers::pi));
    CHECK(wrap_angle(3 * std::numbers::pi + 0.1) == doctest::Approx(-std::numbers::pi + 0.1));
    for (double a = -20.0; a < 20.0; a += 0.37) {
        const double w = wrap_angle(a);
        CHECK(w >= -std::numbers::pi);
        CHECK(w < std::numbers::pi);
    }
}
