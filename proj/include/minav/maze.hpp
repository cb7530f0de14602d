#pragma once

// Point-mass agent in an occupancy-grid maze. The world is immutable after
// construction; stepping is a pure function of (world, pose, action).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace minav {

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // [-pi, pi)

    bool operator==(const Pose&) const = default;
};

struct MazeParams {
    double cell_size = 1.0;
    double v_max = 0.5;
    double omega_max = 1.0;
    double dt = 0.5;
    std::size_t action_dims = 2;
};

struct Cell {
    int row = 0;
    int col = 0;
    bool operator==(const Cell&) const = default;
};

class MazeWorld {
public:
    /// `#` is a wall and `.` is free; rows must all have the same width.
    static MazeWorld from_ascii(std::string_view text, MazeParams params = {});
    static MazeWorld load(const std::string& path, MazeParams params = {});

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const MazeParams& params() const { return params_; }
    double cell_size() const { return params_.cell_size; }
    double agent_radius() const { return 0.2 * params_.cell_size; }
    double width_m() const { return cols_ * params_.cell_size; }
    double height_m() const { return rows_ * params_.cell_size; }

    /// Out-of-bounds cells count as walls.
    bool is_wall(int row, int col) const;
    bool is_wall(Cell c) const { return is_wall(c.row, c.col); }
    Cell cell_of(double x, double y) const;
    std::size_t free_cell_count() const;
    std::vector<Cell> free_cells() const;

    /// True when a disc of the agent radius centred at (x, y) overlaps a wall.
    bool collides(double x, double y) const;

    std::string to_ascii() const;

private:
    MazeWorld(int rows, int cols, std::vector<std::uint8_t> walls, MazeParams params);

    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> walls_;
    MazeParams params_;
};

/// Built-in layouts: "simple" (8x8 open room), "standard" (8x8 with interior
/// obstacles), "complex" (16x16 multi-room).
std::string_view preset_maze_ascii(std::string_view name);
MazeWorld preset_maze(std::string_view name, MazeParams params = {});

double wrap_angle(double theta);

/// Maps action components in [-1, 1] to (vx, vy, omega). Components are
/// clamped first; NaN components are treated as zero.
struct Velocity {
    double vx = 0.0;
    double vy = 0.0;
    double omega = 0.0;
};
Velocity action_to_velocity(const MazeWorld& world, std::span<const double> action);

Pose step(const MazeWorld& world, const Pose& pose, std::span<const double> action);

/// Uniform free pose whose disc clears every wall. The heading is uniform in
/// [-pi, pi) when `random_heading`, else 0.
Pose reset(const MazeWorld& world, std::uint64_t seed, bool random_heading = false);
/// Returns `pose` verbatim after checking it is collision-free.
Pose reset(const MazeWorld& world, const Pose& pose);

struct RayHit {
    double depth = 0.0;
    double hit_x = 0.0;
    double hit_y = 0.0;
    bool hit_wall = false;  // false when capped at max_range
    Cell cell{};
};

/// Rays spread over `fov` centred on the heading: ray i points at
/// theta - fov/2 + (i + 0.5) * fov / n_rays.
std::vector<RayHit> cast_rays(const MazeWorld& world, const Pose& pose, std::size_t n_rays,
                              double fov, double max_range);
std::vector<double> raycast(const MazeWorld& world, const Pose& pose, std::size_t n_rays,
                            double fov, double max_range);

/// Minimum traversal time between the cells containing `start` and `goal`
/// over the free-cell 8-neighbourhood, moving at the fastest speed available
/// along each edge direction. Diagonal moves may not cut wall corners.
/// Empty when the goal is unreachable.
std::optional<double> shortest_path_time(const MazeWorld& world, const Pose& start,
                                         const Pose& goal);

/// Cell sequence of a shortest path (inclusive of both ends); empty when unreachable.
std::vector<Cell> shortest_path_cells(const MazeWorld& world, Cell start, Cell goal);

}  // namespace minav
