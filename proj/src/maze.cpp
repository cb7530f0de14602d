#include "minav/maze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "minav/error.hpp"
#include "minav/rng.hpp"

namespace minav {

namespace {

constexpr std::string_view kSimple =
    "########\n"
    "#......#\n"
    "#......#\n"
    "#......#\n"
    "#......#\n"
    "#......#\n"
    "#......#\n"
    "########\n";

constexpr std::string_view kStandard =
    "########\n"
    "#......#\n"
    "#.##...#\n"
    "#.#..#.#\n"
    "#....#.#\n"
    "#..#...#\n"
    "#......#\n"
    "########\n";

constexpr std::string_view kComplex =
    "################\n"
    "#......#.......#\n"
    "#......#.......#\n"
    "#..#...#...#...#\n"
    "#..#...........#\n"
    "#......#...#...#\n"
    "#......#.......#\n"
    "###.######.#####\n"
    "#......#.......#\n"
    "#......#...#...#\n"
    "#..##..#...#...#\n"
    "#..............#\n"
    "#......#.......#\n"
    "#......#..##...#\n"
    "#......#.......#\n"
    "################\n";

}  // namespace

MazeWorld::MazeWorld(int rows, int cols, std::vector<std::uint8_t> walls, MazeParams params)
    : rows_(rows), cols_(cols), walls_(std::move(walls)), params_(params) {}

MazeWorld MazeWorld::from_ascii(std::string_view text, MazeParams params) {
    if (!(params.cell_size > 0.0)) throw Error(ErrorCode::invalid_config, "cell_size must be > 0");
    if (!(params.dt > 0.0)) throw Error(ErrorCode::invalid_config, "dt must be > 0");
    if (!(params.v_max > 0.0)) throw Error(ErrorCode::invalid_config, "v_max must be > 0");
    if (params.action_dims != 2 && params.action_dims != 3) {
        throw Error(ErrorCode::invalid_config, "action_dims must be 2 or 3");
    }
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw Error(ErrorCode::format_error, "maze has no rows");
    const std::size_t width = lines.front().size();
    std::vector<std::uint8_t> walls;
    walls.reserve(lines.size() * width);
    for (std::size_t r = 0; r < lines.size(); ++r) {
        if (lines[r].size() != width) {
            throw Error(ErrorCode::format_error, "ragged maze row " + std::to_string(r));
        }
        for (char ch : lines[r]) {
            if (ch == '#') {
                walls.push_back(1);
            } else if (ch == '.') {
                walls.push_back(0);
            } else {
                throw Error(ErrorCode::format_error, std::string("unexpected maze character '") +
                                                         ch + "'");
            }
        }
    }
    const int rows = static_cast<int>(lines.size());
    const int cols = static_cast<int>(width);
    MazeWorld world(rows, cols, std::move(walls), params);
    for (int c = 0; c < cols; ++c) {
        if (!world.is_wall(0, c) || !world.is_wall(rows - 1, c)) {
            throw Error(ErrorCode::format_error, "maze boundary must be walled");
        }
    }
    for (int r = 0; r < rows; ++r) {
        if (!world.is_wall(r, 0) || !world.is_wall(r, cols - 1)) {
            throw Error(ErrorCode::format_error, "maze boundary must be walled");
        }
    }
    if (world.free_cell_count() == 0) throw Error(ErrorCode::no_free_cell, "maze has no free cell");
    return world;
}

MazeWorld MazeWorld::load(const std::string& path, MazeParams params) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open maze file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_ascii(ss.str(), params);
}

bool MazeWorld::is_wall(int row, int col) const {
    if (row < 0 || col < 0 || row >= rows_ || col >= cols_) return true;
    return walls_[static_cast<std::size_t>(row) * cols_ + col] != 0;
}

Cell MazeWorld::cell_of(double x, double y) const {
    return {static_cast<int>(std::floor(y / params_.cell_size)),
            static_cast<int>(std::floor(x / params_.cell_size))};
}

std::size_t MazeWorld::free_cell_count() const {
    return static_cast<std::size_t>(std::count(walls_.begin(), walls_.end(), 0));
}

std::vector<Cell> MazeWorld::free_cells() const {
    std::vector<Cell> out;
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) {
            if (!is_wall(r, c)) out.push_back({r, c});
        }
    }
    return out;
}

bool MazeWorld::collides(double x, double y) const {
    const double rad = agent_radius();
    const double cs = params_.cell_size;
    const int c0 = static_cast<int>(std::floor((x - rad) / cs));
    const int c1 = static_cast<int>(std::floor((x + rad) / cs));
    const int r0 = static_cast<int>(std::floor((y - rad) / cs));
    const int r1 = static_cast<int>(std::floor((y + rad) / cs));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            if (!is_wall(r, c)) continue;
            const double nx = std::clamp(x, c * cs, (c + 1) * cs);
            const double ny = std::clamp(y, r * cs, (r + 1) * cs);
            const double dx = x - nx, dy = y - ny;
            if (dx * dx + dy * dy < rad * rad) return true;
        }
    }
    return false;
}

std::string MazeWorld::to_ascii() const {
    std::string out;
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < cols_; ++c) out.push_back(is_wall(r, c) ? '#' : '.');
        out.push_back('\n');
    }
    return out;
}

std::string_view preset_maze_ascii(std::string_view name) {
    if (name == "simple") return kSimple;
    if (name == "standard") return kStandard;
    if (name == "complex") return kComplex;
    throw Error(ErrorCode::invalid_config, "unknown maze preset '" + std::string(name) + "'");
}

MazeWorld preset_maze(std::string_view name, MazeParams params) {
    return MazeWorld::from_ascii(preset_maze_ascii(name), params);
}

double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(theta + std::numbers::pi, two_pi);
    if (w < 0.0) w += two_pi;
    w -= std::numbers::pi;
    // fmod can round up to exactly +pi.
    if (w >= std::numbers::pi) w -= two_pi;
    return w;
}

Velocity action_to_velocity(const MazeWorld& world, std::span<const double> action) {
    const auto& p = world.params();
    auto comp = [&](std::size_t i) {
        if (i >= action.size()) return 0.0;
        const double a = action[i];
        return std::isnan(a) ? 0.0 : std::clamp(a, -1.0, 1.0);
    };
    Velocity v;
    if (p.action_dims == 3) {
        v.vx = 0.5 * (comp(0) + 1.0) * p.v_max;
        v.vy = comp(1) * p.v_max;
        v.omega = comp(2) * p.omega_max;
    } else {
        v.vx = comp(0) * p.v_max;
        v.vy = comp(1) * p.v_max;
    }
    return v;
}

Pose step(const MazeWorld& world, const Pose& pose, std::span<const double> action) {
    const auto& p = world.params();
    const Velocity v = action_to_velocity(world, action);
    double dx = 0.0, dy = 0.0;
    if (p.action_dims == 3) {
        const double c = std::cos(pose.theta), s = std::sin(pose.theta);
        dx = (c * v.vx - s * v.vy) * p.dt;
        dy = (s * v.vx + c * v.vy) * p.dt;
    } else {
        dx = v.vx * p.dt;
        dy = v.vy * p.dt;
    }
    Pose next = pose;
    if (dx != 0.0 && !world.collides(next.x + dx, next.y)) next.x += dx;
    if (dy != 0.0 && !world.collides(next.x, next.y + dy)) next.y += dy;
    next.theta = wrap_angle(pose.theta + v.omega * p.dt);
    return next;
}

Pose reset(const MazeWorld& world, std::uint64_t seed, bool random_heading) {
    const auto cells = world.free_cells();
    if (cells.empty()) throw Error(ErrorCode::no_free_cell, "maze has no free cell");
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double cs = world.cell_size();
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const Cell c = cells[pick(rng)];
        const double x = (c.col + unit(rng)) * cs;
        const double y = (c.row + unit(rng)) * cs;
        if (world.collides(x, y)) continue;
        const double theta =
            random_heading ? wrap_angle((unit(rng) * 2.0 - 1.0) * std::numbers::pi) : 0.0;
        return {x, y, theta};
    }
    throw Error(ErrorCode::no_free_cell, "no collision-free pose found");
}

Pose reset(const MazeWorld& world, const Pose& pose) {
    if (!std::isfinite(pose.x) || !std::isfinite(pose.y) || world.collides(pose.x, pose.y)) {
        throw Error(ErrorCode::invalid_input, "reset pose is not collision-free");
    }
    return pose;
}

std::vector<RayHit> cast_rays(const MazeWorld& world, const Pose& pose, std::size_t n_rays,
                              double fov, double max_range) {
    if (n_rays == 0) throw Error(ErrorCode::invalid_config, "n_rays must be >= 1");
    const double cs = world.cell_size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<RayHit> hits(n_rays);
    for (std::size_t i = 0; i < n_rays; ++i) {
        const double angle =
            pose.theta - fov / 2.0 + (static_cast<double>(i) + 0.5) * fov / double(n_rays);
        const double ux = std::cos(angle), uy = std::sin(angle);
        Cell cell = world.cell_of(pose.x, pose.y);
        const int step_c = ux > 0 ? 1 : (ux < 0 ? -1 : 0);
        const int step_r = uy > 0 ? 1 : (uy < 0 ? -1 : 0);
        const double next_x = (step_c > 0 ? cell.col + 1 : cell.col) * cs;
        const double next_y = (step_r > 0 ? cell.row + 1 : cell.row) * cs;
        double t_max_x = step_c != 0 ? (next_x - pose.x) / ux : inf;
        double t_max_y = step_r != 0 ? (next_y - pose.y) / uy : inf;
        const double t_delta_x = step_c != 0 ? cs / std::abs(ux) : inf;
        const double t_delta_y = step_r != 0 ? cs / std::abs(uy) : inf;

        RayHit hit;
        hit.depth = max_range;
        double t = 0.0;
        while (true) {
            if (t_max_x < t_max_y) {
                t = t_max_x;
                t_max_x += t_delta_x;
                cell.col += step_c;
            } else {
                t = t_max_y;
                t_max_y += t_delta_y;
                cell.row += step_r;
            }
            if (t >= max_range) break;
            if (world.is_wall(cell)) {
                hit.depth = t;
                hit.hit_wall = true;
                hit.cell = cell;
                break;
            }
        }
        hit.hit_x = pose.x + ux * hit.depth;
        hit.hit_y = pose.y + uy * hit.depth;
        hits[i] = hit;
    }
    return hits;
}

std::vector<double> raycast(const MazeWorld& world, const Pose& pose, std::size_t n_rays,
                            double fov, double max_range) {
    const auto hits = cast_rays(world, pose, n_rays, fov, max_range);
    std::vector<double> depths(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) depths[i] = hits[i].depth;
    return depths;
}

namespace {

// Travel time for one grid edge at the fastest speed along that direction.
double edge_time(const MazeWorld& world, int dr, int dc) {
    const double cs = world.cell_size();
    const double length = (dr != 0 && dc != 0) ? std::numbers::sqrt2 * cs : cs;
    const double speed =
        (dr != 0 && dc != 0) ? std::numbers::sqrt2 * world.params().v_max : world.params().v_max;
    return length / speed;
}

struct Search {
    std::vector<double> dist;
    std::vector<int> parent;
};

Search dijkstra(const MazeWorld& world, Cell start) {
    const int rows = world.rows(), cols = world.cols();
    const auto idx = [cols](int r, int c) { return r * cols + c; };
    Search s;
    s.dist.assign(static_cast<std::size_t>(rows * cols), std::numeric_limits<double>::infinity());
    s.parent.assign(static_cast<std::size_t>(rows * cols), -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    s.dist[idx(start.row, start.col)] = 0.0;
    heap.push({0.0, idx(start.row, start.col)});
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > s.dist[u]) continue;
        const int r = u / cols, c = u % cols;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const int nr = r + dr, nc = c + dc;
                if (world.is_wall(nr, nc)) continue;
                if (dr != 0 && dc != 0 && (world.is_wall(r + dr, c) || world.is_wall(r, c + dc))) {
                    continue;
                }
                const double nd = d + edge_time(world, dr, dc);
                const int v = idx(nr, nc);
                if (nd < s.dist[v]) {
                    s.dist[v] = nd;
                    s.parent[v] = u;
                    heap.push({nd, v});
                }
            }
        }
    }
    return s;
}

}  // namespace

std::optional<double> shortest_path_time(const MazeWorld& world, const Pose& start,
                                         const Pose& goal) {
    const Cell a = world.cell_of(start.x, start.y);
    const Cell b = world.cell_of(goal.x, goal.y);
    if (world.is_wall(a) || world.is_wall(b)) {
        throw Error(ErrorCode::invalid_input, "shortest_path_time endpoints must be free");
    }
    const auto s = dijkstra(world, a);
    const double d = s.dist[static_cast<std::size_t>(b.row * world.cols() + b.col)];
    if (!std::isfinite(d)) return std::nullopt;
    return d;
}

std::vector<Cell> shortest_path_cells(const MazeWorld& world, Cell start, Cell goal) {
    if (world.is_wall(start) || world.is_wall(goal)) return {};
    const auto s = dijkstra(world, start);
    const int cols = world.cols();
    int v = goal.row * cols + goal.col;
    if (!std::isfinite(s.dist[v])) return {};
    std::vector<Cell> path;
    for (; v != -1; v = s.parent[v]) path.push_back({v / cols, v % cols});
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace minav
