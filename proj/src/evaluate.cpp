#include "minav/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "minav/dataset.hpp"
#include "minav/error.hpp"
#include "minav/metrics.hpp"
#include "minav/relabel.hpp"
#include "minav/rng.hpp"

namespace minav {

namespace {

double distance(const Pose& a, const Pose& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Pose random_pose(const MazeWorld& world, Rng& rng) {
    const bool rotate = world.params().action_dims == 3;
    return reset(world, rng(), rotate);
}

}  // namespace

std::vector<EvalTask> make_eval_tasks(const MazeWorld& world, const Encoder& encoder,
                                      const TaskConfig& cfg, double delta_ssd) {
    Rng rng(derive_seed(cfg.seed, "eval.tasks"));
    std::vector<Pose> pool;
    for (std::size_t i = 0; i < cfg.candidates; ++i) {
        const Pose p = random_pose(world, rng);
        if (encoder.embed(world, p).ssd > delta_ssd) pool.push_back(p);
    }
    if (pool.empty()) throw Error(ErrorCode::empty_goal_set, "no SSD-valid goal poses found");

    // Farthest-point selection, seeded by the first candidate.
    std::vector<Pose> goals{pool.front()};
    std::vector<double> nearest(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) nearest[i] = distance(pool[i], goals[0]);
    while (goals.size() < cfg.goals && goals.size() < pool.size()) {
        const auto it = std::max_element(nearest.begin(), nearest.end());
        const Pose next = pool[std::size_t(it - nearest.begin())];
        goals.push_back(next);
        for (std::size_t i = 0; i < pool.size(); ++i) nearest[i] = std::min(nearest[i], distance(pool[i], next));
    }

    std::vector<EvalTask> tasks;
    for (std::size_t g = 0; g < goals.size(); ++g) {
        std::size_t found = 0;
        for (std::size_t attempt = 0; found < cfg.starts && attempt < 100000; ++attempt) {
            const Pose s = random_pose(world, rng);
            if (distance(s, goals[g]) < cfg.min_start_distance) continue;
            const auto t = shortest_path_time(world, s, goals[g]);
            if (!t || *t <= 0.0) continue;
            tasks.push_back({g, found, goals[g], s, *t});
            ++found;
        }
        if (found < cfg.starts) throw Error(ErrorCode::invalid_config, "cannot place enough evaluation starts");
    }
    return tasks;
}

TrialLog run_trial(const StepPolicy& policy, const MazeWorld& world, const Encoder& encoder,
                   const EvalTask& task, const EvalSettings& settings) {
    const auto goal = encoder.embed(world, task.goal);
    const std::size_t dim = goal.vector.size();
    const std::size_t pa = world.params().action_dims;
    std::vector<float> stack(kStackFrames * dim);
    const auto first = encoder.embed(world, task.start);
    for (std::size_t k = 0; k < kStackFrames; ++k) {
        std::copy(first.vector.begin(), first.vector.end(), stack.begin() + std::ptrdiff_t(k * dim));
    }

    TrialLog log;
    log.goal = task.goal_index;
    log.start = task.start_index;
    log.reference_time = task.reference_time;
    Pose pose = task.start;
    std::vector<double> action(pa);
    double sim = similarity(stack, goal.vector);
    for (std::size_t t = 0; t < settings.max_steps; ++t) {
        std::fill(action.begin(), action.end(), 0.0);
        policy(stack, goal.vector, pose, action);
        pose = step(world, pose, action);
        const auto obs = encoder.embed(world, pose);
        std::copy(stack.begin() + std::ptrdiff_t(dim), stack.end(), stack.begin());
        std::copy(obs.vector.begin(), obs.vector.end(), stack.end() - std::ptrdiff_t(dim));
        sim = similarity(stack, goal.vector);
        log.steps = t + 1;
        if (sim >= settings.delta_eval) {
            log.success = true;
            break;
        }
    }
    log.time_s = double(log.steps) * world.params().dt;
    if (!log.success) log.time_s = double(settings.max_steps) * world.params().dt;
    log.final_sim = sim;
    log.final_dist_m = distance(pose, task.goal);
    return log;
}

EvalReport evaluate_policy(const StepPolicy& policy, const MazeWorld& world, const Encoder& encoder,
                           const std::vector<EvalTask>& tasks, const EvalSettings& settings) {
    if (tasks.empty()) throw Error(ErrorCode::invalid_input, "evaluate_policy: no tasks");
    for (const auto& task : tasks) {
        if (!(encoder.embed(world, task.goal).ssd > settings.delta_ssd)) {
            throw Error(ErrorCode::invalid_input, "evaluation goal fails the SSD filter");
        }
    }
    EvalReport rep;
    std::size_t goal_count = 0;
    for (const auto& task : tasks) goal_count = std::max(goal_count, task.goal_index + 1);
    std::vector<double> goal_success(goal_count, 0.0), goal_trials(goal_count, 0.0);
    std::vector<int> successes;
    std::vector<double> times, refs;
    double success_time = 0.0;
    for (const auto& task : tasks) {
        const auto log = run_trial(policy, world, encoder, task, settings);
        rep.trials.push_back(log);
        goal_trials[log.goal] += 1.0;
        goal_success[log.goal] += log.success ? 1.0 : 0.0;
        successes.push_back(log.success ? 1 : 0);
        times.push_back(log.time_s);
        refs.push_back(log.reference_time);
        if (log.success) success_time += log.time_s;
    }
    for (std::size_t g = 0; g < goal_count; ++g) {
        rep.per_goal_sr.push_back(goal_trials[g] > 0.0 ? goal_success[g] / goal_trials[g] : 0.0);
    }
    const double wins = double(std::count(successes.begin(), successes.end(), 1));
    rep.sr = wins / double(tasks.size());
    rep.mean_time_s = wins > 0.0 ? success_time / wins : 0.0;
    rep.stl = stl(successes, times, refs);
    return rep;
}

StepPolicy actor_step_policy(const Mlp<float>& actor) {
    auto input = std::make_shared<std::vector<float>>();
    return [&actor, input](std::span<const float> state, std::span<const float> goal, const Pose&,
                           std::span<double> action) {
        input->assign(state.begin(), state.end());
        input->insert(input->end(), goal.begin(), goal.end());
        const auto out = actor.predict(*input, 1);
        for (std::size_t j = 0; j < action.size() && j < out.size(); ++j) action[j] = out[j];
    };
}

StepPolicy random_step_policy(std::size_t action_dims, std::uint64_t seed) {
    auto rng = std::make_shared<Rng>(derive_seed(seed, "eval.random_policy"));
    return [rng, action_dims](std::span<const float>, std::span<const float>, const Pose&,
                              std::span<double> action) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (std::size_t j = 0; j < action_dims && j < action.size(); ++j) action[j] = u(*rng);
    };
}

StepPolicy waypoint_oracle_policy(const MazeWorld& world, const Pose& goal) {
    return [&world, goal](std::span<const float>, std::span<const float>, const Pose& pose,
                          std::span<double> action) {
        const auto& prm = world.params();
        const Cell here = world.cell_of(pose.x, pose.y);
        const Cell target = world.cell_of(goal.x, goal.y);
        double wx = goal.x, wy = goal.y;
        const auto path = shortest_path_cells(world, here, target);
        if (path.size() > 2) {
            wx = (path[1].col + 0.5) * prm.cell_size;
            wy = (path[1].row + 0.5) * prm.cell_size;
        }
        // Per-axis velocity that lands on the waypoint this step if possible.
        const double reach = prm.v_max * prm.dt;
        const double dx = std::clamp((wx - pose.x) / reach, -1.0, 1.0);
        const double dy = std::clamp((wy - pose.y) / reach, -1.0, 1.0);
        if (prm.action_dims == 2) {
            action[0] = dx;
            action[1] = dy;
            return;
        }
        // Body frame: rotate the world-frame command, then steer toward the goal heading.
        const double c = std::cos(pose.theta), s = std::sin(pose.theta);
        const double bx = c * dx + s * dy;
        const double by = -s * dx + c * dy;
        action[0] = std::clamp(2.0 * bx - 1.0, -1.0, 1.0);
        action[1] = std::clamp(by, -1.0, 1.0);
        const double dtheta = wrap_angle(goal.theta - pose.theta);
        action[2] = std::clamp(dtheta / (prm.omega_max * prm.dt), -1.0, 1.0);
    };
}

}  // namespace minav
