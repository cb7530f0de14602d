#include "minav/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "minav/error.hpp"

namespace minav {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& v) {
    throw Error(ErrorCode::invalid_config, "bad value for " + key + ": '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end) bad_value(key, v);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, v);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, std::string>) {
            out += v[i];
        } else if constexpr (std::is_floating_point_v<T>) {
            out += fmt(v[i]);
        } else {
            out += std::to_string(v[i]);
        }
    }
    return out;
}

struct Field {
    std::string key;
    std::function<std::string()> get;
    std::function<void(const std::string&)> set;
};

Field size_field(std::string key, std::size_t& ref) {
    return {key, [&ref] { return std::to_string(ref); },
            [&ref, key](const std::string& v) { ref = parse_number<std::size_t>(key, v); }};
}
Field u64_field(std::string key, std::uint64_t& ref) {
    return {key, [&ref] { return std::to_string(ref); },
            [&ref, key](const std::string& v) { ref = parse_number<std::uint64_t>(key, v); }};
}
Field real_field(std::string key, double& ref) {
    return {key, [&ref] { return fmt(ref); },
            [&ref, key](const std::string& v) { ref = parse_number<double>(key, v); }};
}
Field bool_field(std::string key, bool& ref) {
    return {key, [&ref] { return std::string(ref ? "true" : "false"); },
            [&ref, key](const std::string& v) { ref = parse_bool(key, v); }};
}
Field string_field(std::string key, std::string& ref) {
    return {key, [&ref] { return ref; }, [&ref](const std::string& v) { ref = v; }};
}
Field sizes_field(std::string key, std::vector<std::size_t>& ref) {
    return {key, [&ref] { return join(ref); },
            [&ref, key](const std::string& v) {
                ref.clear();
                for (const auto& s : split_list(v)) ref.push_back(parse_number<std::size_t>(key, s));
            }};
}
Field reals_field(std::string key, std::vector<double>& ref) {
    return {key, [&ref] { return join(ref); },
            [&ref, key](const std::string& v) {
                ref.clear();
                for (const auto& s : split_list(v)) ref.push_back(parse_number<double>(key, s));
            }};
}
Field strings_field(std::string key, std::vector<std::string>& ref) {
    return {key, [&ref] { return join(ref); }, [&ref](const std::string& v) { ref = split_list(v); }};
}

std::vector<Field> fields(RunConfig& c) {
    return {
        u64_field("run.seed", c.seed),
        string_field("maze.layout", c.maze),
        real_field("maze.cell_size", c.maze_params.cell_size),
        real_field("maze.v_max", c.maze_params.v_max),
        real_field("maze.omega_max", c.maze_params.omega_max),
        real_field("maze.dt", c.maze_params.dt),
        size_field("maze.action_dims", c.maze_params.action_dims),
        size_field("encoder.patch_rows", c.encoder.patch_rows),
        size_field("encoder.patch_cols", c.encoder.patch_cols),
        size_field("encoder.dim", c.encoder.dim),
        real_field("encoder.fov_deg", c.encoder.fov_deg),
        real_field("encoder.max_range", c.encoder.max_range),
        real_field("encoder.crop_fraction", c.encoder.crop_fraction),
        real_field("encoder.delta_ssd", c.encoder.delta_ssd),
        size_field("encoder.hit_frequencies", c.encoder.hit_frequencies),
        real_field("encoder.hit_frequency_scale", c.encoder.hit_frequency_scale),
        size_field("encoder.depth_frequencies", c.encoder.depth_frequencies),
        {"noise.kind", [&c] { return std::string(to_string(c.noise.kind)); },
         [&c](const std::string& v) { c.noise.kind = parse_noise_kind(v); }},
        real_field("noise.beta", c.noise.beta),
        real_field("noise.sigma", c.noise.sigma),
        real_field("noise.ou_theta", c.noise.ou_theta),
        real_field("noise.ou_sigma", c.noise.ou_sigma),
        size_field("collect.steps", c.collect.steps),
        size_field("collect.episode_length", c.collect.episode_length),
        real_field("relabel.p", c.relabel.p),
        real_field("relabel.w_geom", c.relabel.w_geom),
        real_field("relabel.delta_done", c.relabel.delta_done),
        bool_field("relabel.reward_on_next", c.relabel.reward_on_next),
        bool_field("relabel.strict_normalization", c.relabel.strict_normalization),
        size_field("train.gradient_steps", c.train.gradient_steps),
        size_field("train.batch", c.train.batch),
        real_field("train.gamma", c.train.gamma),
        real_field("train.lambda", c.train.lambda),
        real_field("train.tau", c.train.tau),
        size_field("train.policy_delay", c.train.policy_delay),
        real_field("train.smoothing_sigma", c.train.smoothing_sigma),
        real_field("train.smoothing_clip", c.train.smoothing_clip),
        size_field("train.checkpoint_every", c.train.checkpoint_every),
        sizes_field("train.hidden", c.train.hidden),
        real_field("train.actor_lr", c.train.actor_lr),
        real_field("train.critic_lr", c.train.critic_lr),
        size_field("fqe.iterations", c.fqe.iterations),
        size_field("fqe.batch", c.fqe.batch),
        size_field("fqe.target_sync", c.fqe.target_sync),
        size_field("fqe.score_samples", c.fqe.score_samples),
        sizes_field("fqe.hidden", c.fqe.hidden),
        real_field("fqe.lr", c.fqe.lr),
        size_field("eval.goals", c.eval.goals),
        size_field("eval.starts", c.eval.starts),
        size_field("eval.max_steps", c.eval.max_steps),
        real_field("eval.delta_eval", c.eval.delta_eval),
        real_field("eval.min_start_distance", c.eval.min_start_distance),
        size_field("eval.candidates", c.eval.candidates),
        bool_field("eval.measure_checkpoints", c.eval.measure_checkpoints),
        strings_field("experiment.kinds", c.experiment.kinds),
        size_field("experiment.seeds", c.experiment.seeds),
        reals_field("experiment.budgets", c.experiment.budgets),
    };
}

}  // namespace

void RunConfig::finalize() {
    if (maze.empty()) throw Error(ErrorCode::invalid_config, "maze.layout is empty");
    if (maze_params.action_dims != 2 && maze_params.action_dims != 3) {
        throw Error(ErrorCode::invalid_config, "maze.action_dims must be 2 or 3");
    }
    if (!(maze_params.cell_size > 0.0) || !(maze_params.dt > 0.0) || !(maze_params.v_max > 0.0)) {
        throw Error(ErrorCode::invalid_config, "maze cell_size, dt and v_max must be positive");
    }
    if (collect.episode_length < 2) throw Error(ErrorCode::invalid_config, "collect.episode_length must be >= 2");
    if (eval.goals == 0 || eval.starts == 0) throw Error(ErrorCode::invalid_config, "eval counts must be positive");
    if (experiment.seeds == 0) throw Error(ErrorCode::invalid_config, "experiment.seeds must be positive");
    for (const auto& k : experiment.kinds) parse_noise_kind(k);
    for (double b : experiment.budgets) {
        if (!(b > 0.0)) throw Error(ErrorCode::invalid_config, "experiment.budgets must be positive");
    }
    noise.dims = maze_params.action_dims;
    fqe.gamma = train.gamma;
    relabel.gamma = train.gamma;
    encoder.seed = derive_seed(seed, "encoder");
    train.seed = derive_seed(seed, "train");
    fqe.seed = derive_seed(seed, "fqe");
    encoder.validate();
    relabel.validate();
    train.validate();
    fqe.validate();
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    auto table = fields(cfg);
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::invalid_config, "line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
        if (it == table.end()) throw Error(ErrorCode::invalid_config, "unknown config key: " + key);
        if (!seen.insert(key).second) throw Error(ErrorCode::invalid_config, "repeated config key: " + key);
        it->set(value);
    }
    cfg.finalize();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::io_error, "cannot read config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(const RunConfig& cfg) {
    RunConfig copy = cfg;
    std::string out;
    for (const auto& f : fields(copy)) out += f.key + " = " + f.get() + "\n";
    return out;
}

std::uint64_t config_fingerprint(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : to_config_text(cfg)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fingerprint_hex(std::uint64_t fp) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
    return buf;
}

MazeWorld make_world(const RunConfig& cfg) {
    for (const char* name : {"simple", "standard", "complex"}) {
        if (cfg.maze == name) return preset_maze(cfg.maze, cfg.maze_params);
    }
    return MazeWorld::load(cfg.maze, cfg.maze_params);
}

}  // namespace minav
