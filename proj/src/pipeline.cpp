#include "minav/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "minav/checkpoint.hpp"
#include "minav/error.hpp"
#include "minav/evaluate.hpp"
#include "minav/fqe.hpp"
#include "minav/goal_set.hpp"
#include "minav/noise.hpp"
#include "minav/relabel.hpp"
#include "minav/td3bc.hpp"

namespace fs = std::filesystem;

namespace minav {

namespace {

std::ostream* g_log = nullptr;

void log_line(const std::string& msg) {
    if (g_log) *g_log << msg << std::endl;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string hex32(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    return f;
}

std::ofstream open_csv(const fs::path& path, const RunConfig& cfg, const std::string& header) {
    auto f = open_out(path);
    f << "# fingerprint=" << fingerprint_hex(config_fingerprint(cfg)) << "\n" << header << "\n";
    return f;
}

void require(const fs::path& path) {
    if (!fs::exists(path)) throw Error(ErrorCode::io_error, "missing input " + path.string());
}

// Rows of a CSV written by open_csv, split on commas, header dropped.
std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path) {
    require(path);
    std::ifstream f(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = true;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

template <typename F>
void timed(const fs::path& dir, Stage stage, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    log_line(std::string("[") + stage_name(stage) + "] start");
    try {
        fn();
    } catch (const StageFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw StageFailure(stage, e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream f(dir / "timings.csv", std::ios::app);
    f << stage_name(stage) << "," << num(secs) << "\n";
    log_line(std::string("[") + stage_name(stage) + "] done in " + num(secs) + " s");
}

Encoder make_encoder(const RunConfig& cfg) { return Encoder(cfg.encoder); }

TaskConfig task_config(const RunConfig& cfg) {
    TaskConfig t;
    t.goals = cfg.eval.goals;
    t.starts = cfg.eval.starts;
    t.min_start_distance = cfg.eval.min_start_distance;
    t.candidates = cfg.eval.candidates;
    t.seed = derive_seed(cfg.seed, "eval");
    return t;
}

EvalSettings eval_settings(const RunConfig& cfg) {
    return {cfg.eval.max_steps, cfg.eval.delta_eval, cfg.encoder.delta_ssd};
}

std::vector<Checkpoint> load_checkpoints(const fs::path& ckpt_dir, std::uint64_t fingerprint) {
    require(ckpt_dir);
    std::vector<Checkpoint> out;
    for (const auto& entry : fs::directory_iterator(ckpt_dir)) {
        const auto name = entry.path().filename().string();
        if (name.rfind("ckpt_", 0) != 0 || entry.path().extension() != ".bin") continue;
        auto c = load_checkpoint(entry.path().string());
        if (c.fingerprint != fingerprint) {
            throw Error(ErrorCode::invalid_input, name + " was produced by a different config");
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.step < b.step; });
    if (out.empty()) throw Error(ErrorCode::io_error, "no checkpoints in " + ckpt_dir.string());
    return out;
}

void write_eval_csv(const fs::path& path, const RunConfig& cfg, const EvalReport& rep) {
    auto f = open_csv(path, cfg, "goal,start,success,steps,time_s,final_sim,final_dist_m");
    for (const auto& t : rep.trials) {
        f << t.goal << "," << t.start << "," << (t.success ? 1 : 0) << "," << t.steps << "," << num(t.time_s)
          << "," << num(t.final_sim) << "," << num(t.final_dist_m) << "\n";
    }
}

EvalReport read_eval_csv(const fs::path& path) {
    EvalReport rep;
    for (const auto& r : read_csv_rows(path)) {
        if (r.size() < 7) throw Error(ErrorCode::format_error, "short row in " + path.string());
        TrialLog t;
        t.goal = std::stoul(r[0]);
        t.start = std::stoul(r[1]);
        t.success = r[2] == "1";
        t.steps = std::stoul(r[3]);
        t.time_s = std::stod(r[4]);
        t.final_sim = std::stod(r[5]);
        t.final_dist_m = std::stod(r[6]);
        rep.trials.push_back(t);
    }
    return rep;
}

}  // namespace

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::config: return "config";
        case Stage::collect: return "collect";
        case Stage::process: return "process";
        case Stage::train: return "train";
        case Stage::select: return "select";
        case Stage::evaluate: return "evaluate";
        case Stage::experiment: return "experiment";
    }
    return "unknown";
}

int stage_exit_code(Stage s) {
    switch (s) {
        case Stage::config: return 2;
        case Stage::collect: return 10;
        case Stage::process: return 11;
        case Stage::train: return 12;
        case Stage::select: return 13;
        case Stage::evaluate: return 14;
        case Stage::experiment: return 15;
    }
    return 1;
}

void set_log_stream(std::ostream* os) { g_log = os; }

std::uint32_t payload_crc32(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot read " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (bytes.size() < 4) throw Error(ErrorCode::truncated_file, "no checksum trailer in " + path.string());
    // CRC over the whole file would be the constant CRC residue, so skip the trailer.
    const std::size_t n = bytes.size() - 4;
    const std::uint32_t crc = crc32_of(std::span<const std::uint8_t>(bytes.data(), n));
    const std::uint32_t stored = std::uint32_t(bytes[n]) | std::uint32_t(bytes[n + 1]) << 8 |
                                 std::uint32_t(bytes[n + 2]) << 16 | std::uint32_t(bytes[n + 3]) << 24;
    if (crc != stored) throw Error(ErrorCode::checksum_mismatch, "checksum mismatch in " + path.string());
    return crc;
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t k) { return master + k; }

OfflineDataset collect_dataset(const RunConfig& cfg, const MazeWorld& world, const Encoder& encoder) {
    const std::size_t n = cfg.collect.steps;
    if (n == 0) throw Error(ErrorCode::empty_dataset, "collection budget is zero steps");
    const std::size_t pa = world.params().action_dims;
    const std::size_t len = cfg.collect.episode_length;
    // Fresh noise per episode. One sequence over the whole budget puts most of its
    // power below 1/len and parks the agent on a wall for thousands of steps.
    NoiseConfig nc = cfg.noise;
    nc.dims = pa;
    nc.length = std::max<std::size_t>(len, 2);
    NoiseSequence noise;

    OfflineDataset ds(encoder.config().dim, pa);
    Pose pose = reset(world, derive_seed(cfg.seed, "collect.reset"), pa == 3);
    Episode ep(encoder.config().dim, pa);
    std::vector<float> action(pa);
    for (std::size_t t = 0; t < n; ++t) {
        if (t % len == 0) {
            if (t > 0) {
                ds.add_episode(std::move(ep));
                ep = Episode(encoder.config().dim, pa);
            }
            nc.seed = derive_seed(derive_seed(cfg.seed, "collect.noise"), t / len);
            noise = generate(nc);
        }
        const auto row = noise.row(t % len);
        for (std::size_t j = 0; j < pa; ++j) action[j] = static_cast<float>(row[j]);
        const auto emb = encoder.embed(world, pose);
        ep.push(emb.vector, action,
                {static_cast<float>(pose.x), static_cast<float>(pose.y), static_cast<float>(pose.theta)},
                static_cast<float>(emb.ssd));
        // Step with the float action that was stored so the dataset replays exactly.
        const std::vector<double> a(action.begin(), action.end());
        pose = step(world, pose, a);
    }
    if (ep.length() > 0) ds.add_episode(std::move(ep));
    return ds;
}

void run_collect(const RunConfig& cfg, const fs::path& dir) {
    timed(dir, Stage::collect, [&] {
        fs::create_directories(dir);
        { open_out(dir / "config.txt") << to_config_text(cfg); }
        const auto world = make_world(cfg);
        const auto encoder = make_encoder(cfg);
        const auto t0 = std::chrono::steady_clock::now();
        const auto ds = collect_dataset(cfg, world, encoder);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        save_dataset(ds, (dir / "dataset.bin").string());
        auto m = open_out(dir / "collect_manifest.txt");
        m << "fingerprint=" << fingerprint_hex(config_fingerprint(cfg)) << "\n"
          << "seed=" << cfg.seed << "\n"
          << "noise_kind=" << to_string(cfg.noise.kind) << "\n"
          << "steps=" << ds.total_steps() << "\n"
          << "episodes=" << ds.episode_count() << "\n"
          << "simulated_s=" << num(double(ds.total_steps()) * world.params().dt) << "\n"
          << "wall_s=" << num(wall) << "\n"
          << "dataset_crc32=" << hex32(payload_crc32(dir / "dataset.bin")) << "\n";
    });
}

void run_process(const RunConfig& cfg, const fs::path& dir) {
    timed(dir, Stage::process, [&] {
        require(dir / "dataset.bin");
        const auto ds = load_dataset((dir / "dataset.bin").string(), cfg.encoder.dim);
        const auto goals = build_goal_set(ds, cfg.encoder.delta_ssd);
        save_goal_set(goals, (dir / "goals.txt").string());
        const auto world = make_world(cfg);
        const auto rep = coverage_report(ds, world);
        auto f = open_csv(dir / "coverage.csv", cfg, "eta_s,eta_a,eta_sa,K_s,K_a,K_sa,N");
        f << num(rep.eta_s) << "," << num(rep.eta_a) << "," << num(rep.eta_sa) << "," << num(rep.k_s) << ","
          << num(rep.k_a) << "," << num(rep.k_sa) << "," << rep.n << "\n";
        log_line("  goals " + std::to_string(goals.size()) + " / " + std::to_string(ds.total_steps()) +
                 ", eta_s " + num(rep.eta_s) + " eta_a " + num(rep.eta_a) + " eta_sa " + num(rep.eta_sa));
    });
}

void run_train(const RunConfig& cfg, const fs::path& dir) {
    timed(dir, Stage::train, [&] {
        const auto ds = load_dataset((dir / "dataset.bin").string(), cfg.encoder.dim);
        const auto goals = load_goal_set((dir / "goals.txt").string());
        const BatchSampler sampler(ds, goals, cfg.relabel);
        const auto ckpt_dir = dir / "checkpoints";
        fs::remove_all(ckpt_dir);
        fs::create_directories(ckpt_dir);
        const auto fp = config_fingerprint(cfg);
        TrainHooks hooks;
        hooks.on_checkpoint = [&](const Checkpoint& c) {
            save_checkpoint(c, (ckpt_dir / checkpoint_filename(c.step)).string());
        };
        hooks.on_log = [](std::size_t step, double critic_loss, double actor_loss) {
            log_line("  step " + std::to_string(step) + " critic " + num(critic_loss) + " actor " + num(actor_loss));
        };
        hooks.log_every = std::max<std::size_t>(cfg.train.checkpoint_every, 1);
        const auto ckpts = train_td3bc(sampler, cfg.train, fp, hooks);
        auto m = open_out(ckpt_dir / "train_manifest.txt");
        m << "fingerprint=" << fingerprint_hex(fp) << "\n"
          << "dataset_crc32=" << hex32(payload_crc32(dir / "dataset.bin")) << "\n"
          << "gradient_steps=" << cfg.train.gradient_steps << "\n"
          << "checkpoints=" << ckpts.size() << "\n";
    });
}

void run_select(const RunConfig& cfg, const fs::path& dir) {
    timed(dir, Stage::select, [&] {
        const auto ds = load_dataset((dir / "dataset.bin").string(), cfg.encoder.dim);
        const auto goals = load_goal_set((dir / "goals.txt").string());
        const BatchSampler sampler(ds, goals, cfg.relabel);
        auto ckpts = load_checkpoints(dir / "checkpoints", config_fingerprint(cfg));

        std::vector<std::optional<double>> measured(ckpts.size());
        if (cfg.eval.measure_checkpoints) {
            const auto world = make_world(cfg);
            const auto encoder = make_encoder(cfg);
            const auto tasks = make_eval_tasks(world, encoder, task_config(cfg), cfg.encoder.delta_ssd);
            for (std::size_t i = 0; i < ckpts.size(); ++i) {
                measured[i] = evaluate_policy(actor_step_policy(ckpts[i].actor), world, encoder, tasks,
                                              eval_settings(cfg)).sr;
            }
        }
        auto f = open_csv(dir / "fqe.csv", cfg, cfg.eval.measure_checkpoints ? "step,fqe_score,measured_sr"
                                                                             : "step,fqe_score");
        for (std::size_t i = 0; i < ckpts.size(); ++i) {
            const double score = evaluate_checkpoint(ckpts[i], sampler, cfg.fqe);
            f << ckpts[i].step << "," << num(score);
            if (measured[i]) f << "," << num(*measured[i]);
            f << "\n";
            log_line("  ckpt " + std::to_string(ckpts[i].step) + " fqe " + num(score) +
                     (measured[i] ? " sr " + num(*measured[i]) : std::string()));
        }
        const auto& best = select_best(ckpts);
        save_checkpoint(best, (dir / "policy.bin").string());
    });
}

void run_evaluate(const RunConfig& cfg, const fs::path& dir) {
    timed(dir, Stage::evaluate, [&] {
        require(dir / "policy.bin");
        const auto policy = load_checkpoint((dir / "policy.bin").string());
        if (policy.fingerprint != config_fingerprint(cfg)) {
            throw Error(ErrorCode::invalid_input, "policy.bin was produced by a different config");
        }
        const auto world = make_world(cfg);
        const auto encoder = make_encoder(cfg);
        const auto tasks = make_eval_tasks(world, encoder, task_config(cfg), cfg.encoder.delta_ssd);
        const auto rep = evaluate_policy(actor_step_policy(policy.actor), world, encoder, tasks, eval_settings(cfg));
        write_eval_csv(dir / "eval.csv", cfg, rep);
        const auto rnd = evaluate_policy(random_step_policy(world.params().action_dims, derive_seed(cfg.seed, "eval")),
                                         world, encoder, tasks, eval_settings(cfg));
        write_eval_csv(dir / "random_eval.csv", cfg, rnd);
        log_line("  SR " + num(rep.sr) + " STL " + num(rep.stl) + " (random SR " + num(rnd.sr) + ")");
    });
}

namespace {

PipelineSummary assemble_summary(const RunConfig& cfg, const fs::path& dir) {
    PipelineSummary s;
    s.fingerprint = fingerprint_hex(config_fingerprint(cfg));
    s.noise_kind = std::string(to_string(cfg.noise.kind));
    s.budget_steps = cfg.collect.steps;
    const auto cov = read_csv_rows(dir / "coverage.csv").at(0);
    s.coverage.eta_s = std::stod(cov.at(0));
    s.coverage.eta_a = std::stod(cov.at(1));
    s.coverage.eta_sa = std::stod(cov.at(2));
    s.coverage.k_s = std::stod(cov.at(3));
    s.coverage.k_a = std::stod(cov.at(4));
    s.coverage.k_sa = std::stod(cov.at(5));
    s.coverage.n = std::stoul(cov.at(6));

    std::vector<double> scores, srs;
    for (const auto& r : read_csv_rows(dir / "fqe.csv")) {
        CheckpointRow row;
        row.step = std::stoull(r.at(0));
        row.fqe_score = std::stod(r.at(1));
        if (r.size() > 2) {
            row.measured_sr = std::stod(r[2]);
            scores.push_back(row.fqe_score);
            srs.push_back(*row.measured_sr);
        }
        s.checkpoints.push_back(row);
    }
    if (scores.size() >= 2 && scores.size() == s.checkpoints.size()) {
        try {
            s.fqe_sr_spearman = spearman(scores, srs);
        } catch (const Error&) {
            // constant SR or score: correlation undefined
        }
    }
    s.selected_step = load_checkpoint((dir / "policy.bin").string()).step;

    auto rep = read_eval_csv(dir / "eval.csv");
    std::vector<int> succ;
    std::vector<double> times, refs;
    const auto world = make_world(cfg);
    const auto tasks = make_eval_tasks(world, make_encoder(cfg), task_config(cfg), cfg.encoder.delta_ssd);
    if (tasks.size() != rep.trials.size()) throw Error(ErrorCode::format_error, "eval.csv does not match the task list");
    double success_time = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        succ.push_back(rep.trials[i].success ? 1 : 0);
        times.push_back(rep.trials[i].time_s);
        refs.push_back(tasks[i].reference_time);
        if (rep.trials[i].success) success_time += rep.trials[i].time_s;
    }
    const double wins = double(std::count(succ.begin(), succ.end(), 1));
    s.sr = wins / double(succ.size());
    s.stl = stl(succ, times, refs);
    s.mean_time_s = wins > 0 ? success_time / wins : 0.0;
    const auto rnd = read_eval_csv(dir / "random_eval.csv");
    double rnd_wins = 0.0;
    for (const auto& t : rnd.trials) rnd_wins += t.success ? 1.0 : 0.0;
    s.random_sr = rnd_wins / double(std::max<std::size_t>(rnd.trials.size(), 1));
    s.dataset_crc = payload_crc32(dir / "dataset.bin");
    s.policy_crc = payload_crc32(dir / "policy.bin");
    return s;
}

void write_summary(const PipelineSummary& s, const fs::path& path) {
    auto f = open_out(path);
    f << "# fingerprint=" << s.fingerprint << "\n"
      << "stages=collect,process,train,select,evaluate\n"
      << "noise_kind=" << s.noise_kind << "\n"
      << "budget_steps=" << s.budget_steps << "\n"
      << "eta_s=" << num(s.coverage.eta_s) << "\n"
      << "eta_a=" << num(s.coverage.eta_a) << "\n"
      << "eta_sa=" << num(s.coverage.eta_sa) << "\n"
      << "selected_step=" << s.selected_step << "\n"
      << "sr=" << num(s.sr) << "\n"
      << "stl=" << num(s.stl) << "\n"
      << "mean_time_s=" << num(s.mean_time_s) << "\n"
      << "random_sr=" << num(s.random_sr) << "\n";
    if (s.fqe_sr_spearman) f << "fqe_sr_spearman=" << num(*s.fqe_sr_spearman) << "\n";
    f << "dataset_crc32=" << hex32(s.dataset_crc) << "\n"
      << "policy_crc32=" << hex32(s.policy_crc) << "\n";
}

}  // namespace

PipelineSummary run_pipeline(const RunConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    fs::remove(dir / "timings.csv");
    run_collect(cfg, dir);
    run_process(cfg, dir);
    run_train(cfg, dir);
    run_select(cfg, dir);
    run_evaluate(cfg, dir);
    PipelineSummary s;
    try {
        s = assemble_summary(cfg, dir);
        write_summary(s, dir / "summary.txt");
    } catch (const std::exception& e) {
        throw StageFailure(Stage::evaluate, std::string("summary: ") + e.what());
    }
    return s;
}

PipelineSummary read_summary(const fs::path& dir) {
    const auto cfg = load_config((dir / "config.txt").string());
    return assemble_summary(cfg, dir);
}

namespace {

struct ArmStats {
    double mean = 0.0, sd = 0.0;
};

ArmStats stats(const std::vector<double>& v) {
    ArmStats s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= double(v.size());
    for (double x : v) s.sd += (x - s.mean) * (x - s.mean);
    s.sd = v.size() > 1 ? std::sqrt(s.sd / double(v.size() - 1)) : 0.0;
    return s;
}

}  // namespace

void run_ablate_noise(const RunConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    auto runs = open_csv(dir / "ablate_runs.csv", cfg, "noise_kind,seed,eta_s,eta_a,eta_sa,sr,stl");
    auto f = open_csv(dir / "ablate.csv", cfg, "noise_kind,eta_s,eta_a,eta_sa,sr,stl");
    for (const auto& kind : cfg.experiment.kinds) {
        std::vector<double> es, ea, esa, sr, st;
        for (std::size_t k = 0; k < cfg.experiment.seeds; ++k) {
            RunConfig run = cfg;
            run.noise.kind = parse_noise_kind(kind);
            run.seed = replicate_seed(cfg.seed, k);
            run.finalize();
            const auto s = run_pipeline(run, dir / kind / ("seed" + std::to_string(k)));
            es.push_back(s.coverage.eta_s);
            ea.push_back(s.coverage.eta_a);
            esa.push_back(s.coverage.eta_sa);
            sr.push_back(s.sr);
            st.push_back(s.stl);
            runs << kind << "," << run.seed << "," << num(s.coverage.eta_s) << "," << num(s.coverage.eta_a) << ","
                 << num(s.coverage.eta_sa) << "," << num(s.sr) << "," << num(s.stl) << "\n";
        }
        f << kind << "," << num(stats(es).mean) << "," << num(stats(ea).mean) << "," << num(stats(esa).mean) << ","
          << num(stats(sr).mean) << "," << num(stats(st).mean) << "\n";
    }
}

void run_scaling(const RunConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    auto f = open_csv(dir / "scaling.csv", cfg, "budget_steps,sr,sr_std,stl,stl_std");
    for (double mult : cfg.experiment.budgets) {
        const auto steps = static_cast<std::size_t>(std::llround(mult * double(cfg.collect.steps)));
        std::vector<double> sr, st;
        for (std::size_t k = 0; k < cfg.experiment.seeds; ++k) {
            RunConfig run = cfg;
            run.collect.steps = steps;
            run.seed = replicate_seed(cfg.seed, k);
            run.finalize();
            const auto s = run_pipeline(run, dir / ("budget" + std::to_string(steps)) / ("seed" + std::to_string(k)));
            sr.push_back(s.sr);
            st.push_back(s.stl);
        }
        f << steps << "," << num(stats(sr).mean) << "," << num(stats(sr).sd) << "," << num(stats(st).mean) << ","
          << num(stats(st).sd) << "\n";
    }
}

void run_entropy(const RunConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    const auto world = make_world(cfg);
    auto f = open_csv(dir / "entropy.csv", cfg, "noise_kind,eta_s,eta_a,eta_sa,K_s,K_a,K_sa,N");
    auto runs = open_csv(dir / "entropy_runs.csv", cfg, "noise_kind,seed,eta_s,eta_a,eta_sa,K_s,K_a,K_sa,N");
    for (const auto& kind : cfg.experiment.kinds) {
        std::vector<double> es, ea, esa;
        EntropyReport last;
        for (std::size_t k = 0; k < cfg.experiment.seeds; ++k) {
            RunConfig run = cfg;
            run.noise.kind = parse_noise_kind(kind);
            run.seed = replicate_seed(cfg.seed, k);
            run.finalize();
            const auto ds = collect_dataset(run, world, Encoder(run.encoder));
            last = coverage_report(ds, world);
            es.push_back(last.eta_s);
            ea.push_back(last.eta_a);
            esa.push_back(last.eta_sa);
            runs << kind << "," << run.seed << "," << num(last.eta_s) << "," << num(last.eta_a) << ","
                 << num(last.eta_sa) << "," << num(last.k_s) << "," << num(last.k_a) << "," << num(last.k_sa) << ","
                 << last.n << "\n";
        }
        f << kind << "," << num(stats(es).mean) << "," << num(stats(ea).mean) << "," << num(stats(esa).mean) << ","
          << num(last.k_s) << "," << num(last.k_a) << "," << num(last.k_sa) << "," << last.n << "\n";
        log_line("  " + kind + " eta_s " + num(stats(es).mean) + " eta_a " + num(stats(ea).mean) + " eta_sa " +
                 num(stats(esa).mean));
    }
}

}  // namespace minav
