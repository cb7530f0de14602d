#pragma once

// Pipeline stages. Each stage reads only files written by earlier stages in
// the run directory plus the config, so stages can run in separate processes.
//
// Run directory layout:
//   config.txt            canonical config of the run
//   dataset.bin           collect
//   collect_manifest.txt  collect
//   goals.txt             process
//   coverage.csv          process
//   checkpoints/          train (ckpt_<step>.bin) + train_manifest.txt
//   fqe.csv, policy.bin   select
//   eval.csv              evaluate (selected policy)
//   random_eval.csv       evaluate (uniform random baseline)
//   summary.txt           deterministic report
//   timings.csv           wall-clock seconds per stage

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "minav/config.hpp"
#include "minav/dataset.hpp"
#include "minav/encoder.hpp"
#include "minav/metrics.hpp"

namespace minav {

enum class Stage { config, collect, process, train, select, evaluate, experiment };

const char* stage_name(Stage s);
/// Process exit code for a failure in `s`.
int stage_exit_code(Stage s);

class StageFailure : public std::runtime_error {
public:
    StageFailure(Stage stage, const std::string& what)
        : std::runtime_error(std::string(stage_name(stage)) + ": " + what), stage_(stage) {}
    Stage stage() const { return stage_; }

private:
    Stage stage_;
};

/// Progress messages go here; null silences them.
void set_log_stream(std::ostream* os);

/// Rolls the configured noise through the maze as one continuous rollout
/// cut into fixed-length episodes, encoding every observation.
OfflineDataset collect_dataset(const RunConfig& cfg, const MazeWorld& world, const Encoder& encoder);

/// CRC32 of a dataset or checkpoint file without its 4-byte CRC trailer,
/// which must match.
std::uint32_t payload_crc32(const std::filesystem::path& path);

void run_collect(const RunConfig& cfg, const std::filesystem::path& dir);
void run_process(const RunConfig& cfg, const std::filesystem::path& dir);
void run_train(const RunConfig& cfg, const std::filesystem::path& dir);
void run_select(const RunConfig& cfg, const std::filesystem::path& dir);
void run_evaluate(const RunConfig& cfg, const std::filesystem::path& dir);

struct CheckpointRow {
    std::uint64_t step = 0;
    double fqe_score = 0.0;
    std::optional<double> measured_sr;
};

struct PipelineSummary {
    std::string fingerprint;
    std::string noise_kind;
    std::size_t budget_steps = 0;
    EntropyReport coverage;
    std::uint64_t selected_step = 0;
    double sr = 0.0;
    double stl = 0.0;
    double mean_time_s = 0.0;
    double random_sr = 0.0;
    std::optional<double> fqe_sr_spearman;
    std::vector<CheckpointRow> checkpoints;
    std::uint32_t dataset_crc = 0;
    std::uint32_t policy_crc = 0;
};

/// All five stages, then summary.txt. Each stage failure is rethrown as a
/// StageFailure; earlier outputs stay on disk.
PipelineSummary run_pipeline(const RunConfig& cfg, const std::filesystem::path& dir);
/// Re-reads a finished run directory.
PipelineSummary read_summary(const std::filesystem::path& dir);

/// One pipeline per noise kind and seed; ablate.csv has seed means per kind.
void run_ablate_noise(const RunConfig& cfg, const std::filesystem::path& dir);
/// One pipeline per budget multiple and seed; scaling.csv has mean and std.
void run_scaling(const RunConfig& cfg, const std::filesystem::path& dir);
/// Collection and coverage only, per noise kind and seed.
void run_entropy(const RunConfig& cfg, const std::filesystem::path& dir);

/// Seed used for replicate `k` of an experiment.
std::uint64_t replicate_seed(std::uint64_t master, std::size_t k);

}  // namespace minav
