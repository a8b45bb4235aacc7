#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "flexsec/config.hpp"

namespace flexsec::harness {

namespace fs = std::filesystem;

// Seed of one grid cell's dataset; independent of the cell's position in the grid.
std::uint64_t cell_seed(std::uint64_t base, const Cell& cell);

SimConfig cell_sim(const RunConfig& cfg, const Cell& cell);

fs::path dataset_path(const fs::path& dir, const Cell& cell);
fs::path checkpoint_path(const fs::path& dir, gnn::EveMode mode, const Cell& cell);
fs::path last_checkpoint_path(const fs::path& dir, gnn::EveMode mode, const Cell& cell);
fs::path history_path(const fs::path& dir, gnn::EveMode mode, const Cell& cell);

// "# manifest: kind=..., hash=..., seed=..., version=..." written above every CSV header.
std::string manifest_line(const std::string& kind, const RunConfig& cfg);

// --- generate ---------------------------------------------------------------

struct GenerateResult {
    fs::path manifest;
    std::string config_hash;
    std::vector<fs::path> datasets;
    bool hash_collision = false;  // an existing manifest had this hash with different data
};

// Writes one dataset file per cell plus manifest.json under out_dir.
GenerateResult cmd_generate(const RunConfig& cfg, std::ostream& log);

// --- compare ----------------------------------------------------------------

struct CompareRow {
    Cell cell;
    std::string method;
    double assr_nats = 0.0;
    double assr_bits = 0.0;
    double std_error = 0.0;
    int n = 0;
};

// Per-instance sum secrecy of one method over a dataset.
std::vector<double> method_rates(const std::string& method, const std::vector<NetworkRealization>& data,
                                 const RunConfig& cfg, const Cell& cell);

// Evaluates every method on every cell's generated dataset and writes
// compare.csv. Missing datasets or checkpoints raise MissingArtifact.
std::vector<CompareRow> cmd_compare(const RunConfig& cfg, std::ostream& log);

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows, const RunConfig& cfg);

// --- timing -----------------------------------------------------------------

struct TimingRow {
    Cell cell;
    std::string method;
    double median_seconds = 0.0;
    double iqr_seconds = 0.0;
    int runs = 0;
};

struct TimingStats {
    double median = 0.0;
    double iqr = 0.0;
};
TimingStats summarize_times(std::vector<double> seconds);

// Wall time of single-threaded solves/inferences on freshly drawn instances;
// generation and I/O sit outside the measured region. GNN methods use the
// cell's checkpoint when one exists, otherwise freshly initialized weights
// (inference cost does not depend on the weight values).
std::vector<TimingRow> cmd_timing(const RunConfig& cfg, std::ostream& log);

void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows, const RunConfig& cfg);

// Least-squares slope of log(seconds) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& seconds);

// --- train ------------------------------------------------------------------

struct TrainOutcome {
    Cell cell;
    fs::path checkpoint;
    fs::path last_checkpoint;
    fs::path history;
    long best_epoch = 0;
    long last_epoch = 0;
    bool early_stopped = false;
};

// Trains one model per grid cell in cfg.model.mode. With resume set, picks up
// from the cell's last checkpoint and appends to its history.
std::vector<TrainOutcome> cmd_train(const RunConfig& cfg, bool resume, std::ostream& log);

void write_history_csv(std::ostream& os, const std::vector<training::EpochRecord>& rows, const RunConfig& cfg);

// --- plot -------------------------------------------------------------------

struct CsvTable {
    std::map<std::string, std::string> manifest;  // parsed "# manifest:" fields
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const fs::path& path);

// Required columns of each CSV family: "compare", "timing", "history".
const std::vector<std::string>& required_columns(const std::string& kind);

// Emits one plotting script per input CSV next to out_dir and returns the
// written paths. Empty CSVs or missing columns raise SchemaMismatch.
std::vector<fs::path> cmd_plot(const std::vector<fs::path>& csvs, const fs::path& out_dir);

}  // namespace flexsec::harness
