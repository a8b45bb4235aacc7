#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flexsec/channel.hpp"
#include "flexsec/classical.hpp"
#include "flexsec/gnn.hpp"
#include "flexsec/training.hpp"

namespace flexsec {

struct Cell {
    int n_pairs = 2;
    int n_eves = 2;

    bool operator==(const Cell&) const = default;
};

inline const std::vector<std::string> kAllMethods = {"gnn-csi", "gnn-distance", "classical", "hd", "max-power"};

struct ExperimentSpec {
    std::vector<Cell> grid{{2, 2}};
    int samples = 1000;
    std::vector<std::string> methods{"classical", "hd", "max-power"};
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";
    std::filesystem::path checkpoint_dir;  // empty: out_dir
    int workers = 1;
    int timing_runs = 20;

    std::filesystem::path checkpoints() const { return checkpoint_dir.empty() ? out_dir : checkpoint_dir; }
    void validate() const;
};

// Everything a run needs. Precedence, lowest first: built-in defaults,
// config file, FLEXSEC_<SECTION>_<KEY> environment variables, CLI flags.
struct RunConfig {
    SimConfig sim;
    classical::SolverConfig solver;
    gnn::ModelConfig model;
    training::TrainConfig train;
    ExperimentSpec experiment;

    void validate() const;
};

// "2x2,8x2" <-> grid cells.
std::vector<Cell> parse_grid(const std::string& text);
std::string format_grid(const std::vector<Cell>& grid);

// Comma-separated method list; unknown names raise ConfigError.
std::vector<std::string> parse_methods(const std::string& text);

// Sets one key; unknown sections/keys and unparsable values raise ConfigError.
void set_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);

// INI-style text: [section] headers, key = value lines, # or ; comments.
void apply_ini(RunConfig& cfg, const std::string& text, const std::string& origin = "<config>");
void apply_file(RunConfig& cfg, const std::filesystem::path& path);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();
void apply_env(RunConfig& cfg, const EnvLookup& lookup = process_env());

// One "section.key=value" line per known key, in a fixed order; the input of
// the config hash.
std::string canonical(const RunConfig& cfg);

std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t value);
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace flexsec
