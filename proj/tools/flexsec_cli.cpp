// flexsec: dataset generation, training, comparison, timing and plot scripts.
//
// Configuration precedence, lowest first: built-in defaults, --config file,
// FLEXSEC_<SECTION>_<KEY> environment variables, command-line flags.
// Exit codes: 0 success, 2 config error, 3 missing artifact, 4 runtime failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flexsec/config.hpp"
#include "flexsec/errors.hpp"
#include "flexsec/harness.hpp"
#include "flexsec/version.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kMissing = 3, kRuntime = 4 };

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string mode;
    std::string methods;
    std::optional<int> workers;
    std::string grid;
    std::optional<int> samples;
    std::optional<int> epochs;
    bool resume = false;
    std::vector<std::string> csvs;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "INI config file ([sim] [solver] [model] [train] [experiment])");
    cmd->add_option("--seed", f.seed, "Seed for data generation and training");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--workers", f.workers, "Worker threads (timing always uses one)");
    cmd->add_option("--grid", f.grid, "Grid cells, e.g. 2x2,8x2 (N pairs x K eavesdroppers)");
}

flexsec::RunConfig resolve(const Flags& f) {
    flexsec::RunConfig cfg;
    if (!f.config.empty()) flexsec::apply_file(cfg, f.config);
    flexsec::apply_env(cfg);
    if (f.seed) {
        cfg.experiment.seed = *f.seed;
        cfg.train.seed = *f.seed;
    }
    if (!f.out.empty()) cfg.experiment.out_dir = f.out;
    if (!f.mode.empty()) cfg.model.mode = flexsec::gnn::parse_eve_mode(f.mode);
    if (!f.methods.empty()) cfg.experiment.methods = flexsec::parse_methods(f.methods);
    if (f.workers) cfg.experiment.workers = *f.workers;
    if (!f.grid.empty()) cfg.experiment.grid = flexsec::parse_grid(f.grid);
    if (f.samples) cfg.experiment.samples = *f.samples;
    if (f.epochs) cfg.train.epochs = *f.epochs;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sum-secrecy scheduling for flexible-duplex pairs: classical solver, GNN and baselines"};
    app.set_version_flag("--version", std::string(flexsec::kVersion));
    app.require_subcommand(1);

    Flags f;
    auto* gen = app.add_subcommand("generate", "Write per-cell realization datasets and manifest.json");
    add_common(gen, f);
    gen->add_option("--samples", f.samples, "Realizations per grid cell");

    auto* train = app.add_subcommand("train", "Train one GNN per grid cell");
    add_common(train, f);
    train->add_option("--mode", f.mode, "Eavesdropper knowledge: csi or distance")
        ->check(CLI::IsMember({"csi", "distance"}));
    train->add_option("--epochs", f.epochs, "Epoch budget");
    train->add_flag("--resume", f.resume, "Continue from the cell's .last checkpoint");

    auto* compare = app.add_subcommand("compare", "ASSR table over the grid (compare.csv)");
    add_common(compare, f);
    compare->add_option("--methods", f.methods, "Comma list of gnn-csi,gnn-distance,classical,hd,max-power");

    auto* timing = app.add_subcommand("timing", "Median single-thread runtimes (timing.csv)");
    add_common(timing, f);
    timing->add_option("--methods", f.methods, "Comma list of gnn-csi,gnn-distance,classical,hd,max-power");

    auto* plot = app.add_subcommand("plot", "Emit matplotlib scripts for compare/timing/history CSVs");
    plot->add_option("csv", f.csvs, "CSV files")->required();
    plot->add_option("--out", f.out, "Directory for the scripts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (plot->parsed()) {
            const auto out = f.out.empty() ? std::filesystem::path(".") : std::filesystem::path(f.out);
            for (const auto& p : flexsec::harness::cmd_plot({f.csvs.begin(), f.csvs.end()}, out)) {
                std::cout << "wrote " << p.string() << "\n";
            }
            return kOk;
        }
        const auto cfg = resolve(f);
        if (gen->parsed()) {
            const auto r = flexsec::harness::cmd_generate(cfg, std::cout);
            std::cout << "manifest " << r.manifest.string() << " (config hash " << r.config_hash << ")\n";
        } else if (train->parsed()) {
            for (const auto& o : flexsec::harness::cmd_train(cfg, f.resume, std::cout)) {
                std::cout << (o.early_stopped ? "early-stopped" : "completed") << " " << o.checkpoint.string() << "\n";
            }
        } else if (compare->parsed()) {
            flexsec::harness::cmd_compare(cfg, std::cout);
            std::cout << "wrote " << (cfg.experiment.out_dir / "compare.csv").string() << "\n";
        } else if (timing->parsed()) {
            flexsec::harness::cmd_timing(cfg, std::cout);
            std::cout << "wrote " << (cfg.experiment.out_dir / "timing.csv").string() << "\n";
        }
        return kOk;
    } catch (const flexsec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const flexsec::MissingArtifact& e) {
        std::cerr << "missing artifact: " << e.what() << "\n";
        return kMissing;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}
