#include "flexsec/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flexsec/errors.hpp"
#include "flexsec/parallel.hpp"
#include "flexsec/version.hpp"

namespace flexsec::harness {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kTimingSalt = 0x74696d65ull;

std::string cell_tag(const Cell& c) { return "N" + std::to_string(c.n_pairs) + "-K" + std::to_string(c.n_eves); }

std::string cell_label(const Cell& c) {
    return "N=" + std::to_string(c.n_pairs) + ",K=" + std::to_string(c.n_eves);
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifact("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::out | mode);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    return os;
}

bool is_gnn(const std::string& method) { return method.rfind("gnn-", 0) == 0; }

gnn::ModelConfig cell_model(const RunConfig& cfg, const Cell& cell, gnn::EveMode mode) {
    gnn::ModelConfig m = cfg.model;
    m.mode = mode;
    m.n_eves = cell.n_eves;
    return m;
}

gnn::ModelParams load_cell_model(const RunConfig& cfg, const Cell& cell, const std::string& method) {
    const auto mode = gnn::parse_eve_mode(method);
    const auto path = checkpoint_path(cfg.experiment.checkpoints(), mode, cell);
    if (!fs::exists(path)) {
        throw MissingArtifact("no " + method + " checkpoint for cell " + cell_label(cell) + " (expected " +
                              path.string() + ")");
    }
    const auto expected = cell_model(cfg, cell, mode);
    return gnn::load_params(path, &expected);
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    return out;
}

std::string python_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + ("\"" + items[i] + "\"");
    return out + "]";
}

std::string script_prelude(const fs::path& csv, const std::vector<std::string>& columns) {
    std::ostringstream s;
    s << "#!/usr/bin/env python3\n"
      << "import csv\n"
      << "import matplotlib\n"
      << "matplotlib.use(\"Agg\")\n"
      << "import matplotlib.pyplot as plt\n\n"
      << "CSV = " << std::quoted(fs::absolute(csv).string()) << "\n"
      << "COLUMNS = " << python_list(columns) << "\n\n"
      << "def load():\n"
      << "    with open(CSV, newline=\"\") as f:\n"
      << "        lines = [l for l in f if not l.startswith(\"#\")]\n"
      << "    return list(csv.DictReader(lines))\n\n"
      << "rows = load()\n";
    return s.str();
}

std::string compare_script(const fs::path& csv, const fs::path& png) {
    std::ostringstream s;
    s << script_prelude(csv, required_columns("compare"))
      << "cells = []\n"
      << "methods = []\n"
      << "for r in rows:\n"
      << "    c = (int(r[\"N\"]), int(r[\"K\"]))\n"
      << "    if c not in cells:\n"
      << "        cells.append(c)\n"
      << "    if r[\"method\"] not in methods:\n"
      << "        methods.append(r[\"method\"])\n"
      << "width = 0.8 / max(len(methods), 1)\n"
      << "fig, ax = plt.subplots(figsize=(8, 4))\n"
      << "for i, m in enumerate(methods):\n"
      << "    xs, ys, es = [], [], []\n"
      << "    for j, c in enumerate(cells):\n"
      << "        for r in rows:\n"
      << "            if (int(r[\"N\"]), int(r[\"K\"])) == c and r[\"method\"] == m:\n"
      << "                xs.append(j + i * width)\n"
      << "                ys.append(float(r[\"assr_nats\"]))\n"
      << "                es.append(float(r[\"std_error\"]))\n"
      << "    ax.bar(xs, ys, width, yerr=es, label=m)\n"
      << "ax.set_xticks([j + 0.4 - width / 2 for j in range(len(cells))])\n"
      << "ax.set_xticklabels([f\"{2 * n} users, K={k}\" for n, k in cells])\n"
      << "ax.set_ylabel(\"ASSR (nats/channel use)\")\n"
      << "ax.legend()\n"
      << "fig.tight_layout()\n"
      << "fig.savefig(" << std::quoted(fs::absolute(png).string()) << ", dpi=150)\n";
    return s.str();
}

std::string timing_script(const fs::path& csv, const fs::path& png) {
    std::ostringstream s;
    s << script_prelude(csv, required_columns("timing"))
      << "fig, axes = plt.subplots(1, 2, figsize=(10, 4))\n"
      << "def curves(ax, key, fixed, label):\n"
      << "    groups = {}\n"
      << "    for r in rows:\n"
      << "        groups.setdefault((r[\"method\"], r[fixed]), []).append(r)\n"
      << "    for (m, f), rs in sorted(groups.items()):\n"
      << "        rs.sort(key=lambda r: int(r[key]))\n"
      << "        if len(rs) < 2:\n"
      << "            continue\n"
      << "        ax.errorbar([int(r[key]) for r in rs], [float(r[\"median_seconds\"]) for r in rs],\n"
      << "                    yerr=[float(r[\"iqr_seconds\"]) / 2 for r in rs], marker=\"o\", label=f\"{m}, {fixed}={f}\")\n"
      << "    ax.set_xscale(\"log\")\n"
      << "    ax.set_yscale(\"log\")\n"
      << "    ax.set_xlabel(label)\n"
      << "    ax.set_ylabel(\"median wall time (s)\")\n"
      << "    ax.legend(fontsize=7)\n"
      << "curves(axes[0], \"N\", \"K\", \"user pairs N\")\n"
      << "curves(axes[1], \"K\", \"N\", \"eavesdroppers K\")\n"
      << "fig.tight_layout()\n"
      << "fig.savefig(" << std::quoted(fs::absolute(png).string()) << ", dpi=150)\n";
    return s.str();
}

std::string history_script(const fs::path& csv, const fs::path& png) {
    std::ostringstream s;
    s << script_prelude(csv, required_columns("history"))
      << "epochs = [int(r[\"epoch\"]) for r in rows]\n"
      << "fig, ax = plt.subplots(figsize=(6, 4))\n"
      << "ax.plot(epochs, [-float(r[\"train_loss\"]) for r in rows], label=\"train relaxed objective\")\n"
      << "ax.plot(epochs, [float(r[\"val_assr_nats\"]) for r in rows], label=\"validation ASSR\")\n"
      << "ax.set_xlabel(\"epoch\")\n"
      << "ax.set_ylabel(\"nats/channel use\")\n"
      << "ax.legend()\n"
      << "fig.tight_layout()\n"
      << "fig.savefig(" << std::quoted(fs::absolute(png).string()) << ", dpi=150)\n";
    return s.str();
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t base, const Cell& cell) {
    return mix_seed(base, (static_cast<std::uint64_t>(cell.n_pairs) << 32) | static_cast<std::uint32_t>(cell.n_eves));
}

SimConfig cell_sim(const RunConfig& cfg, const Cell& cell) {
    SimConfig s = cfg.sim;
    s.n_pairs = cell.n_pairs;
    s.n_eves = cell.n_eves;
    s.seed = cell_seed(cfg.experiment.seed, cell);
    return s;
}

fs::path dataset_path(const fs::path& dir, const Cell& cell) { return dir / ("data-" + cell_tag(cell) + ".fxds"); }

fs::path checkpoint_path(const fs::path& dir, gnn::EveMode mode, const Cell& cell) {
    return dir / (std::string("gnn-") + gnn::to_string(mode) + "-" + cell_tag(cell) + ".ckpt");
}

fs::path last_checkpoint_path(const fs::path& dir, gnn::EveMode mode, const Cell& cell) {
    return dir / (std::string("gnn-") + gnn::to_string(mode) + "-" + cell_tag(cell) + ".last.ckpt");
}

fs::path history_path(const fs::path& dir, gnn::EveMode mode, const Cell& cell) {
    return dir / (std::string("gnn-") + gnn::to_string(mode) + "-" + cell_tag(cell) + ".history.csv");
}

std::string manifest_line(const std::string& kind, const RunConfig& cfg) {
    return "# manifest: kind=" + kind + ", hash=" + hex64(config_hash(cfg)) +
           ", seed=" + std::to_string(cfg.experiment.seed) + ", version=" + kVersion;
}

GenerateResult cmd_generate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const ThreadLimit threads(cfg.experiment.workers);
    const auto& out = cfg.experiment.out_dir;
    fs::create_directories(out);

    GenerateResult result;
    result.config_hash = hex64(config_hash(cfg));
    json cells = json::array();
    for (const auto& cell : cfg.experiment.grid) {
        const auto sim = cell_sim(cfg, cell);
        const auto data = generate_batch(sim, cfg.experiment.samples, Exec::parallel);
        const auto path = dataset_path(out, cell);
        save_dataset(path, data);
        result.datasets.push_back(path);
        cells.push_back({{"n_pairs", cell.n_pairs},
                         {"n_eves", cell.n_eves},
                         {"seed", sim.seed},
                         {"samples", cfg.experiment.samples},
                         {"file", path.filename().string()},
                         {"data_hash", hex64(fnv1a(read_file(path)))}});
        log << "generated " << data.size() << " realizations for " << cell_label(cell) << " -> " << path.string()
            << "\n";
    }

    const json manifest = {{"version", kVersion},
                           {"config_hash", result.config_hash},
                           {"seed", cfg.experiment.seed},
                           {"grid", format_grid(cfg.experiment.grid)},
                           {"cells", cells},
                           {"config", canonical(cfg)}};
    result.manifest = out / "manifest.json";
    if (fs::exists(result.manifest)) {
        try {
            const auto old = json::parse(read_file(result.manifest));
            if (old.value("config_hash", "") == result.config_hash && old.value("config", "") != canonical(cfg)) {
                result.hash_collision = true;
            } else if (old.value("config_hash", "") == result.config_hash && old["cells"] != cells) {
                result.hash_collision = true;
            }
        } catch (const json::exception&) {
            // An unreadable previous manifest is simply replaced.
        }
        if (result.hash_collision) {
            log << "warning: config hash " << result.config_hash
                << " matches the previous manifest but the data differ; overwriting\n";
        }
    }
    auto os = open_out(result.manifest);
    os << manifest.dump(2) << "\n";
    return result;
}

std::vector<double> method_rates(const std::string& method, const std::vector<NetworkRealization>& data,
                                 const RunConfig& cfg, const Cell& cell) {
    std::vector<double> rates(data.size());
    std::optional<gnn::ModelParams> model;
    if (is_gnn(method)) model = load_cell_model(cfg, cell, method);

    parallel_for(static_cast<int>(data.size()), Exec::parallel, [&](int i) {
        const auto& r = data[static_cast<std::size_t>(i)];
        Schedule s;
        if (method == "classical") {
            s = classical::solve(r, cfg.solver).schedule;
        } else if (method == "hd") {
            s = classical::baseline_hd(r, cfg.solver);
        } else if (method == "max-power") {
            s = classical::baseline_max_power(r);
        } else if (model) {
            s = gnn::infer(r, *model);
        } else {
            throw ConfigError("unknown method '" + method + "'");
        }
        rates[static_cast<std::size_t>(i)] = sum_secrecy(r, s);
    });
    return rates;
}

std::vector<CompareRow> cmd_compare(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const ThreadLimit threads(cfg.experiment.workers);
    std::vector<CompareRow> rows;
    for (const auto& cell : cfg.experiment.grid) {
        const auto path = dataset_path(cfg.experiment.out_dir, cell);
        if (!fs::exists(path)) {
            throw MissingArtifact("no dataset for cell " + cell_label(cell) + " (expected " + path.string() +
                                  "; run generate first)");
        }
        const auto data = load_dataset(path);
        if (data.empty()) throw EmptyDataset("dataset for cell " + cell_label(cell) + " is empty");
        for (const auto& method : cfg.experiment.methods) {
            const auto rates = method_rates(method, data, cfg, cell);
            CompareRow row{cell, method, mean_of(rates), 0.0, 0.0, static_cast<int>(rates.size())};
            row.assr_bits = nats_to_bits(row.assr_nats);
            if (rates.size() > 1) {
                double ss = 0.0;
                for (const double r : rates) ss += (r - row.assr_nats) * (r - row.assr_nats);
                row.std_error = std::sqrt(ss / static_cast<double>(rates.size() - 1)) /
                                std::sqrt(static_cast<double>(rates.size()));
            }
            log << cell_label(cell) << " " << method << ": " << num(row.assr_nats) << " nats\n";
            rows.push_back(row);
        }
    }
    auto os = open_out(cfg.experiment.out_dir / "compare.csv");
    write_compare_csv(os, rows, cfg);
    return rows;
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows, const RunConfig& cfg) {
    os << manifest_line("compare", cfg) << "\n";
    os << "N,K,method,assr_nats,assr_bits,std_error,n\n";
    for (const auto& r : rows) {
        os << r.cell.n_pairs << "," << r.cell.n_eves << "," << r.method << "," << num(r.assr_nats) << ","
           << num(r.assr_bits) << "," << num(r.std_error) << "," << r.n << "\n";
    }
}

TimingStats summarize_times(std::vector<double> seconds) {
    if (seconds.empty()) throw EmptyDataset("no timing samples");
    std::sort(seconds.begin(), seconds.end());
    return {quantile(seconds, 0.5), quantile(seconds, 0.75) - quantile(seconds, 0.25)};
}

std::vector<TimingRow> cmd_timing(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    // Timing always runs on one worker and one thread.
    const ThreadLimit threads(1);
    const int runs = std::max(cfg.experiment.timing_runs, 20);
    std::vector<TimingRow> rows;
    for (const auto& cell : cfg.experiment.grid) {
        SimConfig sim = cell_sim(cfg, cell);
        sim.seed = mix_seed(sim.seed, kTimingSalt);
        const auto data = generate_batch(sim, runs, Exec::serial);
        for (const auto& method : cfg.experiment.methods) {
            std::optional<gnn::ModelParams> model;
            if (is_gnn(method)) {
                const auto mode = gnn::parse_eve_mode(method);
                if (fs::exists(checkpoint_path(cfg.experiment.checkpoints(), mode, cell))) {
                    model = load_cell_model(cfg, cell, method);
                } else {
                    model = gnn::init_params(cell_model(cfg, cell, mode));
                    model->stats = gnn::compute_feature_stats(data, model->config);
                }
            }
            auto run_once = [&](const NetworkRealization& r) {
                if (method == "classical") return classical::solve(r, cfg.solver).schedule;
                if (method == "hd") return classical::baseline_hd(r, cfg.solver);
                if (method == "max-power") return classical::baseline_max_power(r);
                return gnn::infer(r, *model);
            };
            volatile double sink = sum_secrecy(data.front(), run_once(data.front()));  // warm-up
            std::vector<double> seconds;
            seconds.reserve(data.size());
            for (const auto& r : data) {
                const auto t0 = std::chrono::steady_clock::now();
                const Schedule s = run_once(r);
                const auto t1 = std::chrono::steady_clock::now();
                sink = sink + s.p.sum();
                seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
            }
            const auto stats = summarize_times(seconds);
            rows.push_back({cell, method, stats.median, stats.iqr, static_cast<int>(seconds.size())});
            log << cell_label(cell) << " " << method << ": median " << num(stats.median) << " s\n";
        }
    }
    auto os = open_out(cfg.experiment.out_dir / "timing.csv");
    write_timing_csv(os, rows, cfg);
    return rows;
}

void write_timing_csv(std::ostream& os, const std::vector<TimingRow>& rows, const RunConfig& cfg) {
    os << manifest_line("timing", cfg) << "\n";
    os << "N,K,method,median_seconds,iqr_seconds,runs\n";
    for (const auto& r : rows) {
        os << r.cell.n_pairs << "," << r.cell.n_eves << "," << r.method << "," << num(r.median_seconds) << ","
           << num(r.iqr_seconds) << "," << r.runs << "\n";
    }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& seconds) {
    if (x.size() != seconds.size() || x.size() < 2) throw ShapeMismatch("slope needs >= 2 matched points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(seconds[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<TrainOutcome> cmd_train(const RunConfig& cfg, bool resume, std::ostream& log) {
    cfg.validate();
    const ThreadLimit threads(cfg.experiment.workers);
    const auto dir = cfg.experiment.checkpoints();
    fs::create_directories(dir);
    const auto mode = cfg.model.mode;

    std::vector<TrainOutcome> outcomes;
    for (const auto& cell : cfg.experiment.grid) {
        SimConfig sim = cfg.sim;
        sim.n_pairs = cell.n_pairs;
        sim.n_eves = cell.n_eves;
        const auto model = cell_model(cfg, cell, mode);

        TrainOutcome out{cell, checkpoint_path(dir, mode, cell), last_checkpoint_path(dir, mode, cell),
                         history_path(dir, mode, cell)};
        std::optional<training::ResumeState> state;
        if (resume) {
            auto ck = gnn::load_checkpoint(out.last_checkpoint, &model);
            state = training::ResumeState{std::move(ck.params), std::move(ck.optimizer), ck.epoch};
            log << "resuming " << cell_label(cell) << " after epoch " << state->epoch << "\n";
        }

        auto history = resume && fs::exists(out.history) ? open_out(out.history, std::ios::app) : open_out(out.history);
        if (!resume || fs::file_size(out.history) == 0) {
            write_history_csv(history, {}, cfg);
        }
        const auto result = training::train(cfg.train, sim, model, state, [&](const training::EpochRecord& e) {
            history << e.epoch << "," << num(e.train_loss) << "," << num(e.val_assr_nats) << ","
                    << num(e.val_assr_bits) << "," << num(e.wall_seconds) << "\n";
            history.flush();
            log << cell_label(cell) << " epoch " << e.epoch << " loss " << num(e.train_loss) << " val ASSR "
                << num(e.val_assr_nats) << " nats\n";
        });

        // On resume the earlier best checkpoint stays unless this session beat it.
        bool write_best = true;
        if (resume && fs::exists(out.checkpoint)) {
            const auto val = training::validation_set(cfg.train, sim);
            const double previous = training::evaluate_assr(gnn::load_params(out.checkpoint, &model), val);
            write_best = training::evaluate_assr(result.best, val) > previous;
        }
        if (write_best) gnn::save_params(out.checkpoint, result.best, result.best_epoch);
        gnn::save_params(out.last_checkpoint, result.last, result.last_epoch, &result.optimizer);

        out.best_epoch = result.best_epoch;
        out.last_epoch = result.last_epoch;
        out.early_stopped = result.early_stopped;
        log << cell_label(cell) << (result.early_stopped ? ": early stop" : ": completed") << " at epoch "
            << result.last_epoch << ", best epoch " << result.best_epoch << " -> " << out.checkpoint.string() << "\n";
        outcomes.push_back(out);
    }
    return outcomes;
}

void write_history_csv(std::ostream& os, const std::vector<training::EpochRecord>& rows, const RunConfig& cfg) {
    os << manifest_line("history", cfg) << "\n";
    os << "epoch,train_loss,val_assr_nats,val_assr_bits,wall_seconds\n";
    for (const auto& e : rows) {
        os << e.epoch << "," << num(e.train_loss) << "," << num(e.val_assr_nats) << "," << num(e.val_assr_bits) << ","
           << num(e.wall_seconds) << "\n";
    }
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("CSV not found: " + path.string());
    CsvTable table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            const std::string tag = "# manifest:";
            if (line.rfind(tag, 0) == 0) {
                for (const auto& field : split_csv_line(line.substr(tag.size()))) {
                    const auto eq = field.find('=');
                    if (eq != std::string::npos) table.manifest[field.substr(0, eq)] = field.substr(eq + 1);
                }
            }
            continue;
        }
        if (table.columns.empty()) {
            table.columns = split_csv_line(line);
        } else {
            table.rows.push_back(split_csv_line(line));
        }
    }
    return table;
}

const std::vector<std::string>& required_columns(const std::string& kind) {
    static const std::map<std::string, std::vector<std::string>> families = {
        {"compare", {"N", "K", "method", "assr_nats", "assr_bits", "std_error", "n"}},
        {"timing", {"N", "K", "method", "median_seconds", "iqr_seconds", "runs"}},
        {"history", {"epoch", "train_loss", "val_assr_nats", "val_assr_bits", "wall_seconds"}},
    };
    const auto it = families.find(kind);
    if (it == families.end()) throw SchemaMismatch("unknown CSV family '" + kind + "'");
    return it->second;
}

std::vector<fs::path> cmd_plot(const std::vector<fs::path>& csvs, const fs::path& out_dir) {
    if (csvs.empty()) throw ConfigError("plot needs at least one CSV");
    const std::vector<std::string> kinds = {"compare", "timing", "history"};
    std::vector<fs::path> written;
    for (const auto& csv : csvs) {
        const auto table = read_csv(csv);
        std::string kind;
        if (const auto it = table.manifest.find("kind"); it != table.manifest.end()) kind = it->second;

        auto missing_for = [&](const std::string& k) {
            const std::set<std::string> have(table.columns.begin(), table.columns.end());
            std::vector<std::string> missing;
            for (const auto& c : required_columns(k))
                if (!have.count(c)) missing.push_back(c);
            return missing;
        };
        if (kind.empty()) {
            // No manifest: pick the family the header matches best.
            std::size_t fewest = SIZE_MAX;
            for (const auto& k : kinds) {
                const auto m = missing_for(k).size();
                if (m < fewest) {
                    fewest = m;
                    kind = k;
                }
            }
        }
        const auto missing = missing_for(kind);
        if (table.columns.empty() || !missing.empty() || table.rows.empty()) {
            std::string list;
            for (const auto& c : (table.columns.empty() ? required_columns(kind) : missing)) list += (list.empty() ? "" : ", ") + c;
            if (table.columns.empty()) throw SchemaMismatch(csv.string() + ": empty CSV; missing columns: " + list);
            if (!missing.empty()) throw SchemaMismatch(csv.string() + ": missing columns: " + list);
            throw SchemaMismatch(csv.string() + ": header present but no data rows");
        }

        fs::create_directories(out_dir);
        const auto stem = csv.stem().string();
        const auto script = out_dir / ("plot_" + stem + ".py");
        const auto png = out_dir / (stem + ".png");
        auto os = open_out(script);
        if (kind == "compare") {
            os << compare_script(csv, png);
        } else if (kind == "timing") {
            os << timing_script(csv, png);
        } else {
            os << history_script(csv, png);
        }
        written.push_back(script);
    }
    return written;
}

}  // namespace flexsec::harness
