#include "flexsec/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "flexsec/errors.hpp"

namespace flexsec {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto s = trim(text);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw ConfigError(key + ": cannot parse '" + text + "'");
    }
    return value;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct Key {
    const char* section;
    const char* name;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T, typename Field>
Key number_key(const char* section, const char* name, Field field) {
    return Key{section, name,
               [field](RunConfig& c, const std::string& full, const std::string& v) {
                   field(c) = parse_number<T>(full, v);
               },
               [field](const RunConfig& c) {
                   const T v = field(c);
                   if constexpr (std::is_floating_point_v<T>) {
                       return format_double(v);
                   } else {
                       return std::to_string(v);
                   }
               }};
}

#define FLEXSEC_FIELD(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        number_key<double>("sim", "area_side_m", FLEXSEC_FIELD(sim.area_side_m)),
        number_key<int>("sim", "n_pairs", FLEXSEC_FIELD(sim.n_pairs)),
        number_key<int>("sim", "n_eves", FLEXSEC_FIELD(sim.n_eves)),
        number_key<double>("sim", "carrier_hz", FLEXSEC_FIELD(sim.carrier_hz)),
        number_key<double>("sim", "shadowing_db", FLEXSEC_FIELD(sim.shadowing_db)),
        number_key<double>("sim", "pmax_dbm", FLEXSEC_FIELD(sim.pmax_dbm)),
        number_key<double>("sim", "noise_dbm", FLEXSEC_FIELD(sim.noise_dbm)),
        number_key<double>("sim", "min_separation_m", FLEXSEC_FIELD(sim.min_separation_m)),
        number_key<std::uint64_t>("sim", "seed", FLEXSEC_FIELD(sim.seed)),

        number_key<int>("solver", "max_outer_iters", FLEXSEC_FIELD(solver.max_outer_iters)),
        number_key<double>("solver", "rel_tol", FLEXSEC_FIELD(solver.rel_tol)),
        number_key<int>("solver", "power_step_iters", FLEXSEC_FIELD(solver.power_step_iters)),
        number_key<double>("solver", "line_search_shrink", FLEXSEC_FIELD(solver.line_search_shrink)),
        number_key<double>("solver", "initial_step_fraction", FLEXSEC_FIELD(solver.initial_step_fraction)),

        Key{"model", "mode",
            [](RunConfig& c, const std::string&, const std::string& v) { c.model.mode = gnn::parse_eve_mode(trim(v)); },
            [](const RunConfig& c) { return std::string(gnn::to_string(c.model.mode)); }},
        number_key<int>("model", "proj_dim", FLEXSEC_FIELD(model.proj_dim)),
        number_key<int>("model", "hidden", FLEXSEC_FIELD(model.hidden)),
        number_key<int>("model", "layers", FLEXSEC_FIELD(model.layers)),
        number_key<int>("model", "head_hidden", FLEXSEC_FIELD(model.head_hidden)),
        number_key<double>("model", "distance_scale_m", FLEXSEC_FIELD(model.distance_scale_m)),
        number_key<std::uint64_t>("model", "init_seed", FLEXSEC_FIELD(model.init_seed)),

        number_key<int>("train", "n_train", FLEXSEC_FIELD(train.n_train)),
        number_key<int>("train", "batch_size", FLEXSEC_FIELD(train.batch_size)),
        number_key<double>("train", "lr", FLEXSEC_FIELD(train.lr)),
        number_key<double>("train", "weight_decay", FLEXSEC_FIELD(train.weight_decay)),
        number_key<int>("train", "epochs", FLEXSEC_FIELD(train.epochs)),
        number_key<int>("train", "early_stop_patience", FLEXSEC_FIELD(train.early_stop_patience)),
        number_key<std::uint64_t>("train", "seed", FLEXSEC_FIELD(train.seed)),
        number_key<int>("train", "n_val", FLEXSEC_FIELD(train.n_val)),

        Key{"experiment", "grid",
            [](RunConfig& c, const std::string&, const std::string& v) { c.experiment.grid = parse_grid(v); },
            [](const RunConfig& c) { return format_grid(c.experiment.grid); }},
        number_key<int>("experiment", "samples", FLEXSEC_FIELD(experiment.samples)),
        Key{"experiment", "methods",
            [](RunConfig& c, const std::string&, const std::string& v) { c.experiment.methods = parse_methods(v); },
            [](const RunConfig& c) {
                std::string out;
                for (const auto& m : c.experiment.methods) out += (out.empty() ? "" : ",") + m;
                return out;
            }},
        number_key<std::uint64_t>("experiment", "seed", FLEXSEC_FIELD(experiment.seed)),
        Key{"experiment", "out_dir",
            [](RunConfig& c, const std::string&, const std::string& v) { c.experiment.out_dir = trim(v); },
            [](const RunConfig& c) { return c.experiment.out_dir.string(); }},
        Key{"experiment", "checkpoint_dir",
            [](RunConfig& c, const std::string&, const std::string& v) { c.experiment.checkpoint_dir = trim(v); },
            [](const RunConfig& c) { return c.experiment.checkpoint_dir.string(); }},
        number_key<int>("experiment", "workers", FLEXSEC_FIELD(experiment.workers)),
        number_key<int>("experiment", "timing_runs", FLEXSEC_FIELD(experiment.timing_runs)),
    };
    return table;
}

#undef FLEXSEC_FIELD

// Keys that describe where output goes rather than what is computed; kept
// out of the config hash so moving a run does not change its identity.
bool hashed(const Key& k) {
    const std::string s = k.section, n = k.name;
    return !(s == "experiment" && (n == "out_dir" || n == "checkpoint_dir" || n == "workers"));
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    return s;
}

}  // namespace

void ExperimentSpec::validate() const {
    if (grid.empty()) throw ConfigError("experiment grid must not be empty");
    for (const auto& c : grid) {
        if (c.n_pairs < 1 || c.n_eves < 1) throw ConfigError("grid cells need n_pairs >= 1 and n_eves >= 1");
    }
    if (methods.empty()) throw ConfigError("experiment methods must not be empty");
    for (const auto& m : methods) {
        if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end()) {
            throw ConfigError("unknown method '" + m + "'");
        }
    }
    if (samples < 1) throw ConfigError("experiment samples must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (timing_runs < 1) throw ConfigError("timing_runs must be >= 1");
}

void RunConfig::validate() const {
    sim.validate();
    solver.validate();
    train.validate();
    experiment.validate();
    if (model.proj_dim < 1 || model.hidden < 1 || model.layers < 1 || model.head_hidden < 1) {
        throw ConfigError("model widths and layer count must be positive");
    }
    if (!(model.distance_scale_m > 0.0)) throw ConfigError("distance_scale_m must be > 0");
}

std::vector<Cell> parse_grid(const std::string& text) {
    std::vector<Cell> grid;
    for (const auto& item : split(text, ',')) {
        const auto x = item.find_first_of("xX");
        if (x == std::string::npos) throw ConfigError("grid cell '" + item + "' is not NxK");
        grid.push_back(Cell{parse_number<int>("grid", item.substr(0, x)), parse_number<int>("grid", item.substr(x + 1))});
    }
    if (grid.empty()) throw ConfigError("grid must list at least one NxK cell");
    return grid;
}

std::string format_grid(const std::vector<Cell>& grid) {
    std::string out;
    for (const auto& c : grid) out += (out.empty() ? "" : ",") + std::to_string(c.n_pairs) + "x" + std::to_string(c.n_eves);
    return out;
}

std::vector<std::string> parse_methods(const std::string& text) {
    auto methods = split(text, ',');
    for (const auto& m : methods) {
        if (std::find(kAllMethods.begin(), kAllMethods.end(), m) == kAllMethods.end()) {
            throw ConfigError("unknown method '" + m + "'");
        }
    }
    if (methods.empty()) throw ConfigError("method list is empty");
    return methods;
}

void set_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
    bool section_known = false;
    for (const auto& k : keys()) {
        if (section != k.section) continue;
        section_known = true;
        if (key == k.name) {
            try {
                k.set(cfg, section + "." + key, value);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError(section + "." + key + ": " + e.what());
            }
            return;
        }
    }
    if (!section_known) throw ConfigError("unknown config section [" + section + "]");
    throw ConfigError("unknown config key " + section + "." + key);
}

void apply_ini(RunConfig& cfg, const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = origin + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        if (section.empty()) throw ConfigError(where + "key outside of a section");
        try {
            set_value(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
}

void apply_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    apply_ini(cfg, buf.str(), path.string());
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

void apply_env(RunConfig& cfg, const EnvLookup& lookup) {
    for (const auto& k : keys()) {
        const std::string var = "FLEXSEC_" + upper(k.section) + "_" + upper(k.name);
        if (const auto v = lookup(var)) {
            try {
                k.set(cfg, std::string(k.section) + "." + k.name, *v);
            } catch (const std::exception& e) {
                throw ConfigError(var + ": " + e.what());
            }
        }
    }
}

std::string canonical(const RunConfig& cfg) {
    std::string out;
    for (const auto& k : keys()) {
        if (!hashed(k)) continue;
        out += std::string(k.section) + "." + k.name + "=" + k.get(cfg) + "\n";
    }
    return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, value >>= 4) out[static_cast<std::size_t>(i)] = digits[value & 0xf];
    return out;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a(canonical(cfg)); }

}  // namespace flexsec
