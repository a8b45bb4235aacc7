#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "flexsec/config.hpp"
#include "flexsec/errors.hpp"

using namespace flexsec;

namespace {

EnvLookup fake_env(std::map<std::string, std::string> vars) {
    return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
        auto it = vars.find(name);
        if (it == vars.end()) return std::nullopt;
        return it->second;
    };
}

bool message_has(const std::function<void()>& f, const std::string& needle) {
    try {
        f();
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("INI parsing") {
    RunConfig cfg;
    apply_ini(cfg,
              "# comment\n"
              "[sim]\n"
              "n_pairs = 4   ; trailing comment\n"
              "shadowing_db=6.5\n"
              "\n"
              "[model]\n"
              "mode = distance\n"
              "[experiment]\n"
              "grid = 2x2, 8x2\n"
              "methods = hd,max-power\n"
              "out_dir = results\n");
    CHECK(cfg.sim.n_pairs == 4);
    CHECK(cfg.sim.shadowing_db == 6.5);
    CHECK(cfg.model.mode == gnn::EveMode::distance);
    CHECK(cfg.experiment.grid == std::vector<Cell>{{2, 2}, {8, 2}});
    CHECK(cfg.experiment.methods == std::vector<std::string>{"hd", "max-power"});
    CHECK(cfg.experiment.out_dir == "results");
    CHECK(cfg.experiment.checkpoints() == "results");
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("INI errors carry location") {
    RunConfig cfg;
    CHECK(message_has([&] { apply_ini(cfg, "[sim]\nbogus = 1\n", "run.ini"); }, "run.ini:2"));
    CHECK(message_has([&] { apply_ini(cfg, "[nosuch]\nx = 1\n"); }, "unknown config section"));
    CHECK(message_has([&] { apply_ini(cfg, "[sim]\nn_pairs = many\n"); }, "sim.n_pairs"));
    CHECK(message_has([&] { apply_ini(cfg, "n_pairs = 2\n"); }, "outside of a section"));
    CHECK(message_has([&] { apply_ini(cfg, "[sim\n"); }, "unterminated"));
    CHECK(message_has([&] { apply_ini(cfg, "[sim]\njunk\n"); }, "key = value"));
    CHECK_THROWS_AS(apply_file(cfg, "/nonexistent/flexsec.ini"), ConfigError);
}

TEST_CASE("precedence: defaults < file < environment") {
    const auto path = std::filesystem::temp_directory_path() / "flexsec_config_test.ini";
    std::ofstream(path) << "[train]\nepochs = 7\nlr = 0.01\n";
    RunConfig cfg;
    CHECK(cfg.train.epochs == 100);
    apply_file(cfg, path);
    CHECK(cfg.train.epochs == 7);
    apply_env(cfg, fake_env({{"FLEXSEC_TRAIN_EPOCHS", "3"}, {"FLEXSEC_EXPERIMENT_GRID", "4x1"}}));
    CHECK(cfg.train.epochs == 3);
    CHECK(cfg.train.lr == 0.01);
    CHECK(cfg.experiment.grid == std::vector<Cell>{{4, 1}});
    CHECK(message_has([&] { apply_env(cfg, fake_env({{"FLEXSEC_SIM_N_EVES", "x"}})); }, "FLEXSEC_SIM_N_EVES"));
}

TEST_CASE("grid and method lists") {
    CHECK(parse_grid("8x2") == std::vector<Cell>{{8, 2}});
    CHECK(format_grid(parse_grid("2x2,16X4")) == "2x2,16x4");
    CHECK_THROWS_AS(parse_grid("8by2"), ConfigError);
    CHECK_THROWS_AS(parse_grid(""), ConfigError);
    CHECK(parse_methods("gnn-csi,classical").size() == 2);
    CHECK_THROWS_AS(parse_methods("classical,oracle"), ConfigError);

    RunConfig cfg;
    cfg.experiment.grid = {{0, 2}};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.experiment.grid = {{2, 2}};
    cfg.experiment.samples = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.experiment.samples = 1;
    cfg.experiment.methods.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config hash") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
    CHECK(hex64(0xabcull) == "0000000000000abc");

    RunConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.experiment.out_dir = "elsewhere";
    b.experiment.workers = 8;
    CHECK(config_hash(a) == config_hash(b));
    b.experiment.seed = 2;
    CHECK(config_hash(a) != config_hash(b));

    const std::string text = canonical(a);
    CHECK(text.find("sim.n_pairs=2\n") != std::string::npos);
    CHECK(text.find("out_dir") == std::string::npos);

    // Every canonical line parses back into an identical config.
    RunConfig round;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto dot = line.find('.'), eq = line.find('=');
        set_value(round, line.substr(0, dot), line.substr(dot + 1, eq - dot - 1), line.substr(eq + 1));
    }
    CHECK(canonical(round) == text);
}
