#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "flexsec/errors.hpp"
#include "flexsec/harness.hpp"

using namespace flexsec;
using namespace flexsec::harness;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "flexsec_harness" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig small_run(const fs::path& out) {
    RunConfig cfg;
    cfg.experiment.out_dir = out;
    cfg.experiment.samples = 10;
    cfg.experiment.grid = {{2, 2}};
    cfg.model.proj_dim = 3;
    cfg.model.hidden = 8;
    cfg.model.layers = 2;
    cfg.model.head_hidden = 6;
    cfg.train.n_train = 128;
    cfg.train.batch_size = 64;
    cfg.train.n_val = 32;
    cfg.train.epochs = 1;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("cell seeds and file names") {
    CHECK(cell_seed(1, {2, 2}) == cell_seed(1, {2, 2}));
    CHECK(cell_seed(1, {2, 2}) != cell_seed(1, {8, 2}));
    CHECK(cell_seed(1, {2, 2}) != cell_seed(2, {2, 2}));
    CHECK(dataset_path("o", {8, 2}) == fs::path("o/data-N8-K2.fxds"));
    CHECK(checkpoint_path("o", gnn::EveMode::distance, {2, 4}).filename() == "gnn-distance-N2-K4.ckpt");
    const auto line = manifest_line("compare", RunConfig{});
    CHECK(line.rfind("# manifest: kind=compare, hash=", 0) == 0);
    CHECK(line.find("seed=1") != std::string::npos);
    CHECK(line.find("version=") != std::string::npos);
}

TEST_CASE("generate") {
    const auto dir = fresh_dir("generate");
    auto cfg = small_run(dir);
    std::ostringstream log;
    const auto r1 = cmd_generate(cfg, log);
    REQUIRE(r1.datasets.size() == 1);
    const auto data = load_dataset(r1.datasets[0]);
    CHECK(data.size() == 10);
    CHECK(fs::exists(dir / "manifest.json"));
    const auto manifest = nlohmann::json::parse(slurp(r1.manifest));
    CHECK(manifest["config_hash"] == r1.config_hash);
    CHECK(manifest["cells"].size() == 1);
    CHECK(manifest["cells"][0]["samples"] == 10);

    const auto r2 = cmd_generate(cfg, log);
    CHECK(r2.config_hash == r1.config_hash);
    CHECK_FALSE(r2.hash_collision);
    CHECK(slurp(r2.manifest) == slurp(r1.manifest));

    cfg.experiment.seed = 2;
    const auto dir2 = fresh_dir("generate2");
    cfg.experiment.out_dir = dir2;
    const auto r3 = cmd_generate(cfg, log);
    CHECK(r3.config_hash != r1.config_hash);
    const auto other = load_dataset(r3.datasets[0]);
    REQUIRE(other.size() == data.size());
    CHECK_FALSE(other[0] == data[0]);
    CHECK(other[0].H.rows() == data[0].H.rows());
    CHECK(other[0].G.cols() == data[0].G.cols());
}

TEST_CASE("compare") {
    const auto dir = fresh_dir("compare");
    auto cfg = small_run(dir);
    cfg.experiment.grid = {{2, 2}, {3, 1}};
    cfg.experiment.methods = {"hd", "max-power"};
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_compare(cfg, log), MissingArtifact);

    cmd_generate(cfg, log);
    const auto rows = cmd_compare(cfg, log);
    CHECK(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(std::isfinite(r.assr_nats));
        CHECK(r.n == 10);
        CHECK(r.assr_bits == doctest::Approx(nats_to_bits(r.assr_nats)));
    }
    const auto table = read_csv(dir / "compare.csv");
    CHECK(table.columns == required_columns("compare"));
    CHECK(table.rows.size() == 4);
    CHECK(table.manifest.at("kind") == "compare");
    CHECK(table.manifest.at("hash") == hex64(config_hash(cfg)));

    const auto again = cmd_compare(cfg, log);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].assr_nats == rows[i].assr_nats);

    cfg.experiment.methods.push_back("classical");
    CHECK(cmd_compare(cfg, log).size() == 6);

    cfg.experiment.methods = {"gnn-csi"};
    try {
        cmd_compare(cfg, log);
        FAIL("expected a missing checkpoint");
    } catch (const MissingArtifact& e) {
        CHECK(std::string(e.what()).find("N=2,K=2") != std::string::npos);
    }
}

TEST_CASE("timing") {
    const auto dir = fresh_dir("timing");
    auto cfg = small_run(dir);
    cfg.model = gnn::ModelConfig{};
    cfg.experiment.grid = {{2, 2}, {16, 2}};
    cfg.experiment.methods = {"gnn-csi", "max-power"};
    std::ostringstream log;
    const auto rows = cmd_timing(cfg, log);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].runs >= 20);
    CHECK(rows[0].method == "gnn-csi");
    CHECK(rows[2].method == "gnn-csi");
    CHECK(rows[2].median_seconds > rows[0].median_seconds);
    CHECK(read_csv(dir / "timing.csv").columns == required_columns("timing"));

    const auto s = summarize_times({4.0, 1.0, 3.0, 2.0, 5.0});
    CHECK(s.median == 3.0);
    CHECK(s.iqr == 2.0);
    CHECK(loglog_slope({1, 2, 4}, {3.0, 12.0, 48.0}) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("train and resume") {
    const auto dir = fresh_dir("train");
    auto cfg = small_run(dir);
    std::ostringstream log;
    const auto first = cmd_train(cfg, false, log);
    REQUIRE(first.size() == 1);
    CHECK(fs::exists(first[0].checkpoint));
    CHECK(fs::exists(first[0].last_checkpoint));
    CHECK(first[0].last_epoch == 1);

    const auto second = cmd_train(cfg, true, log);
    CHECK(second[0].last_epoch == 2);
    const auto history = read_csv(first[0].history);
    CHECK(history.columns == required_columns("history"));
    REQUIRE(history.rows.size() == 2);
    CHECK(history.rows[0][0] == "1");
    CHECK(history.rows[1][0] == "2");

    SUBCASE("distance checkpoints load only in distance mode") {
        cfg.model.mode = gnn::EveMode::distance;
        const auto dist = cmd_train(cfg, false, log);
        auto expect = cfg.model;
        expect.n_eves = 2;
        CHECK_NOTHROW(gnn::load_params(dist[0].checkpoint, &expect));
        expect.mode = gnn::EveMode::csi;
        CHECK_THROWS_AS(gnn::load_params(dist[0].checkpoint, &expect), ShapeMismatch);
    }
    SUBCASE("compare picks up the trained model") {
        cfg.experiment.methods = {"gnn-csi"};
        cmd_generate(cfg, log);
        const auto rows = cmd_compare(cfg, log);
        REQUIRE(rows.size() == 1);
        CHECK(std::isfinite(rows[0].assr_nats));
    }
    SUBCASE("resume without a last checkpoint") {
        auto other = small_run(fresh_dir("train_missing"));
        CHECK_THROWS_AS(cmd_train(other, true, log), MissingArtifact);
    }
}

TEST_CASE("plot scripts") {
    const auto dir = fresh_dir("plot");
    auto cfg = small_run(dir);
    cfg.experiment.methods = {"hd", "max-power"};
    std::ostringstream log;
    cmd_generate(cfg, log);
    cmd_compare(cfg, log);

    const auto scripts = cmd_plot({dir / "compare.csv"}, dir / "plots");
    REQUIRE(scripts.size() == 1);
    const std::string text = slurp(scripts[0]);
    CHECK(text.find("matplotlib") != std::string::npos);
    CHECK(text.find("savefig") != std::string::npos);
    const auto columns = read_csv(dir / "compare.csv").columns;
    const std::set<std::string> have(columns.begin(), columns.end());
    const std::regex ref(R"re(r\["([A-Za-z_]+)"\])re");
    int refs = 0;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), ref); it != std::sregex_iterator(); ++it) {
        ++refs;
        CHECK(have.count((*it)[1].str()) == 1);
    }
    CHECK(refs > 0);

    const auto empty = dir / "empty.csv";
    std::ofstream(empty).close();
    CHECK_THROWS_AS(cmd_plot({empty}, dir), SchemaMismatch);

    const auto partial = dir / "partial.csv";
    std::ofstream(partial) << "N,K,method,assr_nats\n2,2,hd,0.5\n";
    try {
        cmd_plot({partial}, dir);
        FAIL("expected a schema mismatch");
    } catch (const SchemaMismatch& e) {
        CHECK(std::string(e.what()).find("std_error") != std::string::npos);
    }
    CHECK_THROWS_AS(cmd_plot({dir / "absent.csv"}, dir), MissingArtifact);
}
