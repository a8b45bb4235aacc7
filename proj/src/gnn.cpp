#include "flexsec/gnn.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "binio.hpp"
#include "flexsec/errors.hpp"

namespace flexsec::gnn {

namespace {

constexpr char kCheckpointMagic[5] = "FXCK";
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr double kStdFloor = 1e-12;

std::string layer_name(const char* base, int layer) { return std::string(base) + "." + std::to_string(layer); }

// Fixed tensor layout; every shape follows from the config alone.
std::vector<std::pair<std::string, std::pair<int, int>>> tensor_layout(const ModelConfig& cfg) {
    std::vector<std::pair<std::string, std::pair<int, int>>> out;
    out.push_back({"W_p", {cfg.projected_width(), cfg.eve_input_width()}});
    int in = cfg.node_input_width();
    for (int l = 0; l < cfg.layers; ++l) {
        out.push_back({layer_name("W_s", l), {cfg.hidden, in}});
        out.push_back({layer_name("W_i", l), {cfg.hidden, in}});
        out.push_back({layer_name("W_e", l), {cfg.hidden, ModelConfig::kEdgeWidth}});
        in = cfg.hidden;
    }
    for (const char* head : {"f_p", "f_t"}) {
        const int out_width = std::string(head) == "f_p" ? 1 : 2;
        const std::string h(head);
        out.push_back({h + ".0.W", {cfg.head_hidden, cfg.hidden}});
        out.push_back({h + ".0.b", {1, cfg.head_hidden}});
        out.push_back({h + ".1.W", {cfg.head_hidden, cfg.head_hidden}});
        out.push_back({h + ".1.b", {1, cfg.head_hidden}});
        out.push_back({h + ".2.W", {out_width, cfg.head_hidden}});
        out.push_back({h + ".2.b", {1, out_width}});
    }
    return out;
}

Tensor standardize(const Tensor& x, const RVector& mean, const RVector& stdev) {
    if (mean.size() != x.cols() || stdev.size() != x.cols()) {
        throw ShapeMismatch("feature statistics have width " + std::to_string(mean.size()) + ", features have " +
                            std::to_string(x.cols()));
    }
    Tensor out = x;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        out.col(c) = (x.col(c).array() - mean[c]) / std::max(stdev[c], kStdFloor);
    }
    return out;
}

void column_stats(const std::vector<const Tensor*>& blocks, Eigen::Index width, RVector& mean, RVector& stdev) {
    mean = RVector::Zero(width);
    stdev = RVector::Ones(width);
    double count = 0.0;
    RVector sum = RVector::Zero(width);
    RVector sq = RVector::Zero(width);
    for (const auto* b : blocks) {
        if (b->rows() == 0) continue;
        sum += b->colwise().sum().transpose();
        sq += b->array().square().matrix().colwise().sum().transpose();
        count += static_cast<double>(b->rows());
    }
    if (count == 0.0) return;
    mean = sum / count;
    for (Eigen::Index c = 0; c < width; ++c) {
        const double var = std::max(0.0, sq[c] / count - mean[c] * mean[c]);
        stdev[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
}

Tensor to_tensor(const RVector& v) { return Tensor(v.transpose()); }

RVector to_vector(const Tensor& t, const std::string& name) {
    if (t.rows() != 1) throw CorruptFile("statistics record " + name + " is not a row vector");
    return t.row(0).transpose();
}

Tensor gelu_plain(const Tensor& x) { return x.unaryExpr([](double v) { return ad::gelu_value(v); }); }

}  // namespace

const char* to_string(EveMode mode) { return mode == EveMode::csi ? "csi" : "distance"; }

EveMode parse_eve_mode(const std::string& text) {
    if (text == "csi" || text == "gnn-csi") return EveMode::csi;
    if (text == "distance" || text == "gnn-distance") return EveMode::distance;
    throw ConfigError("unknown mode '" + text + "' (expected csi or distance)");
}

Tensor& ModelParams::at(const std::string& name) {
    for (auto& t : tensors)
        if (t.name == name) return t.value;
    throw ShapeMismatch("model has no tensor named " + name);
}

const Tensor& ModelParams::at(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return t.value;
    throw ShapeMismatch("model has no tensor named " + name);
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += static_cast<std::size_t>(t.value.size());
    return n;
}

ModelParams init_params(const ModelConfig& cfg) {
    if (cfg.n_eves < 1 || cfg.proj_dim < 1 || cfg.hidden < 1 || cfg.layers < 1 || cfg.head_hidden < 1) {
        throw ConfigError("model dimensions must be positive");
    }
    ModelParams params;
    params.config = cfg;
    Rng rng(cfg.init_seed);
    for (const auto& [name, shape] : tensor_layout(cfg)) {
        const auto [rows, cols] = shape;
        Tensor value = Tensor::Zero(rows, cols);
        if (name.back() != 'b') {
            const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
            std::uniform_real_distribution<double> u(-bound, bound);
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) value(r, c) = u(rng);
        }
        params.tensors.push_back({name, std::move(value)});
    }
    auto& s = params.stats;
    s.node_mean = RVector::Zero(4);
    s.node_std = RVector::Ones(4);
    s.edge_mean = RVector::Zero(ModelConfig::kEdgeWidth);
    s.edge_std = RVector::Ones(ModelConfig::kEdgeWidth);
    s.eve_mean = RVector::Zero(cfg.eve_input_width());
    s.eve_std = RVector::Ones(cfg.eve_input_width());
    return params;
}

PairGraph raw_graph(const NetworkRealization& real, const ModelConfig& cfg) {
    if (real.n_eves() != cfg.n_eves) {
        throw ShapeMismatch("model expects " + std::to_string(cfg.n_eves) + " eavesdroppers, realization has " +
                            std::to_string(real.n_eves()));
    }
    const int n_nodes = real.n_pairs();
    const int k = real.n_eves();
    const double inv_sigma = 1.0 / std::sqrt(real.noise_w);
    auto h = [&](int to, int from) { return real.H(to, from) * inv_sigma; };

    PairGraph g;
    g.n_nodes = n_nodes;
    g.node_channels.resize(n_nodes, 4);
    g.eve_inputs.resize(n_nodes, cfg.eve_input_width());
    g.edges.resize(static_cast<Eigen::Index>(n_nodes) * (n_nodes - 1), ModelConfig::kEdgeWidth);

    for (int p = 0; p < n_nodes; ++p) {
        const int a = 2 * p;      // "n"
        const int b = 2 * p + 1;  // "m"
        const cdouble h_mn = h(b, a);
        const cdouble h_nm = h(a, b);
        g.node_channels.row(p) << h_mn.real(), h_mn.imag(), h_nm.real(), h_nm.imag();

        if (cfg.mode == EveMode::csi) {
            for (int e = 0; e < k; ++e) {
                const cdouble gm = real.G(b, e) * inv_sigma;
                const cdouble gn = real.G(a, e) * inv_sigma;
                g.eve_inputs(p, e) = gm.real();
                g.eve_inputs(p, k + e) = gm.imag();
                g.eve_inputs(p, 2 * k + e) = gn.real();
                g.eve_inputs(p, 3 * k + e) = gn.imag();
            }
        } else {
            for (int e = 0; e < k; ++e) {
                g.eve_inputs(p, e) = real.D(b, e) / cfg.distance_scale_m;
                g.eve_inputs(p, k + e) = real.D(a, e) / cfg.distance_scale_m;
            }
        }
    }

    for (int p = 0; p < n_nodes; ++p) {
        const int n = 2 * p, m = 2 * p + 1;
        for (int q = 0; q < n_nodes; ++q) {
            if (q == p) continue;
            const int j = 2 * q, i = 2 * q + 1;
            const cdouble s[8] = {h(n, j), h(j, n), h(m, j), h(j, m), h(n, i), h(i, n), h(m, i), h(i, m)};
            const int row = PairGraph::edge_index(p, q, n_nodes);
            for (int c = 0; c < 8; ++c) {
                g.edges(row, 2 * c) = s[c].real();
                g.edges(row, 2 * c + 1) = s[c].imag();
            }
        }
    }
    return g;
}

PairGraph build_graph(const NetworkRealization& real, const ModelParams& params) {
    PairGraph g = raw_graph(real, params.config);
    const auto& s = params.stats;
    g.node_channels = standardize(g.node_channels, s.node_mean, s.node_std);
    g.eve_inputs = standardize(g.eve_inputs, s.eve_mean, s.eve_std);
    if (g.edges.rows() > 0) g.edges = standardize(g.edges, s.edge_mean, s.edge_std);
    return g;
}

FeatureStats compute_feature_stats(const std::vector<NetworkRealization>& data, const ModelConfig& cfg) {
    std::vector<PairGraph> graphs;
    graphs.reserve(data.size());
    for (const auto& real : data) graphs.push_back(raw_graph(real, cfg));
    std::vector<const Tensor*> nodes, edges, eves;
    for (const auto& g : graphs) {
        nodes.push_back(&g.node_channels);
        edges.push_back(&g.edges);
        eves.push_back(&g.eve_inputs);
    }
    FeatureStats s;
    column_stats(nodes, 4, s.node_mean, s.node_std);
    column_stats(edges, ModelConfig::kEdgeWidth, s.edge_mean, s.edge_std);
    column_stats(eves, cfg.eve_input_width(), s.eve_mean, s.eve_std);
    return s;
}

Tensor project_eves(const Tensor& eve_inputs, const Tensor& w_p) {
    if (eve_inputs.cols() != w_p.cols()) {
        throw ShapeMismatch("W_p expects " + std::to_string(w_p.cols()) + " inputs, got " +
                            std::to_string(eve_inputs.cols()));
    }
    return eve_inputs * w_p.transpose();
}

RVector project_eves_csi(const CVector& g_m, const CVector& g_n, const Tensor& w_p) {
    if (g_m.size() != g_n.size()) throw ShapeMismatch("eavesdropper channel vectors differ in length");
    const auto k = g_m.size();
    Tensor in(1, 4 * k);
    in << g_m.real().transpose(), g_m.imag().transpose(), g_n.real().transpose(), g_n.imag().transpose();
    return project_eves(in, w_p).row(0).transpose();
}

RVector project_eves_distance(const RVector& d_m, const RVector& d_n, const Tensor& w_p, double distance_scale_m) {
    if (d_m.size() != d_n.size()) throw ShapeMismatch("distance vectors differ in length");
    Tensor in(1, 2 * d_m.size());
    in << d_m.transpose() / distance_scale_m, d_n.transpose() / distance_scale_m;
    return project_eves(in, w_p).row(0).transpose();
}

Tensor message_pass(const Tensor& x, const Tensor& edges, int n_nodes, const Tensor& w_s, const Tensor& w_i,
                    const Tensor& w_e) {
    if (x.rows() != n_nodes || x.cols() != w_s.cols() || x.cols() != w_i.cols() || edges.cols() != w_e.cols() ||
        edges.rows() != static_cast<Eigen::Index>(n_nodes) * (n_nodes - 1)) {
        throw ShapeMismatch("message_pass: feature widths do not match the layer weights");
    }
    const Tensor self = x * w_s.transpose();
    const Tensor neigh = x * w_i.transpose();
    const Tensor msg = edges * w_e.transpose();
    Tensor pre = self;
    const Eigen::RowVectorXd neigh_total = neigh.colwise().sum();
    for (int n = 0; n < n_nodes; ++n) {
        pre.row(n) += neigh_total - neigh.row(n);
        for (int j = 0; j < n_nodes; ++j)
            if (j != n) pre.row(n) += msg.row(PairGraph::edge_index(n, j, n_nodes));
    }
    return gelu_plain(pre);
}

double readout_power(double f_p_output, double pmax_w) {
    const double s = f_p_output >= 0.0 ? 1.0 / (1.0 + std::exp(-f_p_output))
                                       : std::exp(f_p_output) / (1.0 + std::exp(f_p_output));
    return pmax_w * s;
}

Eigen::Vector2d readout_direction(const Eigen::Vector2d& f_t_output) {
    const Eigen::Vector2d e = (f_t_output.array() - f_t_output.maxCoeff()).exp();
    return e / e.sum();
}

ad::Var ParamVars::get(const ModelParams& params, const std::string& name) const {
    for (std::size_t i = 0; i < params.tensors.size(); ++i)
        if (params.tensors[i].name == name) return vars[i];
    throw ShapeMismatch("model has no tensor named " + name);
}

ParamVars register_params(ad::Tape& tape, const ModelParams& params, bool requires_grad) {
    ParamVars pv;
    pv.vars.reserve(params.tensors.size());
    for (const auto& t : params.tensors) pv.vars.push_back(tape.leaf(t.value, requires_grad));
    return pv;
}

SoftOutputs forward(ad::Tape& tape, const ParamVars& vars, const ModelParams& params,
                    const std::vector<const PairGraph*>& graphs, double pmax_w) {
    if (graphs.empty()) throw ShapeMismatch("forward needs at least one graph");
    const auto& cfg = params.config;
    const int n_nodes = graphs.front()->n_nodes;
    const auto batch = static_cast<Eigen::Index>(graphs.size());
    const Eigen::Index rows = batch * n_nodes;
    const Eigen::Index edge_rows = batch * n_nodes * (n_nodes - 1);

    Tensor node_ch(rows, 4), eve_in(rows, cfg.eve_input_width()), edges(edge_rows, ModelConfig::kEdgeWidth);
    for (Eigen::Index b = 0; b < batch; ++b) {
        const auto& g = *graphs[static_cast<std::size_t>(b)];
        if (g.n_nodes != n_nodes) throw ShapeMismatch("graphs in a batch must share the node count");
        node_ch.middleRows(b * n_nodes, n_nodes) = g.node_channels;
        eve_in.middleRows(b * n_nodes, n_nodes) = g.eve_inputs;
        if (g.n_edges() > 0) edges.middleRows(b * g.n_edges(), g.n_edges()) = g.edges;
    }

    auto get = [&](const std::string& name) { return vars.get(params, name); };
    const ad::Var y = ad::matmul_nt(tape.constant(std::move(eve_in)), get("W_p"));
    ad::Var x = ad::concat_cols({tape.constant(std::move(node_ch)), y});
    const ad::Var e = tape.constant(std::move(edges));

    for (int l = 0; l < cfg.layers; ++l) {
        const ad::Var self = ad::matmul_nt(x, get(layer_name("W_s", l)));
        const ad::Var neigh = ad::neighbor_sum(ad::matmul_nt(x, get(layer_name("W_i", l))), n_nodes);
        const ad::Var msg = ad::segment_sum(ad::matmul_nt(e, get(layer_name("W_e", l))), n_nodes - 1, rows);
        x = ad::gelu(ad::add(ad::add(self, neigh), msg));
    }

    auto head = [&](const std::string& h) {
        ad::Var z = ad::gelu(ad::add_row_bias(ad::matmul_nt(x, get(h + ".0.W")), get(h + ".0.b")));
        z = ad::gelu(ad::add_row_bias(ad::matmul_nt(z, get(h + ".1.W")), get(h + ".1.b")));
        return ad::add_row_bias(ad::matmul_nt(z, get(h + ".2.W")), get(h + ".2.b"));
    };
    SoftOutputs out;
    out.power = ad::scale(ad::sigmoid(head("f_p")), pmax_w);
    out.direction = ad::softmax_rows(head("f_t"));
    out.embedding = x;
    return out;
}

Schedule harden(const Tensor& power, const Tensor& direction, Eigen::Index row_offset, int n_pairs) {
    Schedule s;
    s.t = Eigen::VectorXi::Zero(2 * n_pairs);
    s.p = RVector::Zero(2 * n_pairs);
    for (int p = 0; p < n_pairs; ++p) {
        const auto r = row_offset + p;
        const int tx = direction(r, 0) >= direction(r, 1) ? 2 * p : 2 * p + 1;
        s.t[tx] = 1;
        s.p[tx] = power(r, 0);
    }
    return s;
}

Schedule infer(const NetworkRealization& real, const ModelParams& params) {
    // Tape-free evaluation of the same network as forward().
    const PairGraph g = build_graph(real, params);
    const auto& cfg = params.config;
    Tensor x(g.n_nodes, cfg.node_input_width());
    x << g.node_channels, project_eves(g.eve_inputs, params.at("W_p"));
    for (int l = 0; l < cfg.layers; ++l) {
        x = message_pass(x, g.edges, g.n_nodes, params.at(layer_name("W_s", l)), params.at(layer_name("W_i", l)),
                         params.at(layer_name("W_e", l)));
    }
    auto head = [&](const std::string& h) {
        Tensor z = gelu_plain((x * params.at(h + ".0.W").transpose()).rowwise() + params.at(h + ".0.b").row(0));
        z = gelu_plain((z * params.at(h + ".1.W").transpose()).rowwise() + params.at(h + ".1.b").row(0));
        return Tensor((z * params.at(h + ".2.W").transpose()).rowwise() + params.at(h + ".2.b").row(0));
    };
    const Tensor f_p = head("f_p");
    const Tensor f_t = head("f_t");
    Tensor power(g.n_nodes, 1), direction(g.n_nodes, 2);
    for (int n = 0; n < g.n_nodes; ++n) {
        power(n, 0) = readout_power(f_p(n, 0), real.pmax_w);
        direction.row(n) = readout_direction(f_t.row(n).transpose()).transpose();
    }
    return harden(power, direction, 0, real.n_pairs());
}

void save_params(const std::filesystem::path& path, const ModelParams& params, long epoch,
                 const ad::AdamWState* optimizer) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    const auto& c = params.config;
    binio::put_magic(os, kCheckpointMagic);
    binio::put_u32(os, kCheckpointVersion);
    binio::put_u32(os, c.mode == EveMode::csi ? 0u : 1u);
    binio::put_u32(os, static_cast<std::uint32_t>(c.n_eves));
    binio::put_u32(os, static_cast<std::uint32_t>(c.proj_dim));
    binio::put_u32(os, static_cast<std::uint32_t>(c.hidden));
    binio::put_u32(os, static_cast<std::uint32_t>(c.layers));
    binio::put_u32(os, static_cast<std::uint32_t>(c.head_hidden));
    binio::put_f64(os, c.distance_scale_m);
    binio::put_u64(os, c.init_seed);
    binio::put_u64(os, static_cast<std::uint64_t>(epoch));

    std::vector<std::pair<std::string, const Tensor*>> records;
    for (const auto& t : params.tensors) records.emplace_back(t.name, &t.value);
    const auto& s = params.stats;
    const Tensor stats[6] = {to_tensor(s.node_mean), to_tensor(s.node_std), to_tensor(s.edge_mean),
                             to_tensor(s.edge_std),  to_tensor(s.eve_mean),  to_tensor(s.eve_std)};
    const char* stat_names[6] = {"norm.node_mean", "norm.node_std", "norm.edge_mean",
                                 "norm.edge_std",  "norm.eve_mean",  "norm.eve_std"};
    for (int i = 0; i < 6; ++i) records.emplace_back(stat_names[i], &stats[i]);
    Tensor step(1, 1);
    if (optimizer != nullptr && !optimizer->m.empty()) {
        for (std::size_t i = 0; i < params.tensors.size(); ++i) {
            records.emplace_back("adam.m." + params.tensors[i].name, &optimizer->m[i]);
            records.emplace_back("adam.v." + params.tensors[i].name, &optimizer->v[i]);
        }
        step(0, 0) = static_cast<double>(optimizer->step);
        records.emplace_back("adam.step", &step);
    }

    binio::put_u32(os, static_cast<std::uint32_t>(records.size()));
    for (const auto& [name, t] : records) {
        binio::put_string(os, name);
        binio::put_u32(os, 2);
        binio::put_u64(os, static_cast<std::uint64_t>(t->rows()));
        binio::put_u64(os, static_cast<std::uint64_t>(t->cols()));
        for (Eigen::Index r = 0; r < t->rows(); ++r)
            for (Eigen::Index col = 0; col < t->cols(); ++col) binio::put_f64(os, (*t)(r, col));
    }
    if (!os) throw Error("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingArtifact("checkpoint not found: " + path.string());
    binio::expect_magic(is, kCheckpointMagic, "checkpoint");
    const auto version = binio::get_u32(is, "checkpoint version");
    if (version != kCheckpointVersion) {
        throw VersionMismatch("checkpoint version " + std::to_string(version) + ", expected " +
                              std::to_string(kCheckpointVersion));
    }
    ModelConfig cfg;
    const auto mode = binio::get_u32(is, "checkpoint header");
    if (mode > 1) throw CorruptFile("unknown eavesdropper mode in checkpoint");
    cfg.mode = mode == 0 ? EveMode::csi : EveMode::distance;
    cfg.n_eves = static_cast<int>(binio::get_u32(is, "checkpoint header"));
    cfg.proj_dim = static_cast<int>(binio::get_u32(is, "checkpoint header"));
    cfg.hidden = static_cast<int>(binio::get_u32(is, "checkpoint header"));
    cfg.layers = static_cast<int>(binio::get_u32(is, "checkpoint header"));
    cfg.head_hidden = static_cast<int>(binio::get_u32(is, "checkpoint header"));
    cfg.distance_scale_m = binio::get_f64(is, "checkpoint header");
    cfg.init_seed = binio::get_u64(is, "checkpoint header");
    Checkpoint ck;
    ck.epoch = static_cast<long>(binio::get_u64(is, "checkpoint header"));

    if (cfg.n_eves < 1 || cfg.proj_dim < 1 || cfg.hidden < 1 || cfg.layers < 1 || cfg.head_hidden < 1 ||
        cfg.n_eves > 4096 || cfg.hidden > 65536 || cfg.layers > 1024) {
        throw CorruptFile("implausible model dimensions in checkpoint");
    }

    std::map<std::string, Tensor> records;
    const auto count = binio::get_u32(is, "checkpoint record count");
    for (std::uint32_t i = 0; i < count; ++i) {
        std::string name = binio::get_string(is, "checkpoint record name");
        const auto rank = binio::get_u32(is, "checkpoint record rank");
        if (rank != 2) throw CorruptFile("record " + name + " has unsupported rank");
        const auto rows = binio::get_u64(is, "checkpoint record shape");
        const auto cols = binio::get_u64(is, "checkpoint record shape");
        if (rows > (1u << 24) || cols > (1u << 24) || rows * cols > (1u << 26)) {
            throw CorruptFile("record " + name + " has implausible shape");
        }
        Tensor t(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < t.rows(); ++r)
            for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = binio::get_f64(is, "checkpoint tensor data");
        records[std::move(name)] = std::move(t);
    }

    if (expected != nullptr) {
        if (expected->mode != cfg.mode) {
            throw ShapeMismatch(std::string("checkpoint was trained in ") + to_string(cfg.mode) +
                                " mode and cannot be loaded for a " + to_string(expected->mode) + " run");
        }
        // Compare W_p first so a K mismatch is reported against the projection.
        const auto want = tensor_layout(*expected);
        for (const auto& [name, shape] : want) {
            auto it = records.find(name);
            if (it == records.end()) throw ShapeMismatch("checkpoint lacks tensor " + name);
            if (it->second.rows() != shape.first || it->second.cols() != shape.second) {
                throw ShapeMismatch("tensor " + name + " has shape " + std::to_string(it->second.rows()) + "x" +
                                    std::to_string(it->second.cols()) + ", expected " + std::to_string(shape.first) +
                                    "x" + std::to_string(shape.second));
            }
        }
    }

    ModelParams& params = ck.params;
    params.config = cfg;
    for (const auto& [name, shape] : tensor_layout(cfg)) {
        auto it = records.find(name);
        if (it == records.end()) throw CorruptFile("checkpoint lacks tensor " + name);
        if (it->second.rows() != shape.first || it->second.cols() != shape.second) {
            throw CorruptFile("tensor " + name + " disagrees with the checkpoint header");
        }
        params.tensors.push_back({name, it->second});
    }
    auto stat = [&](const char* name) {
        auto it = records.find(name);
        if (it == records.end()) throw CorruptFile(std::string("checkpoint lacks ") + name);
        return to_vector(it->second, name);
    };
    params.stats = {stat("norm.node_mean"), stat("norm.node_std"), stat("norm.edge_mean"),
                    stat("norm.edge_std"),  stat("norm.eve_mean"),  stat("norm.eve_std")};

    if (records.count("adam.step") != 0) {
        ad::AdamWState st;
        st.step = static_cast<long>(records["adam.step"](0, 0));
        for (const auto& t : params.tensors) {
            auto m = records.find("adam.m." + t.name);
            auto v = records.find("adam.v." + t.name);
            if (m == records.end() || v == records.end()) throw CorruptFile("incomplete optimizer state for " + t.name);
            st.m.push_back(m->second);
            st.v.push_back(v->second);
        }
        ck.optimizer = std::move(st);
    }
    return ck;
}

ModelParams load_params(const std::filesystem::path& path, const ModelConfig* expected) {
    return load_checkpoint(path, expected).params;
}

}  // namespace flexsec::gnn
