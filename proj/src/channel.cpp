#include "flexsec/channel.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "binio.hpp"
#include "flexsec/errors.hpp"

namespace flexsec {

namespace {

constexpr char kRealizationMagic[5] = "FXRL";
constexpr char kDatasetMagic[5] = "FXDS";
constexpr std::uint32_t kFormatVersion = 1;

constexpr int kDartAttempts = 20000;
constexpr int kPlacementRestarts = 10;

// Hash grid over cells of side min_separation for neighbor queries.
class SeparationGrid {
public:
    SeparationGrid(double side, double sep) : sep_(sep), cell_(sep > 0 ? sep : side) {}

    bool admissible(double x, double y) const {
        if (sep_ <= 0.0) return true;
        const auto cx = cell_index(x);
        const auto cy = cell_index(y);
        for (long dx = -1; dx <= 1; ++dx) {
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = cells_.find(key(cx + dx, cy + dy));
                if (it == cells_.end()) continue;
                for (const auto& [px, py] : it->second) {
                    if (std::hypot(px - x, py - y) < sep_) return false;
                }
            }
        }
        return true;
    }

    void insert(double x, double y) { cells_[key(cell_index(x), cell_index(y))].emplace_back(x, y); }

private:
    long cell_index(double v) const { return static_cast<long>(std::floor(v / cell_)); }
    static std::uint64_t key(long cx, long cy) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
               static_cast<std::uint32_t>(cy);
    }

    double sep_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<double, double>>> cells_;
};

void put_rmatrix(std::ostream& os, const RMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) binio::put_f64(os, m(r, c));
}

void put_cmatrix(std::ostream& os, const CMatrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            binio::put_f64(os, m(r, c).real());
            binio::put_f64(os, m(r, c).imag());
        }
}

RMatrix get_rmatrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
    RMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = binio::get_f64(is, "realization matrix");
    return m;
}

CMatrix get_cmatrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double re = binio::get_f64(is, "realization matrix");
            const double im = binio::get_f64(is, "realization matrix");
            m(r, c) = {re, im};
        }
    return m;
}

}  // namespace

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void SimConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("invalid sim config: " + msg); };
    if (!(area_side_m > 0.0) || !std::isfinite(area_side_m)) fail("area_side_m must be > 0");
    if (n_pairs < 1) fail("n_pairs must be >= 1");
    if (n_eves < 1) fail("n_eves must be >= 1");
    if (!(carrier_hz > 0.0)) fail("carrier_hz must be > 0");
    if (!(shadowing_db >= 0.0)) fail("shadowing_db must be >= 0");
    if (!(min_separation_m >= 0.0)) fail("min_separation_m must be >= 0");
    const double pmax = dbm_to_watt(pmax_dbm);
    const double noise = dbm_to_watt(noise_dbm);
    if (!(pmax > 0.0) || !std::isfinite(pmax)) fail("pmax_dbm does not map to a positive power");
    if (!(noise > 0.0) || !std::isfinite(noise)) fail("noise_dbm does not map to a positive power");
}

bool NetworkRealization::operator==(const NetworkRealization& o) const {
    return user_xy == o.user_xy && eve_xy == o.eve_xy && H == o.H && G == o.G && D == o.D &&
           noise_w == o.noise_w && pmax_w == o.pmax_w;
}

Placement sample_positions(const SimConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n_users = cfg.n_users();
    const int total = n_users + cfg.n_eves;
    const double side = cfg.area_side_m;
    const double sep = cfg.min_separation_m;

    if (sep > 0.0) {
        // Hexagonal packing of disks of radius sep/2 inside the square grown by
        // sep/2 on every side bounds the number of admissible points.
        const double grown = side + sep;
        const double bound = (grown * grown) * 2.0 / (std::sqrt(3.0) * sep * sep);
        if (static_cast<double>(total) > bound) {
            std::ostringstream msg;
            msg << "cannot place " << total << " points with separation " << sep
                << " m in a " << side << " m square (packing bound " << std::floor(bound) << ")";
            throw PlacementInfeasible(msg.str());
        }
    }

    std::uniform_real_distribution<double> coord(0.0, side);
    for (int restart = 0; restart < kPlacementRestarts; ++restart) {
        SeparationGrid grid(side, sep);
        RMatrix pts(total, 2);
        bool ok = true;
        for (int i = 0; i < total && ok; ++i) {
            bool placed = false;
            for (int attempt = 0; attempt < kDartAttempts; ++attempt) {
                const double x = coord(rng);
                const double y = coord(rng);
                if (grid.admissible(x, y)) {
                    grid.insert(x, y);
                    pts(i, 0) = x;
                    pts(i, 1) = y;
                    placed = true;
                    break;
                }
            }
            ok = placed;
        }
        if (ok) return {pts.topRows(n_users), pts.bottomRows(cfg.n_eves)};
    }
    throw PlacementInfeasible("dart throwing exhausted its retry budget for " + std::to_string(total) +
                              " points");
}

std::vector<int> pair_users(int n_users, Rng& rng) {
    std::vector<int> perm(static_cast<std::size_t>(n_users));
    for (int i = 0; i < n_users; ++i) perm[static_cast<std::size_t>(i)] = i;
    // Fisher-Yates; consecutive slots of a uniform permutation give a uniform
    // perfect matching.
    for (int i = n_users - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
    }
    return perm;
}

double path_loss_linear(double d_m, double carrier_hz) {
    if (!(d_m > 0.0)) throw DomainError("path loss requires a positive distance, got " + std::to_string(d_m));
    if (!(carrier_hz > 0.0)) throw DomainError("path loss requires a positive carrier frequency");
    const double lambda = kSpeedOfLight / carrier_hz;
    const double ratio = lambda / (4.0 * std::numbers::pi * d_m);
    return ratio * ratio;
}

cdouble compose_channel(double path_gain, double shadow_db, cdouble z) {
    return std::sqrt(path_gain * std::pow(10.0, shadow_db / 10.0)) * z;
}

cdouble draw_channel(double d_m, const SimConfig& cfg, Rng& rng) {
    std::normal_distribution<double> unit(0.0, 1.0);
    const double shadow_db = cfg.shadowing_db * unit(rng);
    const double re = unit(rng) * std::numbers::sqrt2 / 2.0;
    const double im = unit(rng) * std::numbers::sqrt2 / 2.0;
    return compose_channel(path_loss_linear(d_m, cfg.carrier_hz), shadow_db, {re, im});
}

NetworkRealization generate(const SimConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    auto placement = sample_positions(cfg, rng);
    const auto perm = pair_users(cfg.n_users(), rng);

    const int n_users = cfg.n_users();
    const int n_eves = cfg.n_eves;

    NetworkRealization real;
    real.user_xy.resize(n_users, 2);
    for (int i = 0; i < n_users; ++i) real.user_xy.row(i) = placement.user_xy.row(perm[static_cast<std::size_t>(i)]);
    real.eve_xy = std::move(placement.eve_xy);
    real.noise_w = dbm_to_watt(cfg.noise_dbm);
    real.pmax_w = dbm_to_watt(cfg.pmax_dbm);

    real.H = CMatrix::Zero(n_users, n_users);
    for (int n = 0; n < n_users; ++n) {
        for (int m = 0; m < n_users; ++m) {
            if (n == m) continue;
            const double d = (real.user_xy.row(n) - real.user_xy.row(m)).norm();
            real.H(n, m) = draw_channel(d, cfg, rng);
        }
    }

    real.D.resize(n_users, n_eves);
    real.G.resize(n_users, n_eves);
    for (int m = 0; m < n_users; ++m) {
        for (int k = 0; k < n_eves; ++k) {
            const double d = (real.user_xy.row(m) - real.eve_xy.row(k)).norm();
            real.D(m, k) = d;
            real.G(m, k) = draw_channel(d, cfg, rng);
        }
    }
    return real;
}

std::vector<NetworkRealization> generate_batch(const SimConfig& cfg, int count, Exec exec) {
    cfg.validate();
    std::vector<NetworkRealization> out(static_cast<std::size_t>(std::max(count, 0)));
    auto one = [&](int i) {
        SimConfig item = cfg;
        item.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = generate(item);
    };
    parallel_for(count, exec, one);
    return out;
}

void write_realization(std::ostream& os, const NetworkRealization& real) {
    binio::put_magic(os, kRealizationMagic);
    binio::put_u32(os, kFormatVersion);
    binio::put_u64(os, static_cast<std::uint64_t>(real.n_pairs()));
    binio::put_u64(os, static_cast<std::uint64_t>(real.n_eves()));
    binio::put_f64(os, real.noise_w);
    binio::put_f64(os, real.pmax_w);
    put_rmatrix(os, real.user_xy);
    put_rmatrix(os, real.eve_xy);
    put_cmatrix(os, real.H);
    put_cmatrix(os, real.G);
    put_rmatrix(os, real.D);
}

NetworkRealization read_realization(std::istream& is) {
    binio::expect_magic(is, kRealizationMagic, "realization record");
    const auto version = binio::get_u32(is, "realization version");
    if (version != kFormatVersion) {
        throw VersionMismatch("realization record version " + std::to_string(version) + ", expected " +
                              std::to_string(kFormatVersion));
    }
    const auto n_pairs = binio::get_u64(is, "realization header");
    const auto n_eves = binio::get_u64(is, "realization header");
    if (n_pairs == 0 || n_eves == 0 || n_pairs > (1u << 20) || n_eves > (1u << 20)) {
        throw CorruptFile("implausible realization dimensions");
    }
    const auto users = static_cast<Eigen::Index>(2 * n_pairs);
    const auto eves = static_cast<Eigen::Index>(n_eves);
    NetworkRealization real;
    real.noise_w = binio::get_f64(is, "realization header");
    real.pmax_w = binio::get_f64(is, "realization header");
    real.user_xy = get_rmatrix(is, users, 2);
    real.eve_xy = get_rmatrix(is, eves, 2);
    real.H = get_cmatrix(is, users, users);
    real.G = get_cmatrix(is, users, eves);
    real.D = get_rmatrix(is, users, eves);
    return real;
}

void write_realization_csv(std::ostream& os, const NetworkRealization& real) {
    os.precision(17);
    os << "kind,row,col,re,im\n";
    for (Eigen::Index i = 0; i < real.user_xy.rows(); ++i)
        os << "user_xy," << i << ",0," << real.user_xy(i, 0) << ',' << real.user_xy(i, 1) << '\n';
    for (Eigen::Index i = 0; i < real.eve_xy.rows(); ++i)
        os << "eve_xy," << i << ",0," << real.eve_xy(i, 0) << ',' << real.eve_xy(i, 1) << '\n';
    for (Eigen::Index r = 0; r < real.H.rows(); ++r)
        for (Eigen::Index c = 0; c < real.H.cols(); ++c)
            os << "H," << r << ',' << c << ',' << real.H(r, c).real() << ',' << real.H(r, c).imag() << '\n';
    for (Eigen::Index r = 0; r < real.G.rows(); ++r)
        for (Eigen::Index c = 0; c < real.G.cols(); ++c)
            os << "G," << r << ',' << c << ',' << real.G(r, c).real() << ',' << real.G(r, c).imag() << '\n';
    for (Eigen::Index r = 0; r < real.D.rows(); ++r)
        for (Eigen::Index c = 0; c < real.D.cols(); ++c) os << "D," << r << ',' << c << ',' << real.D(r, c) << ",0\n";
    os << "noise_w,0,0," << real.noise_w << ",0\n";
    os << "pmax_w,0,0," << real.pmax_w << ",0\n";
}

void save_dataset(const std::filesystem::path& path, const std::vector<NetworkRealization>& data) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    binio::put_magic(os, kDatasetMagic);
    binio::put_u32(os, kFormatVersion);
    binio::put_u64(os, data.size());
    for (const auto& real : data) write_realization(os, real);
    if (!os) throw Error("write failed for " + path.string());
}

std::vector<NetworkRealization> load_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw MissingArtifact("dataset not found: " + path.string());
    binio::expect_magic(is, kDatasetMagic, path.string().c_str());
    const auto version = binio::get_u32(is, "dataset version");
    if (version != kFormatVersion) {
        throw VersionMismatch("dataset version " + std::to_string(version) + ", expected " +
                              std::to_string(kFormatVersion));
    }
    const auto count = binio::get_u64(is, "dataset count");
    if (count > (1ull << 32)) throw CorruptFile("implausible dataset size in " + path.string());
    std::vector<NetworkRealization> out;
    out.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(read_realization(is));
    return out;
}

}  // namespace flexsec
