#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "flexsec/parallel.hpp"

namespace flexsec {

using cdouble = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

// Every random draw in the library goes through this engine so that a seed
// pins a realization bit-for-bit on a given standard library.
using Rng = std::mt19937_64;

inline constexpr double kSpeedOfLight = 2.99792458e8;

double dbm_to_watt(double dbm);

// SplitMix64 finalizer; derives independent stream seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

struct SimConfig {
    double area_side_m = 1000.0;
    int n_pairs = 2;
    int n_eves = 2;
    double carrier_hz = 1e9;
    double shadowing_db = 8.0;
    double pmax_dbm = 30.0;
    double noise_dbm = -100.0;
    double min_separation_m = 10.0;
    std::uint64_t seed = 1;

    int n_users() const { return 2 * n_pairs; }

    // Throws ConfigError on the first violated invariant.
    void validate() const;
};

// One drawn network. Users 2p and 2p+1 (0-based) form pair p.
// H(n, m) is the channel from user m to user n; G(m, k) from user m to
// eavesdropper k; D(m, k) the matching distance in meters.
struct NetworkRealization {
    RMatrix user_xy;  // 2N x 2
    RMatrix eve_xy;   // K x 2
    CMatrix H;        // 2N x 2N, zero diagonal, non-reciprocal
    CMatrix G;        // 2N x K
    RMatrix D;        // 2N x K
    double noise_w = 0.0;
    double pmax_w = 0.0;

    int n_users() const { return static_cast<int>(H.rows()); }
    int n_pairs() const { return n_users() / 2; }
    int n_eves() const { return static_cast<int>(G.cols()); }

    bool operator==(const NetworkRealization& other) const;
};

struct Placement {
    RMatrix user_xy;
    RMatrix eve_xy;
};

// Dart throwing with a minimum pairwise distance over the union of users and
// eavesdroppers. Throws PlacementInfeasible when the disk packing bound rules
// the configuration out or the bounded retry budget is exhausted.
Placement sample_positions(const SimConfig& cfg, Rng& rng);

// Uniformly random perfect matching, expressed as a permutation: after
// relabeling, users perm[2p] and perm[2p+1] form pair p.
std::vector<int> pair_users(int n_users, Rng& rng);

// Free-space path gain (lambda / (4 pi d))^2. Throws DomainError for d <= 0.
double path_loss_linear(double d_m, double carrier_hz);

// Rayleigh-faded, log-normal shadowed complex channel at distance d_m.
cdouble draw_channel(double d_m, const SimConfig& cfg, Rng& rng);

// Deterministic limb of draw_channel: sqrt(PL * 10^(X/10)) * z.
cdouble compose_channel(double path_gain, double shadow_db, cdouble z);

NetworkRealization generate(const SimConfig& cfg);

// count realizations; item i is generate(cfg) with seed mix_seed(cfg.seed, i).
std::vector<NetworkRealization> generate_batch(const SimConfig& cfg, int count,
                                               Exec exec = Exec::parallel);

// Binary record: versioned header, little-endian f64, row-major matrices.
void write_realization(std::ostream& os, const NetworkRealization& real);
NetworkRealization read_realization(std::istream& is);

void write_realization_csv(std::ostream& os, const NetworkRealization& real);

// A dataset file is a header plus a sequence of realization records.
void save_dataset(const std::filesystem::path& path, const std::vector<NetworkRealization>& data);
std::vector<NetworkRealization> load_dataset(const std::filesystem::path& path);

}  // namespace flexsec
