#include <doctest.h>

#include <sstream>

#include "flexsec/classical.hpp"
#include "flexsec/errors.hpp"
#include "oracles.hpp"

using namespace flexsec;
using namespace flexsec::classical;

namespace {

NetworkRealization random_real(int pairs, int eves, std::uint64_t seed) {
    SimConfig cfg;
    cfg.n_pairs = pairs;
    cfg.n_eves = eves;
    cfg.seed = seed;
    return generate(cfg);
}

// Single pair, user 0 transmitting with |h|^2 = a to its partner and
// |g|^2 = b to the one eavesdropper.
NetworkRealization single_link(double a, double b) {
    auto r = oracle::blank(1, 1);
    r.H(1, 0) = std::sqrt(a);
    r.G(0, 0) = std::sqrt(b);
    return r;
}

double grid_argmax(const NetworkRealization& r, int points) {
    double best_p = 0.0, best = -INFINITY;
    for (int i = 0; i < points; ++i) {
        const double p = r.pmax_w * i / (points - 1);
        const double v = oracle::sum_secrecy(r, oracle::pattern_weights(0, {p}), false);
        if (v > best) {
            best = v;
            best_p = p;
        }
    }
    return best_p;
}

Schedule flip(const Schedule& s, int q) {
    Schedule out = s;
    std::swap(out.t[2 * q], out.t[2 * q + 1]);
    std::swap(out.p[2 * q], out.p[2 * q + 1]);
    return out;
}

}  // namespace

TEST_CASE("optimize_power on single links") {
    SolverConfig cfg;
    Eigen::VectorXi t(2);
    t << 1, 0;

    SUBCASE("legitimate link dominates: full power") {
        const auto r = single_link(4.0, 1.0);
        const RVector p = optimize_power(r, t, cfg);
        CHECK(grid_argmax(r, 1000) == r.pmax_w);
        CHECK(p[0] == doctest::Approx(r.pmax_w).epsilon(1e-9));
        CHECK(p[1] == 0.0);
    }
    SUBCASE("eavesdropper dominates: silence") {
        const auto r = single_link(1.0, 4.0);
        const RVector p = optimize_power(r, t, cfg);
        CHECK(grid_argmax(r, 1000) == 0.0);
        CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("box constraint and silent receivers") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto r = random_real(3, 2, seed);
            Eigen::VectorXi tt(6);
            tt << 0, 1, 1, 0, 0, 1;
            const RVector p = optimize_power(r, tt, cfg);
            for (int i = 0; i < 6; ++i) {
                CHECK(p[i] >= 0.0);
                CHECK(p[i] <= r.pmax_w);
                if (tt[i] == 0) CHECK(p[i] == 0.0);
            }
        }
    }
    SUBCASE("never worse than its start") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto r = random_real(2, 2, seed + 100);
            Eigen::VectorXi tt(4);
            tt << 1, 0, 0, 1;
            const RVector start = RVector::Constant(4, 0.5 * r.pmax_w).cwiseProduct(tt.cast<double>());
            const RVector p = optimize_power(r, tt, cfg, start);
            CHECK(relaxed_sum_secrecy(r, Schedule{tt, p}) >= relaxed_sum_secrecy(r, Schedule{tt, start}) - 1e-12);
        }
    }
    CHECK_THROWS_AS(optimize_power(single_link(1, 1), Eigen::VectorXi::Ones(3), cfg), ShapeMismatch);
}

TEST_CASE("optimize_direction") {
    SUBCASE("N=1 picks the better of the two directions") {
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            const auto r = random_real(1, 1, seed);
            RVector p(2);
            p << r.pmax_w, 0.0;
            const auto t = optimize_direction(r, p);
            const double chosen = sum_secrecy(r, make_schedule(t, RVector::Constant(1, r.pmax_w)));
            const double a = oracle::sum_secrecy(r, oracle::pattern_weights(0, {r.pmax_w}));
            const double b = oracle::sum_secrecy(r, oracle::pattern_weights(1, {r.pmax_w}));
            CHECK(chosen == doctest::Approx(std::max(a, b)).epsilon(1e-12));
        }
    }
    SUBCASE("close to exhaustive search and 1-flip optimal") {
        double got = 0.0, best = 0.0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const int pairs = 2 + static_cast<int>(seed % 3);
            const auto r = random_real(pairs, 2, 1000 + seed);
            const RVector pair_power = RVector::Constant(pairs, r.pmax_w);
            const auto t = optimize_direction(r, make_schedule(hd_direction(pairs), pair_power).p);
            const Schedule s = make_schedule(t, pair_power);
            got += sum_secrecy(r, s);
            best += oracle::exhaustive_directions(r, std::vector<double>(static_cast<std::size_t>(pairs), r.pmax_w));
            for (int q = 0; q < pairs; ++q) CHECK(sum_secrecy(r, flip(s, q)) <= sum_secrecy(r, s) + 1e-12);
        }
        CHECK(got >= 0.9 * best);
    }
}

TEST_CASE("baseline directions") {
    auto r = oracle::blank(1, 1);
    r.H(1, 0) = 2.0;
    r.H(0, 1) = 1.0;
    CHECK(max_power_direction(r) == Eigen::Vector2i(1, 0));
    r.H(0, 1) = cdouble(0.0, 2.0);
    CHECK(max_power_direction(r) == Eigen::Vector2i(1, 0));
    r.H(0, 1) = 3.0;
    CHECK(max_power_direction(r) == Eigen::Vector2i(0, 1));

    Eigen::VectorXi hd(6);
    hd << 1, 0, 1, 0, 1, 0;
    CHECK(hd_direction(3) == hd);

    const auto real = random_real(3, 2, 5);
    const auto s = baseline_max_power(real);
    CHECK(s.t == max_power_direction(real));
    for (int i = 0; i < 6; ++i) CHECK(s.p[i] == (s.t[i] == 1 ? real.pmax_w : 0.0));
    CHECK(baseline_hd(real, SolverConfig{}).t == hd);
}

TEST_CASE("HD loses to Max-Power when the second user has the strong link") {
    auto r = oracle::blank(1, 1);
    r.H(0, 1) = 10.0;
    r.H(1, 0) = 0.1;
    r.G(0, 0) = 0.5;
    r.G(1, 0) = 0.5;
    const double hd = sum_secrecy(r, baseline_hd(r, SolverConfig{}));
    const double mp = sum_secrecy(r, baseline_max_power(r));
    CHECK(hd < mp);
    CHECK(mp == doctest::Approx(std::log(101.0) - std::log(1.25)).epsilon(1e-12));
}

TEST_CASE("solve") {
    SolverConfig cfg;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        CAPTURE(seed);
        const auto r = random_real(2, 2, seed);
        const auto res = solve(r, cfg);
        REQUIRE_FALSE(res.trace.empty());
        for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] >= res.trace[i - 1]);
        const double obj = sum_secrecy(r, res.schedule);
        CHECK(obj == doctest::Approx(res.trace.back()).epsilon(1e-12));
        CHECK(is_feasible(res.schedule, r.pmax_w, r.n_users()));
        CHECK(obj >= sum_secrecy(r, baseline_max_power(r)) - 1e-12);
        CHECK(res.outer_iters <= cfg.max_outer_iters);

        const auto from_hd = solve(r, cfg, StartDirection::hd);
        CHECK(sum_secrecy(r, from_hd.schedule) >= sum_secrecy(r, baseline_hd(r, cfg)) - 1e-12);
    }
}

TEST_CASE("SolverConfig validation") {
    auto bad = [](auto mutate) {
        SolverConfig c;
        mutate(c);
        return c;
    };
    CHECK_NOTHROW(SolverConfig{}.validate());
    CHECK_THROWS_AS(bad([](SolverConfig& c) { c.max_outer_iters = 0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SolverConfig& c) { c.rel_tol = 0.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SolverConfig& c) { c.line_search_shrink = 1.0; }).validate(), ConfigError);
    CHECK_THROWS_AS(bad([](SolverConfig& c) { c.initial_step_fraction = 0.0; }).validate(), ConfigError);
}

TEST_CASE("trace CSV") {
    std::ostringstream os;
    write_trace_csv(os, {0.5, 0.75});
    CHECK(os.str() == "iteration,objective_nats\n0,0.5\n1,0.75\n");
}

TEST_CASE("schedule helpers") {
    Eigen::VectorXi t(4);
    t << 0, 1, 1, 0;
    RVector pp(2);
    pp << 0.3, 0.9;
    const auto s = make_schedule(t, pp);
    CHECK(s.p[1] == 0.3);
    CHECK(s.p[0] == 0.0);
    CHECK(s.p[2] == 0.9);
    CHECK(pair_powers(s.p) == pp);
}
