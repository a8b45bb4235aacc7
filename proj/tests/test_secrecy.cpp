#include <doctest.h>

#include <cmath>

#include "flexsec/channel.hpp"
#include "flexsec/errors.hpp"
#include "flexsec/secrecy.hpp"
#include "oracles.hpp"

using namespace flexsec;

namespace {

NetworkRealization random_real(int pairs, int eves, std::uint64_t seed) {
    SimConfig cfg;
    cfg.n_pairs = pairs;
    cfg.n_eves = eves;
    cfg.seed = seed;
    return generate(cfg);
}

Schedule schedule(std::initializer_list<int> t, std::initializer_list<double> p) {
    Schedule s;
    s.t = Eigen::VectorXi(static_cast<Eigen::Index>(t.size()));
    s.p = RVector(static_cast<Eigen::Index>(p.size()));
    int i = 0;
    for (int v : t) s.t[i++] = v;
    i = 0;
    for (double v : p) s.p[i++] = v;
    return s;
}

}  // namespace

TEST_CASE("pair_partner") {
    CHECK(pair_partner(1, 8) == 2);
    CHECK(pair_partner(2, 8) == 1);
    CHECK(pair_partner(7, 8) == 8);
    CHECK(pair_partner(8, 8) == 7);
    for (int n = 1; n <= 8; ++n) CHECK(pair_partner(pair_partner(n, 8), 8) == n);
    CHECK_THROWS_AS(pair_partner(0, 8), DomainError);
    CHECK_THROWS_AS(pair_partner(9, 8), DomainError);
    CHECK(partner_index(0) == 1);
    CHECK(partner_index(5) == 4);
}

TEST_CASE("flexd_sinr closed forms") {
    auto r = oracle::blank(1, 1);
    r.H(1, 0) = std::sqrt(3.0);
    CHECK(flexd_sinr(r, schedule({1, 0}, {2.0, 0.0}), 1) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(flexd_sinr(r, schedule({0, 1}, {0.0, 2.0}), 0) == 0.0);
    // Inactive partner: no signal regardless of stored power.
    CHECK(flexd_sinr(r, schedule({0, 1}, {2.0, 0.0}), 1) == 0.0);
}

TEST_CASE("flexd_sinr matches scalar oracle at N=2") {
    auto r = oracle::blank(2, 1, 0.5);
    r.H << 0.0, cdouble(0.3, 0.1), cdouble(0.2, -0.4), cdouble(1.0, 0.2),  //
        cdouble(0.7, 0.0), 0.0, cdouble(-0.1, 0.5), cdouble(0.3, 0.3),       //
        cdouble(0.0, 0.9), cdouble(0.4, 0.4), 0.0, cdouble(0.8, -0.2),      //
        cdouble(0.6, 0.1), cdouble(-0.2, 0.2), cdouble(1.1, 0.0), 0.0;
    const auto s = schedule({1, 0, 0, 1}, {0.8, 0.0, 0.0, 0.6});
    const RVector w = link_weights(s);
    for (int n = 0; n < 4; ++n) {
        CAPTURE(n);
        CHECK(flexd_sinr(r, s, n) == doctest::Approx(oracle::flexd_sinr(r, w, n)).epsilon(1e-14));
    }
}

TEST_CASE("eve_sinr closed forms") {
    auto r = oracle::blank(1, 1);
    r.G(0, 0) = 2.0;
    CHECK(eve_sinr(r, schedule({1, 0}, {1.0, 0.0}), 0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(eve_sinr(r, schedule({0, 1}, {0.0, 1.0}), 0) == 0.0);
}

TEST_CASE("eve_sinr agrees with explicit inverse and rank-one updates") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto r = random_real(3, 3, seed);
        const auto s = schedule({1, 0, 0, 1, 1, 0}, {0.7, 0.0, 0.0, 1.0, 0.2, 0.0});
        const RVector w = link_weights(s);
        for (int m : {0, 3, 4}) {
            const double got = eve_sinr(r, s, m);
            CHECK(oracle::relative_error(got, oracle::eve_sinr_inverse(r, w, m), 1e-300) < 1e-9);
            CHECK(oracle::relative_error(got, oracle::eve_sinr_sherman_morrison(r, w, m), 1e-300) < 1e-9);
        }
    }
}

TEST_CASE("secrecy_from_sinr") {
    CHECK(secrecy_from_sinr(2.5, 2.5) == 0.0);
    CHECK(secrecy_from_sinr(std::exp(1.0) - 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(secrecy_from_sinr(0.0, 3.0) == 0.0);
}

TEST_CASE("sum_secrecy") {
    const auto r = random_real(1, 1, 4);
    CHECK(sum_secrecy(r, schedule({1, 0}, {0.0, 0.0})) == 0.0);
    const auto s = schedule({1, 0}, {1.0, 0.0});
    CHECK(sum_secrecy(r, s) == secrecy_rate(r, s, 0));

    SUBCASE("N=2 grid optimum matches brute force") {
        const auto r2 = random_real(2, 2, 21);
        double best = 0.0;
        const double levels[3] = {0.0, 0.5 * r2.pmax_w, r2.pmax_w};
        for (unsigned pat = 0; pat < 4; ++pat)
            for (double a : levels)
                for (double b : levels) {
                    Schedule sc;
                    sc.t = Eigen::VectorXi::Zero(4);
                    sc.p = RVector::Zero(4);
                    const int u0 = (pat & 1u) ? 1 : 0, u1 = 2 + ((pat & 2u) ? 1 : 0);
                    sc.t[u0] = sc.t[u1] = 1;
                    sc.p[u0] = a;
                    sc.p[u1] = b;
                    best = std::max(best, sum_secrecy(r2, sc));
                }
        CHECK(best == doctest::Approx(oracle::brute_force_grid(r2, 3)).epsilon(1e-12));
    }
}

TEST_CASE("relaxed_sum_secrecy") {
    SUBCASE("negative contributions survive") {
        auto r = oracle::blank(1, 1);
        r.G(0, 0) = std::sqrt(3.0);
        const auto s = schedule({1, 0}, {1.0, 0.0});
        CHECK(relaxed_sum_secrecy(r, s) == doctest::Approx(-std::log(4.0)).epsilon(1e-14));
        CHECK(sum_secrecy(r, s) == 0.0);
    }
    SUBCASE("equal when no clamp is active") {
        auto r = oracle::blank(1, 1);
        r.H(1, 0) = 2.0;
        r.G(0, 0) = 0.5;
        const auto s = schedule({1, 0}, {1.0, 0.0});
        CHECK(relaxed_sum_secrecy(r, s) == sum_secrecy(r, s));
    }
    SUBCASE("clamped dominates relaxed") {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const auto r = random_real(2, 2, seed + 500);
            Rng rng(seed);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            Schedule s;
            s.t = Eigen::VectorXi::Zero(4);
            s.p = RVector::Zero(4);
            for (int q = 0; q < 2; ++q) {
                const int tx = 2 * q + (u(rng) < 0.5 ? 0 : 1);
                s.t[tx] = 1;
                s.p[tx] = u(rng) * r.pmax_w;
            }
            CHECK(sum_secrecy(r, s) >= relaxed_sum_secrecy(r, s));
        }
    }
    SUBCASE("matches the unclamped oracle") {
        const auto r = random_real(3, 2, 9);
        const auto s = schedule({0, 1, 1, 0, 0, 1}, {0.0, 0.3, 1.0, 0.0, 0.0, 0.5});
        CHECK(relaxed_sum_secrecy(r, s) == doctest::Approx(oracle::sum_secrecy(r, link_weights(s), false)).epsilon(1e-10));
        CHECK(sum_secrecy(r, s) == doctest::Approx(oracle::sum_secrecy(r, link_weights(s), true)).epsilon(1e-10));
    }
}

TEST_CASE("structural properties of the objective") {
    const auto r = random_real(2, 2, 33);
    const auto s = schedule({1, 0, 0, 1}, {0.6, 0.0, 0.0, 0.9});

    SUBCASE("scaling powers and noise together leaves rates unchanged") {
        auto r2 = r;
        r2.noise_w *= 7.0;
        auto s2 = s;
        s2.p *= 7.0;
        CHECK(sum_secrecy(r2, s2) == doctest::Approx(sum_secrecy(r, s)).epsilon(1e-12));
    }
    SUBCASE("desired SINR grows with own power and falls with interference") {
        auto up = s;
        up.p[0] = 0.8;
        CHECK(flexd_sinr(r, up, 1) > flexd_sinr(r, s, 1));
        CHECK(flexd_sinr(r, up, 2) < flexd_sinr(r, s, 2));
        CHECK(eve_sinr(r, up, 3) < eve_sinr(r, s, 3));
    }
}

TEST_CASE("relaxed gradient matches central differences") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto r = random_real(2, 2, seed);
        Rng rng(seed * 13);
        std::uniform_real_distribution<double> u(0.1, 0.9);
        RVector t(4), p(4);
        for (int q = 0; q < 2; ++q) {
            t[2 * q] = u(rng);
            t[2 * q + 1] = 1.0 - t[2 * q];
        }
        for (int i = 0; i < 4; ++i) p[i] = u(rng) * r.pmax_w;
        const auto g = relaxed_sum_secrecy_grad(r, t, p);
        CHECK(g.value == doctest::Approx(relaxed_sum_secrecy(r, RelaxedSchedule{t, p})).epsilon(1e-13));
        for (int i = 0; i < 4; ++i) {
            CAPTURE(seed);
            CAPTURE(i);
            const double fd_p = oracle::central_difference(
                [&](const RVector& x) { return relaxed_sum_secrecy(r, RelaxedSchedule{t, x}); }, p, i, 1e-6);
            const double fd_t = oracle::central_difference(
                [&](const RVector& x) { return relaxed_sum_secrecy(r, RelaxedSchedule{x, p}); }, t, i, 1e-6);
            CHECK(oracle::relative_error(g.d_p[i], fd_p, 1e-6) < 1e-4);
            CHECK(oracle::relative_error(g.d_t[i], fd_t, 1e-6) < 1e-4);
        }
    }
}

TEST_CASE("is_feasible") {
    CHECK(is_feasible(schedule({1, 0, 0, 1}, {1.0, 0.0, 0.0, 0.5}), 1.0, 4));
    CHECK_FALSE(is_feasible(schedule({1, 1, 0, 1}, {1.0, 0.0, 0.0, 0.5}), 1.0, 4));
    CHECK_FALSE(is_feasible(schedule({1, 0, 0, 1}, {1.5, 0.0, 0.0, 0.5}), 1.0, 4));
    CHECK_FALSE(is_feasible(schedule({1, 0, 0, 1}, {1.0, 0.2, 0.0, 0.5}), 1.0, 4));
    CHECK_FALSE(is_feasible(schedule({1, 0, 0, 1}, {-0.1, 0.0, 0.0, 0.5}), 1.0, 4));
    CHECK_FALSE(is_feasible(schedule({1, 0}, {1.0, 0.0}), 1.0, 4));
    CHECK(nats_to_bits(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
}
