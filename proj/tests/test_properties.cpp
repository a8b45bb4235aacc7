#include <doctest.h>

#include <filesystem>

#include "properties.hpp"

namespace {

void check(const props::Outcome& o, int min_cases) {
    INFO(o.name);
    INFO(o.first_failure);
    CHECK(o.cases >= min_cases);
    CHECK(o.failures == 0);
}

}  // namespace

TEST_CASE("feasibility") { check(props::feasibility(100), 100); }
TEST_CASE("clamp dominance") { check(props::clamp_dominance(1000), 1000); }
TEST_CASE("permutation equivariance") { check(props::permutation_equivariance(100), 100); }
TEST_CASE("checkpoint round trip") {
    check(props::checkpoint_round_trip(100, std::filesystem::temp_directory_path() / "flexsec_props"), 100);
}
TEST_CASE("monotone solver trace") { check(props::monotone_trace(100), 100); }
TEST_CASE("autodiff primitives") { check(props::primitive_gradients(100), 700); }
TEST_CASE("eavesdropper solve agreement") { check(props::solver_agreement(200), 200); }
TEST_CASE("solve dominates Max-Power") { check(props::solve_beats_baselines(100), 100); }
TEST_CASE("realization round trip") { check(props::realization_round_trip(100), 100); }
TEST_CASE("power/noise homogeneity") { check(props::power_noise_homogeneity(100), 100); }
