#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "flexsec/channel.hpp"
#include "flexsec/secrecy.hpp"

namespace flexsec::classical {

struct SolverConfig {
    int max_outer_iters = 50;
    double rel_tol = 1e-4;
    int power_step_iters = 100;
    double line_search_shrink = 0.5;
    double initial_step_fraction = 0.1;  // first trial step, as a fraction of P_max

    void validate() const;
};

// Direction with the stronger desired link per pair; ties go to the pair's
// first user.
Eigen::VectorXi max_power_direction(const NetworkRealization& real);

// The pair's first user transmits.
Eigen::VectorXi hd_direction(int n_pairs);

// Places each pair's power on its transmitter and zeros receivers.
Schedule make_schedule(const Eigen::VectorXi& t, const RVector& pair_power);

// Power of each pair (sum over its two users).
RVector pair_powers(const RVector& p);

// Projected gradient ascent with backtracking on the relaxed objective for a
// fixed binary direction. Returns per-user powers in [0, P_max], zero on
// receivers. Starts from P_max on every transmitter unless a start is given.
RVector optimize_power(const NetworkRealization& real, const Eigen::VectorXi& t, const SolverConfig& cfg,
                       const std::optional<RVector>& start = std::nullopt);

// Greedy best-single-flip search on the clamped objective with each pair's
// power following its transmitter. Starts at the Max-Power direction unless
// a start is given.
Eigen::VectorXi optimize_direction(const NetworkRealization& real, const RVector& p,
                                   const std::optional<Eigen::VectorXi>& start = std::nullopt);

enum class StartDirection { max_power, hd };

struct SolveResult {
    Schedule schedule;
    std::vector<double> trace;  // clamped objective of every accepted iterate, nats
    int outer_iters = 0;
};

SolveResult solve(const NetworkRealization& real, const SolverConfig& cfg,
                  StartDirection start = StartDirection::max_power);

// "iteration,objective_nats" rows of a solve trace, iteration 0 = start point.
void write_trace_csv(std::ostream& os, const std::vector<double>& trace);

Schedule baseline_hd(const NetworkRealization& real, const SolverConfig& cfg);
Schedule baseline_max_power(const NetworkRealization& real);

}  // namespace flexsec::classical
