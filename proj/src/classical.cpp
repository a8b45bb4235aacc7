#include "flexsec/classical.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "flexsec/autodiff.hpp"
#include "flexsec/errors.hpp"

namespace flexsec::classical {

namespace {

// Armijo constant for the sufficient-increase test.
constexpr double kArmijo = 1e-4;

struct ObjectiveAndGradient {
    double value;
    RVector grad;
};

// Relaxed objective in p recorded on a tape; its backward applies the
// analytic adjoint of the secrecy engine.
ObjectiveAndGradient relaxed_with_gradient(const NetworkRealization& real, const RVector& t, const RVector& p) {
    ad::Tape tape;
    const ad::Var pv = tape.leaf(p, true);
    const auto obj = relaxed_sum_secrecy_grad(real, t, p);
    ad::Tensor value(1, 1);
    value(0, 0) = obj.value;
    const int ip = pv.id;
    const ad::Var f = tape.record(std::move(value), {ip}, [ip, d_p = obj.d_p](ad::Tape& tp, const ad::Tensor& g) {
        tp.accumulate(ip, g(0, 0) * ad::Tensor(d_p));
    });
    tape.backward(f);
    return {obj.value, pv.grad().col(0)};
}

}  // namespace

void SolverConfig::validate() const {
    if (max_outer_iters < 1 || power_step_iters < 1) throw ConfigError("solver iteration counts must be positive");
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("rel_tol must lie in (0, 1)");
    if (!(line_search_shrink > 0.0 && line_search_shrink < 1.0)) throw ConfigError("line_search_shrink must lie in (0, 1)");
    if (!(initial_step_fraction > 0.0)) throw ConfigError("initial_step_fraction must be > 0");
}

Eigen::VectorXi max_power_direction(const NetworkRealization& real) {
    const int pairs = real.n_pairs();
    Eigen::VectorXi t = Eigen::VectorXi::Zero(2 * pairs);
    for (int q = 0; q < pairs; ++q) {
        const int a = 2 * q, b = 2 * q + 1;
        // a transmits over h_ba, b over h_ab.
        if (std::abs(real.H(b, a)) >= std::abs(real.H(a, b))) {
            t[a] = 1;
        } else {
            t[b] = 1;
        }
    }
    return t;
}

Eigen::VectorXi hd_direction(int n_pairs) {
    Eigen::VectorXi t = Eigen::VectorXi::Zero(2 * n_pairs);
    for (int q = 0; q < n_pairs; ++q) t[2 * q] = 1;
    return t;
}

Schedule make_schedule(const Eigen::VectorXi& t, const RVector& pair_power) {
    Schedule s{t, RVector::Zero(t.size())};
    for (Eigen::Index q = 0; q < pair_power.size(); ++q) {
        const auto tx = t[2 * q] == 1 ? 2 * q : 2 * q + 1;
        s.p[tx] = pair_power[q];
    }
    return s;
}

RVector pair_powers(const RVector& p) {
    RVector out(p.size() / 2);
    for (Eigen::Index q = 0; q < out.size(); ++q) out[q] = p[2 * q] + p[2 * q + 1];
    return out;
}

RVector optimize_power(const NetworkRealization& real, const Eigen::VectorXi& t, const SolverConfig& cfg,
                       const std::optional<RVector>& start) {
    cfg.validate();
    const int users = real.n_users();
    if (t.size() != users) throw ShapeMismatch("direction vector does not match the realization");
    const double pmax = real.pmax_w;
    const RVector tx = t.cast<double>();

    RVector p = start ? *start : RVector::Constant(users, pmax);
    if (p.size() != users) throw ShapeMismatch("initial power vector does not match the realization");
    p = p.cwiseMax(0.0).cwiseMin(pmax).cwiseProduct(tx);

    auto current = relaxed_with_gradient(real, tx, p);
    double step = cfg.initial_step_fraction * pmax;
    const double min_step = 1e-12 * pmax;

    for (int it = 0; it < cfg.power_step_iters; ++it) {
        const RVector g = current.grad.cwiseProduct(tx);
        const double scale = g.cwiseAbs().maxCoeff();
        if (!(scale > 0.0) || !std::isfinite(scale)) break;
        const RVector dir = g / scale;

        bool accepted = false;
        for (double alpha = step; alpha >= min_step; alpha *= cfg.line_search_shrink) {
            const RVector trial = (p + alpha * dir).cwiseMax(0.0).cwiseMin(pmax);
            const RVector moved = trial - p;
            if (moved.cwiseAbs().maxCoeff() == 0.0) break;  // pinned on the box
            auto next = relaxed_with_gradient(real, tx, trial);
            if (next.value >= current.value + kArmijo * g.dot(moved) && next.value > current.value) {
                p = trial;
                current = std::move(next);
                step = std::min(alpha / cfg.line_search_shrink, pmax);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return p;
}

Eigen::VectorXi optimize_direction(const NetworkRealization& real, const RVector& p,
                                   const std::optional<Eigen::VectorXi>& start) {
    const int pairs = real.n_pairs();
    if (p.size() != real.n_users()) throw ShapeMismatch("power vector does not match the realization");
    const RVector power = pair_powers(p);
    Eigen::VectorXi t = start ? *start : max_power_direction(real);
    if (t.size() != real.n_users()) throw ShapeMismatch("start direction does not match the realization");

    auto flip = [&](int q) {
        std::swap(t[2 * q], t[2 * q + 1]);
    };
    double current = sum_secrecy(real, make_schedule(t, power));
    for (;;) {
        int best_pair = -1;
        double best_value = current;
        for (int q = 0; q < pairs; ++q) {
            flip(q);
            const double v = sum_secrecy(real, make_schedule(t, power));
            flip(q);
            if (v > best_value) {
                best_value = v;
                best_pair = q;
            }
        }
        if (best_pair < 0) break;
        flip(best_pair);
        current = best_value;
    }
    return t;
}

SolveResult solve(const NetworkRealization& real, const SolverConfig& cfg, StartDirection start) {
    cfg.validate();
    Eigen::VectorXi t = start == StartDirection::max_power ? max_power_direction(real) : hd_direction(real.n_pairs());
    RVector power = RVector::Constant(real.n_pairs(), real.pmax_w);

    SolveResult result;
    result.schedule = make_schedule(t, power);
    double best = sum_secrecy(real, result.schedule);
    result.trace.push_back(best);

    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        ++result.outer_iters;
        const RVector p = optimize_power(real, t, cfg, make_schedule(t, power).p);
        power = pair_powers(p);
        t = optimize_direction(real, p, t);
        const Schedule candidate = make_schedule(t, power);
        const double value = sum_secrecy(real, candidate);
        if (!(value > best)) break;
        const double gain = (value - best) / std::max(std::abs(best), std::numeric_limits<double>::min());
        best = value;
        result.schedule = candidate;
        result.trace.push_back(best);
        if (gain < cfg.rel_tol) break;
    }
    return result;
}

void write_trace_csv(std::ostream& os, const std::vector<double>& trace) {
    os << "iteration,objective_nats\n";
    for (std::size_t i = 0; i < trace.size(); ++i) os << i << "," << std::setprecision(17) << trace[i] << "\n";
}

Schedule baseline_hd(const NetworkRealization& real, const SolverConfig& cfg) {
    const Eigen::VectorXi t = hd_direction(real.n_pairs());
    return Schedule{t, optimize_power(real, t, cfg)};
}

Schedule baseline_max_power(const NetworkRealization& real) {
    const Eigen::VectorXi t = max_power_direction(real);
    return make_schedule(t, RVector::Constant(real.n_pairs(), real.pmax_w));
}

}  // namespace flexsec::classical
