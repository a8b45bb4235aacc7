#include "flexsec/secrecy.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "flexsec/errors.hpp"

namespace flexsec {

namespace {

constexpr double kResidualTol = 1e-12;

// Interference-plus-noise covariance seen by the eavesdroppers when decoding
// transmitter m: sigma^2 I + sum_{j not in {m, n}} w_j g_j g_j^H.
CMatrix eve_covariance(const NetworkRealization& real, const RVector& w, int m) {
    const int n = partner_index(m);
    const int k = real.n_eves();
    CMatrix a = CMatrix::Identity(k, k) * real.noise_w;
    for (int j = 0; j < real.n_users(); ++j) {
        if (j == m || j == n || w[j] == 0.0) continue;
        a.selfadjointView<Eigen::Lower>().rankUpdate(real.G.row(j).transpose(), w[j]);
    }
    return a.selfadjointView<Eigen::Lower>();
}

// x = A^{-1} g through Cholesky, falling back to a pivoted LU solve when the
// factorization breaks down or leaves a large residual.
CVector hpd_solve(const CMatrix& a, const CVector& g) {
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() == Eigen::Success) {
        CVector x = llt.solve(g);
        // Normwise backward error of the computed solution.
        if ((a * x - g).norm() <= kResidualTol * (a.norm() * x.norm() + g.norm())) return x;
    }
    return a.partialPivLu().solve(g);
}

void check_users(const NetworkRealization& real, const RVector& w) {
    if (w.size() != real.n_users()) {
        throw ShapeMismatch("schedule has " + std::to_string(w.size()) + " users, realization has " +
                            std::to_string(real.n_users()));
    }
}

}  // namespace

int pair_partner(int n, int n_users) {
    if (n < 1 || n > n_users) {
        throw DomainError("user index " + std::to_string(n) + " outside [1, " + std::to_string(n_users) + "]");
    }
    return 2 * (n % 2) + n - 1;
}

RVector link_weights(const Schedule& s) { return s.t.cast<double>().cwiseProduct(s.p); }
RVector link_weights(const RelaxedSchedule& s) { return s.t.cwiseProduct(s.p); }

double flexd_sinr(const NetworkRealization& real, const RVector& w, int n) {
    check_users(real, w);
    const int m = partner_index(n);
    if (w[m] == 0.0) return 0.0;
    double interference = real.noise_w;
    for (int j = 0; j < real.n_users(); ++j) {
        if (j == m || j == n) continue;
        interference += w[j] * std::norm(real.H(n, j));
    }
    return w[m] * std::norm(real.H(n, m)) / interference;
}

double flexd_sinr(const NetworkRealization& real, const Schedule& s, int n) {
    return flexd_sinr(real, link_weights(s), n);
}

double flexd_sinr(const NetworkRealization& real, const RelaxedSchedule& s, int n) {
    return flexd_sinr(real, link_weights(s), n);
}

double eve_sinr(const NetworkRealization& real, const RVector& w, int m) {
    check_users(real, w);
    if (w[m] == 0.0) return 0.0;
    const CVector g = real.G.row(m).transpose();
    const CVector x = hpd_solve(eve_covariance(real, w, m), g);
    return w[m] * std::max(0.0, g.dot(x).real());
}

double eve_sinr(const NetworkRealization& real, const Schedule& s, int m) {
    return eve_sinr(real, link_weights(s), m);
}

double eve_sinr(const NetworkRealization& real, const RelaxedSchedule& s, int m) {
    return eve_sinr(real, link_weights(s), m);
}

double secrecy_from_sinr(double gamma_f, double gamma_e) {
    return std::max(0.0, std::log1p(gamma_f) - std::log1p(gamma_e));
}

double secrecy_rate(const NetworkRealization& real, const Schedule& s, int m) {
    const RVector w = link_weights(s);
    return secrecy_from_sinr(flexd_sinr(real, w, partner_index(m)), eve_sinr(real, w, m));
}

double sum_secrecy(const NetworkRealization& real, const Schedule& s) {
    const RVector w = link_weights(s);
    double total = 0.0;
    for (int m = 0; m < real.n_users(); ++m) {
        if (w[m] == 0.0) continue;
        total += secrecy_from_sinr(flexd_sinr(real, w, partner_index(m)), eve_sinr(real, w, m));
    }
    return total;
}

double relaxed_sum_secrecy(const NetworkRealization& real, const RelaxedSchedule& s) {
    const RVector w = link_weights(s);
    check_users(real, w);
    double total = 0.0;
    for (int m = 0; m < real.n_users(); ++m) {
        if (w[m] == 0.0) continue;
        total += std::log1p(flexd_sinr(real, w, partner_index(m))) - std::log1p(eve_sinr(real, w, m));
    }
    return total;
}

double relaxed_sum_secrecy(const NetworkRealization& real, const Schedule& s) {
    return relaxed_sum_secrecy(real, RelaxedSchedule{s.t.cast<double>(), s.p});
}

RelaxedObjective relaxed_sum_secrecy_grad(const NetworkRealization& real, const RVector& t, const RVector& p) {
    const int users = real.n_users();
    if (t.size() != users || p.size() != users) {
        throw ShapeMismatch("relaxed objective expects " + std::to_string(users) + " users");
    }
    const RVector w = t.cwiseProduct(p);
    RelaxedObjective out;
    out.d_weights = RVector::Zero(users);

    for (int m = 0; m < users; ++m) {
        if (w[m] == 0.0) {
            // Zero weight still has a one-sided derivative: both SINRs are
            // linear in w_m at the origin.
            const int n = partner_index(m);
            double interference = real.noise_w;
            for (int j = 0; j < users; ++j)
                if (j != m && j != n) interference += w[j] * std::norm(real.H(n, j));
            const CVector g = real.G.row(m).transpose();
            const CVector x = hpd_solve(eve_covariance(real, w, m), g);
            out.d_weights[m] += std::norm(real.H(n, m)) / interference - std::max(0.0, g.dot(x).real());
            continue;
        }
        const int n = partner_index(m);

        // Legitimate receiver n.
        double interference = real.noise_w;
        for (int j = 0; j < users; ++j)
            if (j != m && j != n) interference += w[j] * std::norm(real.H(n, j));
        const double gain = std::norm(real.H(n, m));
        const double gamma_f = w[m] * gain / interference;
        const double df = 1.0 / (1.0 + gamma_f);
        out.d_weights[m] += df * gain / interference;
        for (int j = 0; j < users; ++j) {
            if (j == m || j == n) continue;
            out.d_weights[j] -= df * gamma_f * std::norm(real.H(n, j)) / interference;
        }

        // Eavesdroppers decoding m.
        const CVector g = real.G.row(m).transpose();
        const CVector x = hpd_solve(eve_covariance(real, w, m), g);
        const double q = std::max(0.0, g.dot(x).real());
        const double gamma_e = w[m] * q;
        const double de = 1.0 / (1.0 + gamma_e);
        out.d_weights[m] -= de * q;
        for (int j = 0; j < users; ++j) {
            if (j == m || j == n) continue;
            const cdouble gjx = (real.G.row(j).conjugate() * x)(0);
            out.d_weights[j] += de * w[m] * std::norm(gjx);
        }

        out.value += std::log1p(gamma_f) - std::log1p(gamma_e);
    }
    out.d_t = out.d_weights.cwiseProduct(p);
    out.d_p = out.d_weights.cwiseProduct(t);
    return out;
}

bool is_feasible(const Schedule& s, double pmax_w, int n_users) {
    if (s.t.size() != n_users || s.p.size() != n_users || n_users % 2 != 0) return false;
    for (int i = 0; i < n_users; ++i) {
        if (s.t[i] != 0 && s.t[i] != 1) return false;
        if (s.t[i] != 1 - s.t[partner_index(i)]) return false;
        if (!(s.p[i] >= 0.0) || s.p[i] > pmax_w) return false;
        if (s.t[i] == 0 && s.p[i] != 0.0) return false;
    }
    return true;
}

}  // namespace flexsec
