#pragma once

#include <Eigen/Core>

#include "flexsec/channel.hpp"

namespace flexsec {

// Binary transmit/receive assignment plus per-user transmit power (watts).
struct Schedule {
    Eigen::VectorXi t;  // 1 = transmitter, 0 = receiver
    RVector p;

    int n_users() const { return static_cast<int>(t.size()); }
    bool operator==(const Schedule& o) const { return t == o.t && p == o.p; }
};

// Soft schedule used only inside differentiable evaluation: t in [0, 1] with
// t_m + t_n = 1 per pair.
struct RelaxedSchedule {
    RVector t;
    RVector p;
};

// Partner of user n in 1-based numbering: m = 2(n mod 2) + n - 1.
// Throws DomainError when n is outside [1, n_users].
int pair_partner(int n, int n_users);

// 0-based partner: users 2p and 2p+1 form pair p.
constexpr int partner_index(int i) { return i ^ 1; }

// Effective transmit weights w_i = t_i * p_i gating every SINR term.
RVector link_weights(const Schedule& s);
RVector link_weights(const RelaxedSchedule& s);

// SINR at receiver n (0-based) from its partner.
double flexd_sinr(const NetworkRealization& real, const RVector& weights, int n);
double flexd_sinr(const NetworkRealization& real, const Schedule& s, int n);
double flexd_sinr(const NetworkRealization& real, const RelaxedSchedule& s, int n);

// MMSE SINR of transmitter m (0-based) at the coordinated eavesdroppers,
// evaluated with a Hermitian positive-definite solve.
double eve_sinr(const NetworkRealization& real, const RVector& weights, int m);
double eve_sinr(const NetworkRealization& real, const Schedule& s, int m);
double eve_sinr(const NetworkRealization& real, const RelaxedSchedule& s, int m);

// [ln(1 + gamma_f) - ln(1 + gamma_e)]^+ in nats.
double secrecy_from_sinr(double gamma_f, double gamma_e);

// Secrecy rate of the link from transmitter m to its partner.
double secrecy_rate(const NetworkRealization& real, const Schedule& s, int m);

// Clamped objective summed over all 2N directed links.
double sum_secrecy(const NetworkRealization& real, const Schedule& s);

// Clamp-free variant; for binary schedules this never exceeds sum_secrecy.
double relaxed_sum_secrecy(const NetworkRealization& real, const RelaxedSchedule& s);
double relaxed_sum_secrecy(const NetworkRealization& real, const Schedule& s);

struct RelaxedObjective {
    double value = 0.0;
    RVector d_weights;  // gradient w.r.t. w_i = t_i p_i
    RVector d_t;
    RVector d_p;
};

// Relaxed sum secrecy together with its exact gradient. The eavesdropper
// term is differentiated through the solve's adjoint:
// d gamma_m^E / d w_j = -w_m |g_j^H A_m^{-1} g_m|^2 for interferers j.
RelaxedObjective relaxed_sum_secrecy_grad(const NetworkRealization& real, const RVector& t, const RVector& p);

// Checks pairing, binary t, box [0, pmax] and silent receivers.
bool is_feasible(const Schedule& s, double pmax_w, int n_users);

// Converts nats to bits.
inline double nats_to_bits(double nats) { return nats / 0.69314718055994530942; }

}  // namespace flexsec
