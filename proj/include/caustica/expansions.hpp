#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "caustica/operators.hpp"
#include "caustica/rotation.hpp"
#include "caustica/trig_poly.hpp"

namespace caustica {

// Sparse multi-index alpha = (alpha_l)_{l >= start}: order |alpha| = sum alpha_l,
// weight ||alpha|| = sum l*alpha_l, factorial alpha! = prod alpha_l!.
struct MultiIndex {
    std::map<int, int> entries; // l -> alpha_l, only nonzero entries stored

    int order() const;
    int weight() const;
    double factorial() const;
};

// All multi-indices with entries at l >= 1, |alpha| = order, ||alpha|| = weight,
// in a deterministic lexicographic order. Results are memoized per (order, weight).
std::vector<MultiIndex> enumerate_multi_indices(int order, int weight);

// sin/cos expansion coefficients S_0..S_K, C_0..C_K generated from the
// incidence-reflection coefficients theta_1..theta_K around theta_0 = omega/2:
//   S_0 = s,  C_0 = c,
//   S_k =  c*theta_k + (1/k) sum_{l=1}^{k-1} l*theta_l*C_{k-l},
//   C_k = -s*theta_k - (1/k) sum_{l=1}^{k-1} l*theta_l*S_{k-l}.
// thetas is order-indexed (thetas[k] = theta_k, slot 0 ignored).
std::pair<std::vector<TrigPoly>, std::vector<TrigPoly>>
sincos_series(const RotationNumber& rot, const std::vector<TrigPoly>& thetas);

// Order-k coefficient of f(psi(t;eps);eps) where f has expansion coefficients
// f_orders (order-indexed; f_orders[0] is the constant term) and the
// reparametrization is psi(t;eps) = t + sum_j eps^j psi_j(t):
//   H_k = f_k + sum_{i=1}^{k-1} sum_{j=1}^{k-i}
//           ( sum_{|alpha|=j, ||alpha||=k-i} psi^alpha / alpha! ) f_i^{(j)}.
// This is the pure multinomial form; the ExpansionState engine computes the
// same coefficients through a cached recurrence.
TrigPoly compose_coeffs(const std::vector<TrigPoly>& f_orders,
                        const std::vector<TrigPoly>& psi_orders, int k);

// Per-order data of the perturbed side/normal/incidence-reflection functions
//   phi(t;eps) = t - omega/2 + sum_k eps^k phi_k(t)
//   psi(t;eps) = t           + sum_k eps^k psi_k(t)
//   theta(t;eps) = omega/2   + sum_k eps^k theta_k(t)
// together with the derived expansions of sin(theta), cos(theta), h(psi),
// h'(psi) and the building blocks of the difference equation. Orders are
// committed one at a time; everything committed is immutable.
class ExpansionState {
public:
    // h_orders is order-indexed: h_orders[k] = h_k for k >= 1, slot 0 ignored
    // (the unperturbed support function is the constant 1).
    ExpansionState(RotationNumber rot, std::vector<TrigPoly> h_orders);

    const RotationNumber& rot() const { return rot_; }
    int max_order() const { return static_cast<int>(h_.size()) - 1; }
    int completed_order() const { return completed_; }

    const TrigPoly& h(int k) const { return h_.at(k); }
    const TrigPoly& dh(int k) const { return dh_.at(k); }
    // j-th t-derivative of h_i (j >= 0), cached
    const TrigPoly& h_deriv(int i, int j) const;

    const TrigPoly& theta(int k) const { return theta_.at(k); } // theta(0) = omega/2
    const TrigPoly& phi(int k) const { return phi_.at(k); }     // deviation, k >= 1
    const TrigPoly& psi(int k) const { return psi_.at(k); }     // deviation, k >= 1
    const TrigPoly& sin_coeff(int k) const { return S_.at(k); }
    const TrigPoly& cos_coeff(int k) const { return C_.at(k); }
    const TrigPoly& support_coeff(int k) const { return Hh_.at(k); }       // h(psi)
    const TrigPoly& support_deriv_coeff(int k) const { return Hdh_.at(k); } // h'(psi)
    const TrigPoly& q_coeff(int k) const { return Q_.at(k); }   // h'(psi)*sin(theta)
    const TrigPoly& rt_coeff(int k) const { return Rt_.at(k); } // theta_k-free part of h(psi)*cos(theta)
    const TrigPoly& zeta(int k) const { return zeta_.at(k); }

    // Order-k objects that exist before theta_k is known. Q and Rt satisfy
    //   Q_k  = s*h'_k + s*(H'_k - h'_k) + sum_{l<k} H'_l * S_{k-l}
    //   Rt_k = c*H_k + C~_k + sum_{l<k} H_l * C_{k-l}
    // with H_k, H'_k the order-k coefficients of h(psi), h'(psi), and
    // S~_k, C~_k the theta_k-free tails of S_k, C_k.
    struct PendingOrder {
        int k = 0;
        TrigPoly support_k;       // H_k
        TrigPoly support_deriv_k; // H'_k
        TrigPoly sin_tail;        // S~_k
        TrigPoly cos_tail;        // C~_k
        TrigPoly Q;
        TrigPoly Rt;
    };

    // Computes (and caches) the pending data for k = completed_order() + 1.
    const PendingOrder& prepare_order(int k);

    // Finalizes order k from the solved theta_k and its companions.
    void commit_order(int k, TrigPoly theta_k, TrigPoly phi_k, TrigPoly psi_k,
                      TrigPoly zeta_k);

    // Swaps in a corrected deformation coefficient at a not-yet-committed order.
    void replace_h(int k, TrigPoly new_h);

    // sum over |alpha| = j, ||alpha|| = w of psi^alpha / alpha!, via
    //   B_j(w) = (1/j) sum_l psi_l B_{j-1}(w-l),  B_0(0) = 1,
    // cached; only committed psi orders are touched (l <= w - j + 1).
    const TrigPoly& psi_power_sum(int j, int w);

private:
    RotationNumber rot_;
    int completed_ = 0;
    std::vector<TrigPoly> h_, dh_;
    std::vector<TrigPoly> theta_, phi_, psi_;
    std::vector<TrigPoly> S_, C_, Hh_, Hdh_, Q_, Rt_, zeta_;
    std::optional<PendingOrder> pending_;
    mutable std::map<std::pair<int, int>, TrigPoly> deriv_cache_;
    std::map<std::pair<int, int>, TrigPoly> power_sum_cache_;
};

// Spec-facing wrappers over the state caches.
std::pair<TrigPoly, TrigPoly> sincos_coeffs(const ExpansionState& st, int k);
std::pair<TrigPoly, TrigPoly> qr_coeffs(ExpansionState& st, int k);

} // namespace caustica
