#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "caustica/expansions.hpp"

namespace caustica {

class DeformationSpec;

struct Tolerances {
    double zero = kZeroTol;           // pruning / symmetry / solver compatibility
    double obstruction_rel = 1e-8;    // relative to max_l |Q_k coefficient|
    double obstruction_floor = 1e-13; // absolute floor for obstruction decisions

    double obstruction_threshold(double scale) const {
        return std::max(obstruction_floor, obstruction_rel * scale);
    }
};

inline constexpr int kDefaultMaxOrder = 12;
inline constexpr int kHardMaxOrder = 32;

// First-order solution factor nu_l(p/q) multiplying the harmonic l of h_1:
//   (tan(l pi rho) - l tan(pi rho)) / (tan(pi rho) tan(l pi rho))  if 2 l rho not in Z,
//   1 / tan(pi rho)                                                if 2 l rho in Z, l rho not in Z.
// Symmetric in l <-> -l; undefined (and rejected) on resonant l.
double nu_factor(int l, const RotationNumber& rot);

// theta_1 = sum_{l not in qZ u {-1,1}} nu_l * h1_l e^{i l t}. Requires h_1 free
// of resonant harmonics, otherwise the caustic already breaks at order one.
TrigPoly theta1_closed_form(const TrigPoly& h1, const RotationNumber& rot,
                            const Tolerances& tol = {});

// zeta_k with s*zeta_k' = q_tail and zero mean; q_tail must have zero mean.
TrigPoly zeta_extract(const TrigPoly& q_tail, const RotationNumber& rot,
                      const Tolerances& tol = {});

// Melnikov potential: zero-mean antiderivative of 2*mu{Q_k}; only resonant
// harmonics survive, so it is 2*pi/q-periodic.
TrigPoly melnikov_potential(const TrigPoly& q_coeff, const RotationNumber& rot,
                            const Tolerances& tol = {});

// Support correction eta_k, carried on the resonant nonzero harmonics only,
// solving mu{s*eta_k' + Q_k} = 0. Adding eps^k * eta_k to the support function
// restores order-k persistence.
TrigPoly compute_correction(const TrigPoly& q_coeff, const RotationNumber& rot,
                            const Tolerances& tol = {});

// Closed form for zeta_3 in terms of order-1/2 data; cross-validates the
// recursive extraction. Requires orders 1 and 2 committed.
TrigPoly zeta3_reference(const ExpansionState& st);

struct StepOutcome {
    bool persists = false;
    // persisting branch
    TrigPoly theta, phi, psi;
    // breaking branch
    TrigPoly resonant_part; // resonant projection of Q_k
    TrigPoly melnikov;      // L_k
    TrigPoly correction;    // eta_k
    // both branches
    TrigPoly zeta;    // zeta_k, zero mean
    TrigPoly q_coeff; // Q_k
};

// One order of the iterative algorithm: computes Q_k, Rt_k, tests the
// obstruction mu{Q_k} = 0, and either solves
//   s*diff{theta_k} = diff{Rt_k} - sum{Q_k},  mu{theta_k} = 0,
//   diff{phi_k} = 2*theta_k,  mu{phi_k} = 0,  psi_k = phi_k + theta_k
// and commits the order, or reports the breakup data.
StepOutcome persistence_step(ExpansionState& st, int k, const Tolerances& tol = {});

struct Obstruction {
    int order;
    int harmonic;
    std::complex<double> amplitude; // resonant coefficient of h_k + zeta_k
};

struct PersistenceReport {
    int p = 0;
    int q = 0;
    int verified_order = 0;
    std::optional<int> breaking_order;
    std::vector<Obstruction> obstructions;
    // order-indexed (slot 0 unused); zero except at the breaking order
    std::vector<TrigPoly> melnikov;
    std::vector<TrigPoly> zeta;
    std::vector<TrigPoly> correction;
    // order-k coefficients of the trajectory length 2q*mu{h(psi)sin(theta)},
    // k = 0..verified_order (diagnostic)
    std::vector<double> lengths;
};

// Runs persistence_step for k = 1..max_order, stopping at the first breakup.
PersistenceReport run_analysis(ExpansionState& st, int max_order,
                               const Tolerances& tol = {});
PersistenceReport run_analysis(const DeformationSpec& spec, const RotationNumber& rot,
                               int max_order, const Tolerances& tol = {});

} // namespace caustica
