#include "caustica/persistence.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "caustica/deformations.hpp"

namespace caustica {

double nu_factor(int l, const RotationNumber& rot) {
    l = std::abs(l); // nu_l = nu_{-l}
    if (l < 2) throw std::invalid_argument("nu_factor is defined for |l| >= 2");
    if (l % rot.q() == 0)
        throw std::invalid_argument("nu_factor is undefined on resonant harmonics (l in qZ)");
    const double t1 = rot.s() / rot.c(); // tan(pi p/q)
    if ((2LL * l * rot.p()) % rot.q() == 0) return 1.0 / t1;
    // reduce l*p mod q before taking the tangent
    const long long m = (static_cast<long long>(l) * rot.p()) % rot.q();
    const double tl = std::tan(std::numbers::pi * static_cast<double>(m) / rot.q());
    return (tl - l * t1) / (t1 * tl);
}

TrigPoly theta1_closed_form(const TrigPoly& h1, const RotationNumber& rot,
                            const Tolerances& tol) {
    const TrigPoly res = apply_operator(h1, OpKind::resonant_projection, rot);
    if (res.max_abs() > tol.obstruction_threshold(h1.max_abs()))
        throw std::invalid_argument("h_1 carries resonant harmonics: "
                                    "the caustic breaks at order 1");
    TrigPoly::Coeffs out;
    for (const auto& [l, v] : h1.coeffs()) {
        if (std::abs(l) <= 1 || rot.resonant(l)) continue;
        out[l] = nu_factor(l, rot) * v;
    }
    return TrigPoly::from_coeffs(std::move(out), h1.is_real());
}

TrigPoly zeta_extract(const TrigPoly& q_tail, const RotationNumber& rot,
                      const Tolerances& tol) {
    (void)rot;
    if (std::abs(q_tail.coeff(0)) > tol.obstruction_threshold(q_tail.max_abs()))
        throw InternalError("zeta extraction: the theta-free obstruction part has a "
                            "nonzero mean and is not integrable");
    TrigPoly::Coeffs out;
    for (const auto& [l, v] : q_tail.coeffs()) {
        if (l == 0) continue;
        out[l] = v / (cplx(0.0, static_cast<double>(l)) * rot.s());
    }
    return TrigPoly::from_coeffs(std::move(out), q_tail.is_real());
}

TrigPoly melnikov_potential(const TrigPoly& q_coeff, const RotationNumber& rot,
                            const Tolerances& tol) {
    if (std::abs(q_coeff.coeff(0)) > tol.obstruction_threshold(q_coeff.max_abs()))
        throw InternalError("Melnikov potential: obstruction coefficient has nonzero mean");
    TrigPoly::Coeffs out;
    for (const auto& [l, v] : q_coeff.coeffs()) {
        if (l == 0 || !rot.resonant(l)) continue;
        out[l] = 2.0 * v / cplx(0.0, static_cast<double>(l));
    }
    return TrigPoly::from_coeffs(std::move(out), q_coeff.is_real());
}

TrigPoly compute_correction(const TrigPoly& q_coeff, const RotationNumber& rot,
                            const Tolerances& tol) {
    if (std::abs(q_coeff.coeff(0)) > tol.obstruction_threshold(q_coeff.max_abs()))
        throw InternalError("correction: obstruction coefficient has nonzero mean, "
                            "no periodic correction exists");
    TrigPoly::Coeffs out;
    for (const auto& [l, v] : q_coeff.coeffs()) {
        if (l == 0 || !rot.resonant(l)) continue;
        out[l] = -v / (cplx(0.0, static_cast<double>(l)) * rot.s());
    }
    return TrigPoly::from_coeffs(std::move(out), q_coeff.is_real());
}

TrigPoly zeta3_reference(const ExpansionState& st) {
    if (st.completed_order() < 2)
        throw std::invalid_argument("zeta3_reference needs orders 1 and 2 committed");
    const double c = st.rot().c();
    const double s = st.rot().s();
    const TrigPoly& t1 = st.theta(1);
    const TrigPoly& t2 = st.theta(2);
    const TrigPoly& p1 = st.psi(1);
    const TrigPoly& h1 = st.h(1);
    TrigPoly z = t1 * t2 + h1 * t1 * t1 * 0.5 - st.h_deriv(1, 2) * p1 * p1 * 0.5 +
                 t1 * t1 * t1 * (c / (3.0 * s)) - st.dh(1) * t1 * p1 * (c / s);
    return z - TrigPoly(z.coeff(0).real());
}

StepOutcome persistence_step(ExpansionState& st, int k, const Tolerances& tol) {
    if (k != st.completed_order() + 1)
        throw std::invalid_argument("persistence_step: orders below " + std::to_string(k) +
                                    " must already persist in the state");
    const RotationNumber rot = st.rot();
    const auto& P = st.prepare_order(k);

    const double threshold = tol.obstruction_threshold(P.Q.max_abs());
    if (std::abs(P.Q.coeff(0)) > threshold)
        throw InternalError("order " + std::to_string(k) +
                            ": mean of the obstruction coefficient must vanish when all "
                            "lower orders persist");

    StepOutcome out;
    out.q_coeff = P.Q;
    out.zeta = zeta_extract(P.Q - st.dh(k) * rot.s(), rot, tol);

    const TrigPoly resonant = apply_operator(P.Q, OpKind::resonant_projection, rot);
    if (resonant.max_abs() > threshold) {
        out.persists = false;
        out.resonant_part = resonant;
        out.melnikov = melnikov_potential(P.Q, rot, tol);
        out.correction = compute_correction(P.Q, rot, tol);
        return out;
    }

    out.persists = true;
    TrigPoly rhs = (apply_operator(P.Rt, OpKind::diff, rot) -
                    apply_operator(P.Q, OpKind::sum, rot)) *
                   (1.0 / rot.s());
    // drop the sub-threshold resonant residue before inverting
    rhs = rhs - apply_operator(rhs, OpKind::average, rot);
    TrigPoly theta = invert_delta(rhs, rot, {}, tol.zero);
    TrigPoly phi = invert_delta(theta * 2.0, rot, {}, tol.zero);
    TrigPoly psi = phi + theta;
    out.theta = theta;
    out.phi = phi;
    out.psi = psi;
    st.commit_order(k, std::move(theta), std::move(phi), std::move(psi), out.zeta);
    return out;
}

PersistenceReport run_analysis(ExpansionState& st, int max_order, const Tolerances& tol) {
    if (max_order < 1) throw ConfigError("max_order must be at least 1");
    if (max_order > kHardMaxOrder)
        throw ConfigError("max_order " + std::to_string(max_order) + " exceeds the hard cap " +
                          std::to_string(kHardMaxOrder));
    if (st.max_order() < max_order)
        throw std::invalid_argument("expansion state lacks deformation orders up to " +
                                    std::to_string(max_order));
    PersistenceReport rep;
    rep.p = st.rot().p();
    rep.q = st.rot().q();
    rep.melnikov.resize(1);
    rep.zeta.resize(1);
    rep.correction.resize(1);

    const double s = st.rot().s();
    for (int k = 1; k <= max_order; ++k) {
        StepOutcome oc = persistence_step(st, k, tol);
        rep.zeta.push_back(oc.zeta);
        rep.melnikov.push_back(oc.persists ? TrigPoly{} : oc.melnikov);
        rep.correction.push_back(oc.persists ? TrigPoly{} : oc.correction);
        if (!oc.persists) {
            rep.breaking_order = k;
            const double threshold = tol.obstruction_threshold(oc.q_coeff.max_abs());
            for (const auto& [l, v] : oc.resonant_part.coeffs()) {
                if (std::abs(v) <= threshold) continue;
                rep.obstructions.push_back(
                    {k, l, v / (cplx(0.0, static_cast<double>(l)) * s)});
            }
            break;
        }
    }
    rep.verified_order = rep.breaking_order ? *rep.breaking_order - 1 : max_order;

    for (int k = 0; k <= rep.verified_order; ++k) {
        TrigPoly acc;
        for (int j = 0; j <= k; ++j) acc += st.support_coeff(j) * st.sin_coeff(k - j);
        rep.lengths.push_back(2.0 * st.rot().q() * acc.coeff(0).real());
    }
    return rep;
}

PersistenceReport run_analysis(const DeformationSpec& spec, const RotationNumber& rot,
                               int max_order, const Tolerances& tol) {
    ExpansionState st(rot, spec.expand(max_order));
    return run_analysis(st, max_order, tol);
}

} // namespace caustica
