#include "caustica/operators.hpp"

#include <cmath>
#include <string>

namespace caustica {

TrigPoly apply_operator(const TrigPoly& a, OpKind kind, const RotationNumber& rot) {
    TrigPoly::Coeffs out;
    for (const auto& [l, v] : a.coeffs()) {
        switch (kind) {
        case OpKind::shift:
            out[l] = v * rot.unit_root(l);
            break;
        case OpKind::sum:
            out[l] = v * (rot.unit_root(l) + 1.0);
            break;
        case OpKind::diff:
            // unit_root is exactly 1 on resonant harmonics, so diff kills them
            out[l] = v * (rot.unit_root(l) - 1.0);
            break;
        case OpKind::average:
            if (rot.resonant(l)) out[l] = v;
            break;
        case OpKind::resonant_projection:
            if (l != 0 && rot.resonant(l)) out[l] = v;
            break;
        }
    }
    return TrigPoly::from_coeffs(std::move(out), a.is_real());
}

TrigPoly invert_delta(const TrigPoly& b, const RotationNumber& rot,
                      const TrigPoly& prescribed_average, double tol_rel) {
    for (const auto& [l, v] : prescribed_average.coeffs())
        if (!rot.resonant(l))
            throw std::invalid_argument("prescribed average must contain only resonant harmonics");

    const double scale = b.max_abs();
    TrigPoly::Coeffs out;
    for (const auto& [l, v] : b.coeffs()) {
        if (rot.resonant(l)) {
            if (std::abs(v) > tol_rel * scale)
                throw InternalError(
                    "difference equation has a resonant right-hand side at harmonic l=" +
                    std::to_string(l) + " (q=" + std::to_string(rot.q()) +
                    "): no periodic solution exists");
            continue; // sub-tolerance resonant noise
        }
        out[l] = v / (rot.unit_root(l) - 1.0);
    }
    TrigPoly a = TrigPoly::from_coeffs(std::move(out), b.is_real() && prescribed_average.is_real());
    return a + prescribed_average;
}

TrigPoly invert_delta_affine(const TrigPoly& b, const RotationNumber& rot,
                             const TrigPoly& prescribed_average, double tol_rel) {
    const double scale = std::max(b.max_abs(), rot.omega());
    if (std::abs(b.coeff(0) - rot.omega()) > tol_rel * scale)
        throw InternalError("affine difference equation requires mean(b) = omega");
    return invert_delta(b - TrigPoly(rot.omega()), rot, prescribed_average, tol_rel);
}

} // namespace caustica
