#pragma once

#include "caustica/rotation.hpp"
#include "caustica/trig_poly.hpp"

namespace caustica {

// Shift, sum, difference, q-point average and resonant projection, all
// diagonal in the Fourier basis:
//   shift    c_l -> e^{i l omega} c_l
//   sum      c_l -> (e^{i l omega} + 1) c_l
//   diff     c_l -> (e^{i l omega} - 1) c_l
//   average  keeps only l in qZ
//   resonant_projection  keeps only l in qZ, l != 0
enum class OpKind { shift, sum, diff, average, resonant_projection };

TrigPoly apply_operator(const TrigPoly& a, OpKind kind, const RotationNumber& rot);

// Solves diff{a} = b for periodic a: a_l = b_l / (e^{i l omega} - 1) on the
// non-resonant harmonics, with the resonant part prescribed freely. A resonant
// coefficient of b above tol_rel * max|b_l| makes the equation unsolvable.
// prescribed_average may contain only qZ-harmonics.
TrigPoly invert_delta(const TrigPoly& b, const RotationNumber& rot,
                      const TrigPoly& prescribed_average = {}, double tol_rel = kZeroTol);

// Solves diff{t + a(t)} = b for periodic a; requires mean(b) = omega and no
// other resonant content, i.e. reduces to invert_delta(b - omega).
TrigPoly invert_delta_affine(const TrigPoly& b, const RotationNumber& rot,
                             const TrigPoly& prescribed_average = {},
                             double tol_rel = kZeroTol);

} // namespace caustica
