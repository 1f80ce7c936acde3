#pragma once

#include <iosfwd>

#include "json.hpp"

#include "caustica/deformations.hpp"
#include "caustica/persistence.hpp"
#include "caustica/trig_poly.hpp"

namespace caustica {

// ordered_json is used throughout: it keeps insertion order for deterministic
// output and avoids mixing basic_json specializations.
using ojson = nlohmann::ordered_json;

// {"real": bool, "coeffs": [[l, re, im], ...]} sorted by l; coefficients are
// normalized at tol_rel before emission.
ojson trig_poly_to_json(const TrigPoly& p, double tol_rel = kZeroTol);
TrigPoly trig_poly_from_json(const ojson& node);

// "l,re,im" rows sorted by l
void trig_poly_to_csv(const TrigPoly& p, std::ostream& os, double tol_rel = kZeroTol);

ojson report_to_json(const PersistenceReport& rep, double tol_rel = kZeroTol);

// Parses the {"fourier": ...} | {"cartesian": ...} node of a config document.
DeformationSpec deformation_from_json(const ojson& node);

} // namespace caustica
