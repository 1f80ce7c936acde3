#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "caustica/trig_poly.hpp"

namespace caustica {

// Real bivariate polynomial P(x,y) = sum p_ij x^i y^j, sparse in (i,j).
class BivariatePoly {
public:
    using Terms = std::map<std::pair<int, int>, double>;

    BivariatePoly() = default;
    explicit BivariatePoly(Terms terms);

    const Terms& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    int degree() const;
    double coeff(int i, int j) const;
    double eval(double x, double y) const;
    // parity under (x,y) -> (-x,-y)
    bool is_even() const;
    bool is_odd() const;

private:
    Terms terms_;
};

enum class SymmetryClass { none, centrally, anti_centrally };

std::string to_string(SymmetryClass sym);

// Support-function expansion h_k of the deformation x^2 + y^2 = 1 + eps*P1(x,y),
// solved order by order from
//   2 h_k = Gd_{k-1} - Gs_k - Gb_k,
// where Gs_k, Gb_k collect the order-k products of lower-order h, h' in
// h^2 + (h')^2, and Gd_k expands P1(x(psi;eps), y(psi;eps)) with
// x = cos(psi) h - sin(psi) h', y = sin(psi) h + cos(psi) h' through
// multinomial multi-index sums. Returned vector is order-indexed with
// slot 0 = constant 1; h_k has degree <= k*deg(P1).
std::vector<TrigPoly> support_from_cartesian(const BivariatePoly& P1, int max_order);

// The perturbation input: either per-order Fourier coefficients of the support
// function or a first-order Cartesian polynomial (expanded on demand).
class DeformationSpec {
public:
    static DeformationSpec fourier(std::vector<TrigPoly> h_orders,
                                   std::optional<int> declared_degree = {});
    static DeformationSpec cartesian(BivariatePoly P1);

    bool is_cartesian() const { return P1_.has_value(); }
    const BivariatePoly& P1() const;
    std::optional<int> declared_degree() const { return declared_degree_; }

    // h_1..h_max_order, order-indexed with slot 0 = constant 1; fourier specs
    // are zero-padded, cartesian specs expanded through the recurrence.
    std::vector<TrigPoly> expand(int max_order) const;

    // declared degree, or deg(P1), or the smallest n with deg(h_k) <= n*k.
    int degree_hint() const;

private:
    DeformationSpec() = default;
    std::vector<TrigPoly> h_; // order-indexed, slot 0 unused
    std::optional<BivariatePoly> P1_;
    std::optional<int> declared_degree_;
};

// Harmonic-parity flags of the expanded orders: central <=> every h_k has only
// even harmonics; anti-central <=> h_k harmonics have parity k mod 2.
struct SymmetryFlags {
    bool central = false;
    bool anti_central = false;
};

SymmetryFlags detect_symmetry_flags(const DeformationSpec& spec, int max_order,
                                    double tol_rel = kZeroTol);

// Single-class summary; a spec within tolerance of both classes reports
// anti_centrally (callers that know q can take the better persistence bound
// over both admissible classes).
SymmetryClass detect_symmetry(const DeformationSpec& spec, int max_order,
                              double tol_rel = kZeroTol);

// Guaranteed-breakup exponent for polynomial deformations of degree <= n:
// the p/q caustic persists at least to order chi - 1.
int chi_exponent(SymmetryClass sym, int n, int q);

// true iff deg(h_k) <= n*k for every provided order (h_orders order-indexed).
bool degree_check(const std::vector<TrigPoly>& h_orders, int n);

// Parses the {"fourier": ...} | {"cartesian": ...} deformation document.
DeformationSpec load_spec(const std::string& json_text);
DeformationSpec load_spec_file(const std::filesystem::path& path);

} // namespace caustica
