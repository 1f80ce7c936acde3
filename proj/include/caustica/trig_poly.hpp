#pragma once

#include <complex>
#include <iosfwd>
#include <map>

#include "caustica/errors.hpp"

namespace caustica {

using cplx = std::complex<double>;

// Relative pruning / symmetry tolerance used when none is given explicitly.
inline constexpr double kZeroTol = 1e-9;
// Guard against runaway harmonic growth; degrees are known a priori (n*k),
// so hitting the cap means corrupted input, not a legitimate computation.
inline constexpr int kMaxDegree = 4096;

// Finite Fourier series  a(t) = sum_l c_l e^{i l t}  of a 2*pi-periodic
// function, stored sparsely by signed harmonic index. is_real() marks
// Hermitian symmetry c_{-l} = conj(c_l), i.e. real values on the real line.
//
// Immutable value type in spirit: every operation returns a new polynomial.
// Coefficients that become exactly zero are dropped; pruning of merely tiny
// coefficients happens only in normalized().
class TrigPoly {
public:
    using Coeffs = std::map<int, cplx>;

    TrigPoly() = default;
    explicit TrigPoly(double constant) { set(0, constant); }

    static TrigPoly from_coeffs(Coeffs coeffs, bool real_flag);
    static TrigPoly harmonic(int l, cplx amplitude, bool real_flag = false);
    // amp*cos(l t) and amp*sin(l t) as Hermitian pairs
    static TrigPoly cosine(int l, double amp = 1.0);
    static TrigPoly sine(int l, double amp = 1.0);

    bool is_real() const { return real_; }
    bool empty() const { return coeffs_.empty(); }
    const Coeffs& coeffs() const { return coeffs_; }
    int degree() const;
    cplx coeff(int l) const;
    cplx mean() const { return coeff(0); }
    double max_abs() const;

    // Prunes entries below tol_rel * max|c_l| and, when real-flagged, enforces
    // Hermitian symmetry by averaging c_l with conj(c_{-l}). An asymmetry
    // above 1e3 * tol_rel * max|c_l| means the data is corrupted and throws.
    TrigPoly normalized(double tol_rel = kZeroTol) const;

    TrigPoly derivative() const;
    // Zero-mean antiderivative; requires |c_0| <= tol_rel * max|c_l|.
    TrigPoly antiderivative(double tol_rel = kZeroTol) const;

    double eval(double t) const;
    cplx eval_complex(double t) const;

    TrigPoly operator+(const TrigPoly& other) const;
    TrigPoly operator-(const TrigPoly& other) const;
    TrigPoly operator-() const;
    TrigPoly operator*(const TrigPoly& other) const;
    TrigPoly operator*(double scalar) const;
    TrigPoly operator*(cplx scalar) const;
    TrigPoly& operator+=(const TrigPoly& other) { return *this = *this + other; }
    TrigPoly& operator-=(const TrigPoly& other) { return *this = *this - other; }

    // max_l |a_l - b_l| over the union of supports
    static double max_abs_diff(const TrigPoly& a, const TrigPoly& b);

private:
    void set(int l, cplx v);
    void check_degree_cap() const;

    Coeffs coeffs_;
    bool real_ = true;
};

inline TrigPoly operator*(double scalar, const TrigPoly& p) { return p * scalar; }

std::ostream& operator<<(std::ostream& os, const TrigPoly& p);

} // namespace caustica
