#include "caustica/trig_poly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace caustica {

void TrigPoly::set(int l, cplx v) {
    if (v.real() == 0.0 && v.imag() == 0.0) {
        coeffs_.erase(l);
    } else {
        coeffs_[l] = v;
    }
}

void TrigPoly::check_degree_cap() const {
    if (degree() > kMaxDegree)
        throw InternalError("trig polynomial degree " + std::to_string(degree()) +
                            " exceeds the hard cap " + std::to_string(kMaxDegree));
}

TrigPoly TrigPoly::from_coeffs(Coeffs coeffs, bool real_flag) {
    TrigPoly p;
    p.real_ = real_flag;
    for (const auto& [l, v] : coeffs) p.set(l, v);
    p.check_degree_cap();
    return p;
}

TrigPoly TrigPoly::harmonic(int l, cplx amplitude, bool real_flag) {
    TrigPoly p;
    p.real_ = real_flag;
    p.set(l, amplitude);
    p.check_degree_cap();
    return p;
}

TrigPoly TrigPoly::cosine(int l, double amp) {
    TrigPoly p;
    if (l == 0) {
        p.set(0, amp);
    } else {
        p.set(l, 0.5 * amp);
        p.set(-l, 0.5 * amp);
    }
    p.check_degree_cap();
    return p;
}

TrigPoly TrigPoly::sine(int l, double amp) {
    TrigPoly p;
    if (l != 0) {
        p.set(l, cplx(0.0, -0.5 * amp));
        p.set(-l, cplx(0.0, 0.5 * amp));
    }
    p.check_degree_cap();
    return p;
}

int TrigPoly::degree() const {
    int d = 0;
    for (const auto& [l, v] : coeffs_) d = std::max(d, std::abs(l));
    return d;
}

cplx TrigPoly::coeff(int l) const {
    auto it = coeffs_.find(l);
    return it == coeffs_.end() ? cplx{} : it->second;
}

double TrigPoly::max_abs() const {
    double m = 0.0;
    for (const auto& [l, v] : coeffs_) m = std::max(m, std::abs(v));
    return m;
}

TrigPoly TrigPoly::normalized(double tol_rel) const {
    const double scale = max_abs();
    TrigPoly out;
    out.real_ = real_;
    if (scale == 0.0) return out;
    const double cut = tol_rel * scale;
    if (real_) {
        double asym = 0.0;
        for (const auto& [l, v] : coeffs_) {
            if (l < 0) continue;
            const cplx w = std::conj(coeff(-l));
            asym = std::max(asym, std::abs(v - w));
            const cplx avg = 0.5 * (v + w);
            if (std::abs(avg) <= cut) continue;
            if (l == 0) {
                out.set(0, cplx(avg.real(), 0.0));
            } else {
                out.set(l, avg);
                out.set(-l, std::conj(avg));
            }
        }
        // negative-only harmonics missed above
        for (const auto& [l, v] : coeffs_) {
            if (l >= 0 || coeffs_.count(-l)) continue;
            asym = std::max(asym, std::abs(v));
            const cplx avg = 0.5 * v;
            if (std::abs(avg) <= cut) continue;
            out.set(l, avg);
            out.set(-l, std::conj(avg));
        }
        if (asym > 1e3 * tol_rel * scale)
            throw InternalError("real-flagged trig polynomial violates Hermitian symmetry "
                                "beyond tolerance: likely corrupted input");
    } else {
        for (const auto& [l, v] : coeffs_)
            if (std::abs(v) > cut) out.set(l, v);
    }
    out.check_degree_cap();
    return out;
}

TrigPoly TrigPoly::derivative() const {
    TrigPoly out;
    out.real_ = real_;
    for (const auto& [l, v] : coeffs_)
        out.set(l, v * cplx(0.0, static_cast<double>(l)));
    return out;
}

TrigPoly TrigPoly::antiderivative(double tol_rel) const {
    if (std::abs(coeff(0)) > tol_rel * std::max(max_abs(), 1e-300))
        throw InternalError("antiderivative requires a zero-mean trig polynomial");
    TrigPoly out;
    out.real_ = real_;
    for (const auto& [l, v] : coeffs_) {
        if (l == 0) continue;
        out.set(l, v / cplx(0.0, static_cast<double>(l)));
    }
    return out;
}

double TrigPoly::eval(double t) const {
    if (real_) {
        double sum = coeff(0).real();
        for (const auto& [l, v] : coeffs_) {
            if (l <= 0) continue;
            sum += 2.0 * (v.real() * std::cos(l * t) - v.imag() * std::sin(l * t));
        }
        return sum;
    }
    return eval_complex(t).real();
}

cplx TrigPoly::eval_complex(double t) const {
    cplx sum{};
    for (const auto& [l, v] : coeffs_) sum += v * std::polar(1.0, l * t);
    return sum;
}

TrigPoly TrigPoly::operator+(const TrigPoly& other) const {
    TrigPoly out = *this;
    out.real_ = real_ && other.real_;
    for (const auto& [l, v] : other.coeffs_) out.set(l, out.coeff(l) + v);
    return out;
}

TrigPoly TrigPoly::operator-(const TrigPoly& other) const {
    TrigPoly out = *this;
    out.real_ = real_ && other.real_;
    for (const auto& [l, v] : other.coeffs_) out.set(l, out.coeff(l) - v);
    return out;
}

TrigPoly TrigPoly::operator-() const {
    TrigPoly out;
    out.real_ = real_;
    for (const auto& [l, v] : coeffs_) out.set(l, -v);
    return out;
}

TrigPoly TrigPoly::operator*(const TrigPoly& other) const {
    TrigPoly out;
    out.real_ = real_ && other.real_;
    if (coeffs_.empty() || other.coeffs_.empty()) return out;
    Coeffs acc;
    for (const auto& [la, va] : coeffs_)
        for (const auto& [lb, vb] : other.coeffs_) {
            // for Hermitian inputs build l >= 0 and mirror, so symmetry is bit-exact
            if (out.real_ && la + lb < 0) continue;
            acc[la + lb] += va * vb;
        }
    if (out.real_) {
        for (const auto& [l, v] : acc) {
            if (l == 0) {
                out.set(0, cplx(v.real(), 0.0)); // imaginary part is pure roundoff
            } else {
                out.set(l, v);
                out.set(-l, std::conj(v));
            }
        }
    } else {
        for (const auto& [l, v] : acc) out.set(l, v);
    }
    out.check_degree_cap();
    return out;
}

TrigPoly TrigPoly::operator*(double scalar) const {
    TrigPoly out;
    out.real_ = real_;
    for (const auto& [l, v] : coeffs_) out.set(l, v * scalar);
    return out;
}

TrigPoly TrigPoly::operator*(cplx scalar) const {
    TrigPoly out;
    out.real_ = real_ && scalar.imag() == 0.0;
    for (const auto& [l, v] : coeffs_) out.set(l, v * scalar);
    return out;
}

double TrigPoly::max_abs_diff(const TrigPoly& a, const TrigPoly& b) {
    double m = 0.0;
    for (const auto& [l, v] : a.coeffs_) m = std::max(m, std::abs(v - b.coeff(l)));
    for (const auto& [l, v] : b.coeffs_) m = std::max(m, std::abs(v - a.coeff(l)));
    return m;
}

std::ostream& operator<<(std::ostream& os, const TrigPoly& p) {
    os << "{";
    bool first = true;
    for (const auto& [l, v] : p.coeffs()) {
        if (!first) os << ", ";
        first = false;
        os << l << ": " << v.real();
        if (v.imag() != 0.0) os << (v.imag() > 0 ? "+" : "") << v.imag() << "i";
    }
    return os << "}";
}

} // namespace caustica
