#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "caustica/errors.hpp"

namespace caustica {

// Reduced rational rotation number p/q with 0 < p/q < 1/2 and q >= 3.
// Caches omega = 2*pi*p/q and the half-angle values c = cos(omega/2),
// s = sin(omega/2) that anchor the perturbative recursion.
class RotationNumber {
public:
    RotationNumber(int p, int q) : p_(p), q_(q) {
        if (p < 1 || q < 3)
            throw ConfigError("rotation number needs p >= 1 and q >= 3, got " +
                              std::to_string(p) + "/" + std::to_string(q));
        if (std::gcd(p, q) != 1)
            throw ConfigError("rotation number " + std::to_string(p) + "/" +
                              std::to_string(q) + " is not reduced");
        if (2 * p >= q)
            throw ConfigError("rotation number " + std::to_string(p) + "/" +
                              std::to_string(q) + " must be < 1/2");
        omega_ = 2.0 * std::numbers::pi * static_cast<double>(p) / q;
        c_ = std::cos(0.5 * omega_);
        s_ = std::sin(0.5 * omega_);
    }

    int p() const { return p_; }
    int q() const { return q_; }
    double omega() const { return omega_; }
    double c() const { return c_; }
    double s() const { return s_; }
    double rho() const { return static_cast<double>(p_) / q_; }

    bool resonant(long long l) const { return l % q_ == 0; }

    // e^{i l omega} with the angle reduced mod 2*pi in integer arithmetic, so
    // resonant harmonics map to exactly 1 and conjugate pairs stay conjugate.
    std::complex<double> unit_root(long long l) const {
        if (l < 0) return std::conj(unit_root(-l));
        long long m = ((l % q_) * (p_ % q_)) % q_;
        if (m == 0) return {1.0, 0.0};
        return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / q_);
    }

    friend bool operator==(const RotationNumber& a, const RotationNumber& b) {
        return a.p_ == b.p_ && a.q_ == b.q_;
    }

private:
    int p_;
    int q_;
    double omega_;
    double c_;
    double s_;
};

} // namespace caustica
