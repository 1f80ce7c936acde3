#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "caustica/operators.hpp"
#include "caustica/rotation.hpp"
#include "caustica/serialization.hpp"
#include "caustica/trig_poly.hpp"

using namespace caustica;

namespace {

TrigPoly random_poly(std::mt19937& rng, int max_deg, bool real = true) {
    std::uniform_int_distribution<int> deg(0, max_deg);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    TrigPoly::Coeffs coeffs;
    const int terms = deg(rng) + 1;
    for (int i = 0; i < terms; ++i) {
        const int l = deg(rng);
        const cplx v(amp(rng), l == 0 ? 0.0 : amp(rng));
        coeffs[l] += v;
        if (l != 0) coeffs[-l] += std::conj(v);
    }
    return TrigPoly::from_coeffs(std::move(coeffs), real);
}

RotationNumber random_rotation(std::mt19937& rng, int qmax = 12) {
    std::uniform_int_distribution<int> qd(3, qmax);
    for (;;) {
        const int q = qd(rng);
        std::uniform_int_distribution<int> pd(1, (q - 1) / 2);
        const int p = pd(rng);
        if (std::gcd(p, q) == 1 && 2 * p < q) return {p, q};
    }
}

} // namespace

TEST_CASE("rotation number validation and cached values") {
    RotationNumber rot(1, 4);
    CHECK(rot.omega() == doctest::Approx(std::numbers::pi / 2));
    CHECK(rot.c() == doctest::Approx(std::cos(std::numbers::pi / 4)));
    CHECK(rot.s() > 0);
    CHECK_THROWS_AS(RotationNumber(2, 4), ConfigError);  // not reduced
    CHECK_THROWS_AS(RotationNumber(2, 3), ConfigError);  // >= 1/2
    CHECK_THROWS_AS(RotationNumber(1, 2), ConfigError);  // q < 3
    CHECK(RotationNumber(1, 5).unit_root(5) == cplx(1.0, 0.0));
    CHECK(RotationNumber(1, 5).unit_root(-3) == std::conj(RotationNumber(1, 5).unit_root(3)));
}

TEST_CASE("normalize keeps exact data and prunes noise") {
    TrigPoly cos1 = TrigPoly::from_coeffs({{1, 0.5}, {-1, 0.5}}, true);
    TrigPoly n = cos1.normalized();
    CHECK(n.degree() == 1);
    CHECK(TrigPoly::max_abs_diff(n, cos1) == 0.0);

    TrigPoly tiny = TrigPoly::from_coeffs({{3, 1e-20}, {0, 1.0}}, true);
    CHECK(tiny.normalized().coeff(3) == cplx(0.0, 0.0));
    TrigPoly only_tiny = TrigPoly::from_coeffs({{3, cplx(1e-20, 0)}, {-3, cplx(1e-20, 0)}}, true);
    // pruning is relative: a lone tiny pair is its own scale and survives
    CHECK(only_tiny.normalized().degree() == 3);

    TrigPoly pair = TrigPoly::from_coeffs({{2, cplx(0, 0.5)}, {-2, cplx(0, -0.5)}}, true);
    CHECK(TrigPoly::max_abs_diff(pair.normalized(), pair) == 0.0);

    TrigPoly bad = TrigPoly::from_coeffs({{2, cplx(0, 0.5)}, {-2, cplx(0, 0.4)}}, true);
    CHECK_THROWS_AS(bad.normalized(), InternalError);
}

TEST_CASE("derivative on the standard examples") {
    CHECK(TrigPoly::max_abs_diff(TrigPoly::cosine(2).derivative(), TrigPoly::sine(2, -2.0)) ==
          0.0);
    CHECK(TrigPoly(5.0).derivative().empty());
    CHECK(TrigPoly::max_abs_diff(TrigPoly::sine(1).derivative(), TrigPoly::cosine(1)) == 0.0);
}

TEST_CASE("multiply: product-to-sum identities") {
    TrigPoly c1 = TrigPoly::cosine(1);
    TrigPoly prod = c1 * c1;
    TrigPoly expect = TrigPoly(0.5) + TrigPoly::cosine(2, 0.5);
    CHECK(TrigPoly::max_abs_diff(prod, expect) < 1e-16);

    CHECK((c1 * TrigPoly{}).empty());

    // cos(2t) sin(3t) = (sin(5t) + sin(t))/2, with a pointwise oracle
    TrigPoly p = TrigPoly::cosine(2) * TrigPoly::sine(3);
    TrigPoly want = TrigPoly::sine(5, 0.5) + TrigPoly::sine(1, 0.5);
    CHECK(TrigPoly::max_abs_diff(p, want) < 1e-16);
    for (int i = 0; i < 32; ++i) {
        const double t = 2.0 * std::numbers::pi * i / 32;
        CHECK(p.eval(t) == doctest::Approx(std::cos(2 * t) * std::sin(3 * t)).epsilon(1e-12));
    }
}

TEST_CASE("shift/sum/diff/average/resonant projection") {
    RotationNumber q3(1, 3);
    TrigPoly e3 = TrigPoly::harmonic(3, 1.0);
    CHECK(TrigPoly::max_abs_diff(apply_operator(e3, OpKind::average, q3), e3) == 0.0);
    TrigPoly e1 = TrigPoly::harmonic(1, 1.0);
    CHECK(apply_operator(e1, OpKind::average, q3).empty());

    RotationNumber q4(1, 4);
    TrigPoly shifted = apply_operator(e1, OpKind::shift, q4);
    CHECK(std::abs(shifted.coeff(1) - cplx(0.0, 1.0)) < 1e-16);

    CHECK(apply_operator(TrigPoly(7.0), OpKind::diff, q4).empty());
    TrigPoly mixed = TrigPoly::harmonic(4, 2.0) + TrigPoly::harmonic(1, 1.0) + TrigPoly(3.0);
    TrigPoly res = apply_operator(mixed, OpKind::resonant_projection, q4);
    CHECK(res.coeff(4) == cplx(2.0, 0.0));
    CHECK(res.coeff(0) == cplx(0.0, 0.0));
    CHECK(res.coeff(1) == cplx(0.0, 0.0));
}

TEST_CASE("delta inversion") {
    RotationNumber rot(1, 5);
    TrigPoly b = TrigPoly::harmonic(1, 1.0);
    TrigPoly a = invert_delta(b, rot);
    const cplx denom = std::polar(1.0, 2.0 * std::numbers::pi / 5) - 1.0;
    CHECK(std::abs(a.coeff(1) - 1.0 / denom) < 1e-15);

    CHECK(invert_delta(TrigPoly{}, rot).empty());
    CHECK_THROWS_AS(invert_delta(TrigPoly::harmonic(5, 1.0), rot), InternalError);

    // affine variant
    CHECK(invert_delta_affine(TrigPoly(rot.omega()), rot).empty());
    TrigPoly ba = TrigPoly(rot.omega()) + b;
    CHECK(std::abs(invert_delta_affine(ba, rot).coeff(1) - 1.0 / denom) < 1e-15);
    CHECK_THROWS_AS(invert_delta_affine(TrigPoly{}, rot), InternalError);

    // prescribed average must be resonant
    TrigPoly avg = TrigPoly::harmonic(5, 2.0);
    TrigPoly a2 = invert_delta(b, rot, avg);
    CHECK(a2.coeff(5) == cplx(2.0, 0.0));
    CHECK_THROWS_AS(invert_delta(b, rot, TrigPoly::harmonic(2, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("operator identities, round trips and conditioning on random data") {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 1000; ++trial) {
        const RotationNumber rot = random_rotation(rng);
        const TrigPoly a = random_poly(rng, 14);
        const double scale = std::max(a.max_abs(), 1e-30);

        const TrigPoly mu = apply_operator(a, OpKind::average, rot);
        const TrigPoly mu_tau =
            apply_operator(apply_operator(a, OpKind::shift, rot), OpKind::average, rot);
        const TrigPoly mu_sigma =
            apply_operator(apply_operator(a, OpKind::sum, rot), OpKind::average, rot);
        const TrigPoly mu_delta =
            apply_operator(apply_operator(a, OpKind::diff, rot), OpKind::average, rot);
        const TrigPoly mu_mu = apply_operator(mu, OpKind::average, rot);
        CHECK(TrigPoly::max_abs_diff(mu_tau, mu) <= 1e-12 * scale);
        CHECK(TrigPoly::max_abs_diff(mu_sigma, mu * 2.0) <= 1e-12 * scale);
        CHECK(mu_delta.max_abs() <= 1e-12 * scale);
        CHECK(TrigPoly::max_abs_diff(mu_mu, mu) == 0.0);

        // round trip on the non-resonant part
        const TrigPoly b = a - mu;
        const TrigPoly inv = invert_delta(b, rot, {}, 1e-12);
        CHECK(TrigPoly::max_abs_diff(apply_operator(inv, OpKind::diff, rot), b) <=
              1e-12 * scale);

        // conditioning: no amplification beyond the smallest divisor
        const double bound =
            1.0 / std::abs(std::polar(1.0, 2.0 * std::numbers::pi / rot.q()) - 1.0);
        for (const auto& [l, v] : inv.coeffs())
            CHECK(std::abs(v) <= bound * std::abs(b.coeff(l)) * (1.0 + 1e-12));

        // operators preserve degree; multiply is degree-additive
        CHECK(apply_operator(a, OpKind::shift, rot).degree() == a.degree());
        const TrigPoly c = random_poly(rng, 6);
        CHECK((a * c).degree() <= a.degree() + c.degree());
    }
}

TEST_CASE("real flag propagation keeps Hermitian symmetry bit-exact") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 200; ++trial) {
        const RotationNumber rot = random_rotation(rng);
        TrigPoly a = random_poly(rng, 10);
        TrigPoly b = random_poly(rng, 6);
        for (const TrigPoly& p :
             {a * b, a.derivative(), apply_operator(a, OpKind::shift, rot),
              invert_delta(a - apply_operator(a, OpKind::average, rot), rot)}) {
            CHECK(p.is_real());
            for (const auto& [l, v] : p.coeffs()) CHECK(v == std::conj(p.coeff(-l)));
        }
    }
}

TEST_CASE("JSON and CSV serialization round trip") {
    TrigPoly p = TrigPoly::cosine(2, 0.25) + TrigPoly::sine(5, -1.5) + TrigPoly(0.75);
    auto j = trig_poly_to_json(p);
    CHECK(j["real"] == true);
    TrigPoly back = trig_poly_from_json(j);
    CHECK(TrigPoly::max_abs_diff(p, back) == 0.0);

    // byte determinism
    CHECK(trig_poly_to_json(p).dump() == trig_poly_to_json(p).dump());

    std::ostringstream csv;
    trig_poly_to_csv(p, csv);
    CHECK(csv.str().rfind("l,re,im\n", 0) == 0);

    CHECK_THROWS_AS(trig_poly_from_json(ojson::parse("{\"real\": true}")), ConfigError);
}
