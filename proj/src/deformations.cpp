#include "caustica/deformations.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "caustica/expansions.hpp"
#include "caustica/serialization.hpp"

namespace caustica {

BivariatePoly::BivariatePoly(Terms terms) {
    for (const auto& [ij, v] : terms) {
        if (ij.first < 0 || ij.second < 0)
            throw ConfigError("bivariate polynomial exponents must be non-negative");
        if (v != 0.0) terms_[ij] = v;
    }
}

int BivariatePoly::degree() const {
    int d = 0;
    for (const auto& [ij, v] : terms_) d = std::max(d, ij.first + ij.second);
    return d;
}

double BivariatePoly::coeff(int i, int j) const {
    auto it = terms_.find({i, j});
    return it == terms_.end() ? 0.0 : it->second;
}

double BivariatePoly::eval(double x, double y) const {
    double sum = 0.0;
    for (const auto& [ij, v] : terms_)
        sum += v * std::pow(x, ij.first) * std::pow(y, ij.second);
    return sum;
}

bool BivariatePoly::is_even() const {
    for (const auto& [ij, v] : terms_)
        if ((ij.first + ij.second) % 2 != 0) return false;
    return true;
}

bool BivariatePoly::is_odd() const {
    for (const auto& [ij, v] : terms_)
        if ((ij.first + ij.second) % 2 == 0) return false;
    return true;
}

std::string to_string(SymmetryClass sym) {
    switch (sym) {
    case SymmetryClass::centrally: return "centrally";
    case SymmetryClass::anti_centrally: return "anti-centrally";
    default: return "none";
    }
}

namespace {

double int_factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// multi-indices over l >= 0 with |alpha| = total and ||alpha|| = weight,
// returned as (alpha_0, positive-index part)
std::vector<std::pair<int, MultiIndex>> indices_with_zero_slot(int total, int weight) {
    std::vector<std::pair<int, MultiIndex>> out;
    for (int parts = 0; parts <= total; ++parts)
        for (const MultiIndex& alpha : enumerate_multi_indices(parts, weight))
            out.emplace_back(total - parts, alpha);
    return out;
}

TrigPoly component_product(const std::vector<TrigPoly>& comp,
                           const std::vector<TrigPoly>& comp0_pow, int a0,
                           const MultiIndex& alpha) {
    TrigPoly out = comp0_pow[a0];
    for (const auto& [l, a] : alpha.entries)
        for (int rep = 0; rep < a; ++rep) out = out * comp[l];
    return out;
}

} // namespace

std::vector<TrigPoly> support_from_cartesian(const BivariatePoly& P1, int max_order) {
    if (P1.empty()) throw ConfigError("cartesian deformation polynomial must be nonzero");
    if (max_order < 1) throw std::invalid_argument("support_from_cartesian needs max_order >= 1");

    const TrigPoly cosp = TrigPoly::cosine(1);
    const TrigPoly sinp = TrigPoly::sine(1);
    std::vector<TrigPoly> h(max_order + 1), dh(max_order + 1);
    std::vector<TrigPoly> xs(max_order + 1), ys(max_order + 1);
    h[0] = TrigPoly(1.0);
    xs[0] = cosp;
    ys[0] = sinp;

    // cached powers of the zeroth components cos(psi), sin(psi)
    const int pmax = P1.degree();
    std::vector<TrigPoly> cos_pow{TrigPoly(1.0)}, sin_pow{TrigPoly(1.0)};
    for (int a = 1; a <= pmax; ++a) {
        cos_pow.push_back(cos_pow.back() * cosp);
        sin_pow.push_back(sin_pow.back() * sinp);
    }

    for (int k = 1; k <= max_order; ++k) {
        TrigPoly Gs, Gb; // order-k parts of h^2 and (h')^2 free of h_k
        for (int i = 1; i <= k - 1; ++i) {
            Gs += h[i] * h[k - i];
            Gb += dh[i] * dh[k - i];
        }
        TrigPoly Gd; // order-(k-1) coefficient of P1(x(psi;eps), y(psi;eps))
        for (const auto& [ij, p] : P1.terms()) {
            const auto [i, j] = ij;
            const double fij = p * int_factorial(i) * int_factorial(j);
            for (int w = 0; w <= k - 1; ++w) {
                const auto alphas = indices_with_zero_slot(i, w);
                if (alphas.empty()) continue;
                const auto betas = indices_with_zero_slot(j, k - 1 - w);
                for (const auto& [a0, alpha] : alphas) {
                    const TrigPoly xa = component_product(xs, cos_pow, a0, alpha);
                    const double fa = int_factorial(a0) * alpha.factorial();
                    for (const auto& [b0, beta] : betas) {
                        const TrigPoly yb = component_product(ys, sin_pow, b0, beta);
                        const double fb = int_factorial(b0) * beta.factorial();
                        Gd += xa * yb * (fij / (fa * fb));
                    }
                }
            }
        }
        h[k] = (Gd - Gs - Gb) * 0.5;
        dh[k] = h[k].derivative();
        xs[k] = cosp * h[k] - sinp * dh[k];
        ys[k] = sinp * h[k] + cosp * dh[k];
    }
    return h;
}

DeformationSpec DeformationSpec::fourier(std::vector<TrigPoly> h_orders,
                                         std::optional<int> declared_degree) {
    DeformationSpec spec;
    spec.h_ = std::move(h_orders);
    if (spec.h_.empty()) spec.h_.resize(1);
    spec.h_[0] = TrigPoly(1.0);
    spec.declared_degree_ = declared_degree;
    if (declared_degree) {
        if (*declared_degree < 1) throw ConfigError("declared degree must be >= 1");
        if (!degree_check(spec.h_, *declared_degree))
            throw ConfigError("fourier orders exceed the declared degree bound deg(h_k) <= n*k");
    }
    return spec;
}

DeformationSpec DeformationSpec::cartesian(BivariatePoly P1) {
    if (P1.empty()) throw ConfigError("cartesian deformation polynomial must be nonzero");
    DeformationSpec spec;
    spec.P1_ = std::move(P1);
    spec.declared_degree_ = spec.P1_->degree();
    return spec;
}

const BivariatePoly& DeformationSpec::P1() const {
    if (!P1_) throw std::logic_error("not a cartesian deformation spec");
    return *P1_;
}

std::vector<TrigPoly> DeformationSpec::expand(int max_order) const {
    if (max_order < 1) throw std::invalid_argument("expand needs max_order >= 1");
    if (P1_) return support_from_cartesian(*P1_, max_order);
    std::vector<TrigPoly> out = h_;
    out.resize(max_order + 1);
    out[0] = TrigPoly(1.0);
    return out;
}

int DeformationSpec::degree_hint() const {
    if (declared_degree_) return *declared_degree_;
    int n = 1;
    for (std::size_t k = 1; k < h_.size(); ++k) {
        if (h_[k].empty()) continue;
        n = std::max(n, (h_[k].degree() + static_cast<int>(k) - 1) / static_cast<int>(k));
    }
    return n;
}

SymmetryFlags detect_symmetry_flags(const DeformationSpec& spec, int max_order,
                                    double tol_rel) {
    const auto h = spec.expand(max_order);
    SymmetryFlags flags{true, true};
    for (int k = 1; k <= max_order; ++k) {
        const double cut = tol_rel * h[k].max_abs();
        for (const auto& [l, v] : h[k].coeffs()) {
            if (std::abs(v) <= cut) continue;
            const int lpar = ((l % 2) + 2) % 2;
            if (lpar != 0) flags.central = false;
            if (lpar != k % 2) flags.anti_central = false;
        }
    }
    return flags;
}

SymmetryClass detect_symmetry(const DeformationSpec& spec, int max_order, double tol_rel) {
    const SymmetryFlags f = detect_symmetry_flags(spec, max_order, tol_rel);
    if (f.anti_central) return SymmetryClass::anti_centrally;
    if (f.central) return SymmetryClass::centrally;
    return SymmetryClass::none;
}

namespace {
int ceil_div_pos(int a, int b) { return (a + b - 1) / b; } // a >= 0, b > 0
int ceil_div(int a, int b) { return a >= 0 ? ceil_div_pos(a, b) : -((-a) / b); }
} // namespace

int chi_exponent(SymmetryClass sym, int n, int q) {
    if (n < 1 || q < 3) throw std::invalid_argument("chi_exponent needs n >= 1 and q >= 3");
    const bool odd_q = q % 2 != 0;
    if (sym == SymmetryClass::anti_centrally)
        return odd_q ? 1 + 2 * ceil_div(q - n, 2 * n) : 2 * ceil_div_pos(q, 2 * n);
    if (sym == SymmetryClass::centrally && odd_q) return ceil_div_pos(2 * q, n);
    return ceil_div_pos(q, n);
}

bool degree_check(const std::vector<TrigPoly>& h_orders, int n) {
    for (std::size_t k = 1; k < h_orders.size(); ++k)
        if (h_orders[k].degree() > n * static_cast<int>(k)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// JSON parsing

namespace {

using json = caustica::ojson;

void reject_unknown_keys(const json& node, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : node.items()) {
        (void)value;
        if (key == "polar")
            throw ConfigError("polar deformation input is not supported; use \"fourier\" "
                              "orders or a first-order \"cartesian\" polynomial");
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

TrigPoly harmonics_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array())
        throw ConfigError(where + " must be an array of [l, re, im] triples");
    TrigPoly::Coeffs coeffs;
    for (const auto& triple : arr) {
        if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number_integer() ||
            !triple[1].is_number() || !triple[2].is_number())
            throw ConfigError("malformed harmonic triple in " + where +
                              ": expected [l, re, im]");
        const int l = triple[0].get<int>();
        coeffs[l] += cplx(triple[1].get<double>(), triple[2].get<double>());
    }
    TrigPoly p = TrigPoly::from_coeffs(std::move(coeffs), true);
    try {
        p.normalized();
    } catch (const InternalError&) {
        throw ConfigError(where + " does not define a real function: coefficients must "
                          "satisfy c_{-l} = conj(c_l)");
    }
    return p;
}

} // namespace

DeformationSpec deformation_from_json(const ojson& node) {
    if (!node.is_object()) throw ConfigError("\"deformation\" must be an object");
    reject_unknown_keys(node, {"fourier", "cartesian", "degree"}, "\"deformation\"");
    const bool has_fourier = node.contains("fourier");
    const bool has_cartesian = node.contains("cartesian");
    if (has_fourier == has_cartesian)
        throw ConfigError("\"deformation\" needs exactly one of \"fourier\" or \"cartesian\"");

    std::optional<int> degree;
    if (node.contains("degree")) {
        if (!node["degree"].is_number_integer() || node["degree"].get<int>() < 1)
            throw ConfigError("\"degree\" must be a positive integer");
        degree = node["degree"].get<int>();
    }

    if (has_cartesian) {
        const json& cart = node["cartesian"];
        if (!cart.is_object()) throw ConfigError("\"cartesian\" must be an object");
        reject_unknown_keys(cart, {"terms"}, "\"cartesian\"");
        if (!cart.contains("terms") || !cart["terms"].is_array())
            throw ConfigError("\"cartesian\" needs a \"terms\" array of [i, j, coeff]");
        BivariatePoly::Terms terms;
        for (const auto& t : cart["terms"]) {
            if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
                !t[1].is_number_integer() || !t[2].is_number())
                throw ConfigError("malformed cartesian term: expected [i, j, coeff]");
            terms[{t[0].get<int>(), t[1].get<int>()}] += t[2].get<double>();
        }
        BivariatePoly P1(terms);
        if (degree && *degree < P1.degree())
            throw ConfigError("declared degree is below deg(P1)");
        return DeformationSpec::cartesian(std::move(P1));
    }

    const json& four = node["fourier"];
    if (!four.is_object()) throw ConfigError("\"fourier\" must be an object");
    reject_unknown_keys(four, {"h"}, "\"fourier\"");
    if (!four.contains("h") || !four["h"].is_array())
        throw ConfigError("\"fourier\" needs an \"h\" array with one harmonic list per order");
    std::vector<TrigPoly> h(1);
    int order = 0;
    for (const auto& arr : four["h"]) {
        ++order;
        h.push_back(harmonics_from_json(arr, "fourier order " + std::to_string(order)));
    }
    if (order == 0) throw ConfigError("\"fourier\" spec provides no orders");
    return DeformationSpec::fourier(std::move(h), degree);
}

DeformationSpec load_spec(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("deformation spec is not valid JSON: ") + e.what());
    }
    return deformation_from_json(doc);
}

DeformationSpec load_spec_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open deformation spec file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return load_spec(ss.str());
}

} // namespace caustica
