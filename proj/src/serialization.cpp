#include "caustica/serialization.hpp"

#include <ostream>

namespace caustica {

nlohmann::ordered_json trig_poly_to_json(const TrigPoly& p, double tol_rel) {
    const TrigPoly n = p.normalized(tol_rel);
    nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
    for (const auto& [l, v] : n.coeffs())
        coeffs.push_back({l, v.real(), v.imag()});
    return {{"real", n.is_real()}, {"coeffs", std::move(coeffs)}};
}

TrigPoly trig_poly_from_json(const ojson& node) {
    if (!node.is_object() || !node.contains("real") || !node.contains("coeffs") ||
        !node["real"].is_boolean() || !node["coeffs"].is_array())
        throw ConfigError("trig polynomial must be {\"real\": bool, \"coeffs\": [[l,re,im],...]}");
    TrigPoly::Coeffs coeffs;
    for (const auto& triple : node["coeffs"]) {
        if (!triple.is_array() || triple.size() != 3 || !triple[0].is_number_integer() ||
            !triple[1].is_number() || !triple[2].is_number())
            throw ConfigError("malformed harmonic triple: expected [l, re, im]");
        coeffs[triple[0].get<int>()] +=
            cplx(triple[1].get<double>(), triple[2].get<double>());
    }
    return TrigPoly::from_coeffs(std::move(coeffs), node["real"].get<bool>());
}

void trig_poly_to_csv(const TrigPoly& p, std::ostream& os, double tol_rel) {
    os << "l,re,im\n";
    const TrigPoly n = p.normalized(tol_rel);
    for (const auto& [l, v] : n.coeffs())
        os << l << "," << v.real() << "," << v.imag() << "\n";
}

nlohmann::ordered_json report_to_json(const PersistenceReport& rep, double tol_rel) {
    nlohmann::ordered_json j;
    j["p"] = rep.p;
    j["q"] = rep.q;
    j["verified_order"] = rep.verified_order;
    if (rep.breaking_order)
        j["breaking_order"] = *rep.breaking_order;
    else
        j["breaking_order"] = nullptr;
    nlohmann::ordered_json obs = nlohmann::ordered_json::array();
    for (const Obstruction& o : rep.obstructions)
        obs.push_back({{"k", o.order},
                       {"l", o.harmonic},
                       {"re", o.amplitude.real()},
                       {"im", o.amplitude.imag()}});
    j["obstructions"] = std::move(obs);
    auto poly_list = [&](const std::vector<TrigPoly>& list) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (std::size_t k = 1; k < list.size(); ++k)
            arr.push_back(trig_poly_to_json(list[k], tol_rel));
        return arr;
    };
    j["melnikov"] = poly_list(rep.melnikov);
    j["zeta"] = poly_list(rep.zeta);
    j["correction"] = poly_list(rep.correction);
    j["lengths"] = rep.lengths;
    return j;
}

} // namespace caustica
