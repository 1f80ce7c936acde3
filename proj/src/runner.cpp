#include "caustica/runner.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "caustica/billiard.hpp"
#include "caustica/serialization.hpp"

namespace caustica {

namespace {

using json = caustica::ojson;

void reject_unknown(const json& node, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, value] : node.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

int require_int(const json& node, const std::string& what, int lo, int hi) {
    if (!node.is_number_integer())
        throw ConfigError(what + " must be an integer");
    const int v = node.get<int>();
    if (v < lo || v > hi)
        throw ConfigError(what + " must lie in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
    return v;
}

double require_pos(const json& node, const std::string& what) {
    if (!node.is_number() || node.get<double>() <= 0.0)
        throw ConfigError(what + " must be a positive number");
    return node.get<double>();
}

std::vector<RotationNumber> parse_rotations(const json& node) {
    if (!node.is_object()) throw ConfigError("\"rotation\" must be an object");
    std::vector<RotationNumber> out;
    if (node.contains("q_range")) {
        reject_unknown(node, {"q_range"}, "\"rotation\"");
        const json& r = node["q_range"];
        if (!r.is_array() || r.size() != 2)
            throw ConfigError("\"q_range\" must be [q_min, q_max]");
        const int a = require_int(r[0], "q_range lower bound", 3, 1 << 20);
        const int b = require_int(r[1], "q_range upper bound", a, 1 << 20);
        for (int q = a; q <= b; ++q)
            for (int p = 1; 2 * p < q; ++p)
                if (std::gcd(p, q) == 1) out.emplace_back(p, q);
    } else {
        reject_unknown(node, {"p", "q"}, "\"rotation\"");
        if (!node.contains("p") || !node.contains("q"))
            throw ConfigError("\"rotation\" needs either {p, q} or {q_range}");
        out.emplace_back(require_int(node["p"], "p", 1, 1 << 20),
                         require_int(node["q"], "q", 3, 1 << 20));
    }
    if (out.empty()) throw ConfigError("rotation list is empty");
    return out;
}

std::string rotation_tag(const RotationNumber& rot) {
    return "p" + std::to_string(rot.p()) + "_q" + std::to_string(rot.q());
}

// Runs fn(i) over [0, jobs) on a small pool; rethrows the first exception.
template <typename Fn>
void parallel_for(std::size_t jobs, Fn&& fn) {
    const int workers = worker_count(jobs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int exit_code_for(const std::exception_ptr& e, std::ostream& os) {
    try {
        std::rethrow_exception(e);
    } catch (const ConfigError& ex) {
        os << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const OracleError& ex) {
        os << "oracle failure: " << ex.what() << "\n";
        return 4;
    } catch (const std::exception& ex) {
        os << "internal error: " << ex.what() << "\n";
        return 3;
    }
}

// chi prediction taking the best admissible symmetry bound for this q
int predicted_chi(const SymmetryFlags& flags, int n, int q) {
    int chi = chi_exponent(SymmetryClass::none, n, q);
    if (flags.central) chi = std::max(chi, chi_exponent(SymmetryClass::centrally, n, q));
    if (flags.anti_central)
        chi = std::max(chi, chi_exponent(SymmetryClass::anti_centrally, n, q));
    return chi;
}

std::vector<double> geometric_sweep(const OracleSettings& o) {
    std::vector<double> eps(o.eps_count);
    const double ratio = std::pow(o.eps_lo / o.eps_hi, 1.0 / (o.eps_count - 1));
    double e = o.eps_hi;
    for (int i = 0; i < o.eps_count; ++i, e *= ratio) eps[i] = e;
    return eps;
}

} // namespace

RunConfig load_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc, {"deformation", "rotation", "max_order", "tolerances", "oracle"},
                   "config");
    if (!doc.contains("deformation") || !doc.contains("rotation"))
        throw ConfigError("config needs \"deformation\" and \"rotation\"");

    RunConfig cfg;
    cfg.spec = deformation_from_json(doc["deformation"]);
    cfg.rotations = parse_rotations(doc["rotation"]);
    if (doc.contains("max_order"))
        cfg.max_order = require_int(doc["max_order"], "max_order", 1, kHardMaxOrder);
    if (doc.contains("tolerances")) {
        const json& t = doc["tolerances"];
        if (!t.is_object()) throw ConfigError("\"tolerances\" must be an object");
        reject_unknown(t, {"zero", "obstruction", "obstruction_floor"}, "\"tolerances\"");
        if (t.contains("zero")) cfg.tol.zero = require_pos(t["zero"], "tolerances.zero");
        if (t.contains("obstruction"))
            cfg.tol.obstruction_rel = require_pos(t["obstruction"], "tolerances.obstruction");
        if (t.contains("obstruction_floor"))
            cfg.tol.obstruction_floor =
                require_pos(t["obstruction_floor"], "tolerances.obstruction_floor");
    }
    if (doc.contains("oracle")) {
        const json& o = doc["oracle"];
        if (!o.is_object()) throw ConfigError("\"oracle\" must be an object");
        reject_unknown(o, {"eps_sweep", "grid"}, "\"oracle\"");
        if (o.contains("eps_sweep")) {
            const json& s = o["eps_sweep"];
            if (!s.is_array() || s.size() != 3)
                throw ConfigError("\"eps_sweep\" must be [lo, hi, count]");
            cfg.oracle.eps_lo = require_pos(s[0], "eps_sweep lower bound");
            cfg.oracle.eps_hi = require_pos(s[1], "eps_sweep upper bound");
            cfg.oracle.eps_count = require_int(s[2], "eps_sweep count", 2, 1000);
            if (cfg.oracle.eps_lo >= cfg.oracle.eps_hi)
                throw ConfigError("eps_sweep needs lo < hi");
        }
        if (o.contains("grid")) cfg.oracle.grid = require_int(o["grid"], "grid", 16, 1 << 16);
    }
    return cfg;
}

RunConfig load_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_run_config(ss.str());
}

int worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("CAUSTICA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

int cmd_analyze(const RunConfig& cfg, const std::string& out_dir, std::ostream& os) {
    try {
        std::filesystem::create_directories(out_dir);
        const auto h_orders = cfg.spec.expand(cfg.max_order);
        const DeformationSpec expanded = DeformationSpec::fourier(h_orders);
        const SymmetryFlags flags = detect_symmetry_flags(expanded, cfg.max_order, cfg.tol.zero);
        const int n = cfg.spec.degree_hint();

        std::vector<PersistenceReport> reports(cfg.rotations.size());
        parallel_for(cfg.rotations.size(), [&](std::size_t i) {
            ExpansionState st(cfg.rotations[i], h_orders);
            reports[i] = run_analysis(st, cfg.max_order, cfg.tol);
        });

        std::ofstream csv(std::filesystem::path(out_dir) / "summary.csv");
        csv << "q,p,chi,verified_order,breaking_order\n";
        os << "  q   p  chi  verified  breaking\n";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const PersistenceReport& rep = reports[i];
            const int chi = predicted_chi(flags, n, rep.q);
            const std::string breaking =
                rep.breaking_order ? std::to_string(*rep.breaking_order) : "";
            csv << rep.q << "," << rep.p << "," << chi << "," << rep.verified_order << ","
                << breaking << "\n";
            os << std::setw(3) << rep.q << " " << std::setw(3) << rep.p << " " << std::setw(4)
               << chi << " " << std::setw(9) << rep.verified_order << " " << std::setw(9)
               << (breaking.empty() ? "-" : breaking) << "\n";
            std::ofstream jf(std::filesystem::path(out_dir) /
                             ("report_" + rotation_tag(cfg.rotations[i]) + ".json"));
            jf << report_to_json(rep, cfg.tol.zero).dump(2) << "\n";
        }
        return 0;
    } catch (...) {
        return exit_code_for(std::current_exception(), os);
    }
}

int cmd_verify(const RunConfig& cfg, const std::string& out_dir, std::ostream& os) {
    try {
        if (cfg.oracle.eps_count < 3)
            throw ConfigError("epsilon sweep needs at least 3 points");
        std::filesystem::create_directories(out_dir);
        // a couple of orders of headroom so the support carries content
        // beyond the verified order
        const int k_support = std::min(cfg.max_order + 2, kHardMaxOrder);
        const auto h_orders = cfg.spec.expand(k_support);
        const auto eps_values = geometric_sweep(cfg.oracle);
        const auto grid = uniform_grid(cfg.oracle.grid);

        struct Row {
            std::vector<SweepPoint> sweep;
            std::vector<double> residual_hi;
            ScalingFit fit;
            int verified = 0;
            bool broke = false;
            std::string status;
        };
        std::vector<Row> rows(cfg.rotations.size());

        parallel_for(cfg.rotations.size(), [&](std::size_t i) {
            const RotationNumber rot = cfg.rotations[i];
            Row& row = rows[i];
            ExpansionState st(rot, h_orders);
            PersistenceReport rep = run_analysis(st, cfg.max_order, cfg.tol);
            row.verified = rep.verified_order;
            row.broke = rep.breaking_order.has_value();

            std::vector<std::pair<double, double>> pairs;
            for (double eps : eps_values) {
                try {
                    SupportEvaluator ev(h_orders, eps);
                    ResidualSamples res =
                        residual_function(st, ev, grid, rep.verified_order);
                    pairs.emplace_back(eps, res.max_abs);
                    if (row.residual_hi.empty()) row.residual_hi = res.values;
                } catch (const OracleError& e) {
                    throw OracleError("rotation " + std::to_string(rot.p()) + "/" +
                                      std::to_string(rot.q()) + ", epsilon=" +
                                      std::to_string(eps) + ": " + e.what());
                }
            }
            for (std::size_t j = 0; j < pairs.size(); ++j) {
                double slope = 0.0;
                if (j > 0)
                    slope = std::log(pairs[j].second / pairs[j - 1].second) /
                            std::log(pairs[j].first / pairs[j - 1].first);
                row.sweep.push_back({pairs[j].first, pairs[j].second, slope});
            }
            row.fit = scaling_fit(pairs);

            const double expected = row.verified + 1;
            if (row.fit.at_noise_floor)
                row.status = row.broke ? "FAIL" : "PASS (beyond measurable order)";
            else if (row.broke)
                row.status = (row.fit.slope >= expected - 0.1 && row.fit.slope <= expected + 0.2)
                                 ? "PASS"
                                 : "FAIL";
            else
                row.status = row.fit.slope >= expected - 0.1 ? "PASS" : "FAIL";
        });

        bool all_pass = true;
        std::ofstream csv(std::filesystem::path(out_dir) / "verify_summary.csv");
        csv << "q,p,verified_order,expected_slope,fitted_slope,r2,status\n";
        os << "  q   p  verified  expected  slope     status\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Row& row = rows[i];
            const RotationNumber& rot = cfg.rotations[i];
            all_pass = all_pass && row.status.rfind("PASS", 0) == 0;
            csv << rot.q() << "," << rot.p() << "," << row.verified << "," << row.verified + 1
                << "," << row.fit.slope << "," << row.fit.r2 << "," << row.status << "\n";
            os << std::setw(3) << rot.q() << " " << std::setw(3) << rot.p() << " "
               << std::setw(9) << row.verified << " " << std::setw(9) << row.verified + 1
               << " " << std::setw(9) << std::setprecision(4) << row.fit.slope << " "
               << row.status << "\n";
            std::ofstream sf(std::filesystem::path(out_dir) /
                             ("residual_" + rotation_tag(rot) + ".csv"));
            write_sweep_csv(sf, row.sweep);
            std::ofstream tf(std::filesystem::path(out_dir) /
                             ("residual_t_" + rotation_tag(rot) + ".csv"));
            write_residual_csv(tf, grid, row.residual_hi);
        }
        if (!all_pass)
            throw InternalError("residual scaling disagrees with the verified order");
        return 0;
    } catch (...) {
        return exit_code_for(std::current_exception(), os);
    }
}

int cmd_correct(const RunConfig& cfg, int target_order, const std::string& out_dir,
                std::ostream& os) {
    try {
        if (target_order < 1 || target_order > kHardMaxOrder)
            throw ConfigError("correction target order must lie in [1, " +
                              std::to_string(kHardMaxOrder) + "]");
        std::filesystem::create_directories(out_dir);
        const auto base = cfg.spec.expand(target_order);

        std::vector<std::vector<TrigPoly>> corrected(cfg.rotations.size());
        std::vector<int> fixes(cfg.rotations.size(), 0);
        parallel_for(cfg.rotations.size(), [&](std::size_t i) {
            std::vector<TrigPoly> h = base;
            for (int attempt = 0; attempt <= target_order; ++attempt) {
                ExpansionState st(cfg.rotations[i], h);
                PersistenceReport rep = run_analysis(st, target_order, cfg.tol);
                if (!rep.breaking_order) {
                    corrected[i] = std::move(h);
                    return;
                }
                const int k = *rep.breaking_order;
                h[k] += rep.correction[k];
                ++fixes[i];
            }
            throw InternalError("correction did not converge within " +
                                std::to_string(target_order) + " passes");
        });

        os << "  q   p  corrected_orders\n";
        for (std::size_t i = 0; i < cfg.rotations.size(); ++i) {
            const RotationNumber& rot = cfg.rotations[i];
            os << std::setw(3) << rot.q() << " " << std::setw(3) << rot.p() << " "
               << std::setw(17) << fixes[i] << "\n";
            nlohmann::ordered_json h_list = nlohmann::ordered_json::array();
            for (int k = 1; k <= target_order; ++k) {
                nlohmann::ordered_json arr = nlohmann::ordered_json::array();
                const TrigPoly hk = corrected[i][k].normalized(cfg.tol.zero);
                for (const auto& [l, v] : hk.coeffs())
                    arr.push_back({l, v.real(), v.imag()});
                h_list.push_back(std::move(arr));
            }
            nlohmann::ordered_json doc;
            doc["deformation"] = {{"fourier", {{"h", std::move(h_list)}}}};
            doc["rotation"] = {{"p", rot.p()}, {"q", rot.q()}};
            doc["max_order"] = target_order;
            std::ofstream jf(std::filesystem::path(out_dir) /
                             ("corrected_" + rotation_tag(rot) + ".json"));
            jf << doc.dump(2) << "\n";
        }
        return 0;
    } catch (...) {
        return exit_code_for(std::current_exception(), os);
    }
}

} // namespace caustica
