#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "caustica/runner.hpp"

namespace {

void apply_overrides(caustica::RunConfig& cfg, int max_order, const std::string& eps_sweep,
                     bool p1_only) {
    if (max_order > 0) cfg.max_order = max_order;
    if (!eps_sweep.empty()) {
        double lo = 0.0, hi = 0.0;
        int n = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(eps_sweep);
        if (!(ss >> lo >> c1 >> hi >> c2 >> n) || c1 != ',' || c2 != ',' || lo <= 0.0 ||
            hi <= lo || n < 2)
            throw caustica::ConfigError("--eps-sweep expects lo,hi,n with 0 < lo < hi");
        cfg.oracle.eps_lo = lo;
        cfg.oracle.eps_hi = hi;
        cfg.oracle.eps_count = n;
    }
    if (p1_only) {
        std::vector<caustica::RotationNumber> keep;
        for (const auto& rot : cfg.rotations)
            if (rot.p() == 1) keep.push_back(rot);
        if (keep.empty())
            throw caustica::ConfigError("--p1-only leaves no rotations to analyze");
        cfg.rotations = std::move(keep);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"persistence analysis of resonant caustics in deformed circular billiards"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", eps_sweep;
    int max_order = -1;
    bool p1_only = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config JSON document")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--max-order", max_order, "override the analysis order cap");
        cmd->add_option("--eps-sweep", eps_sweep, "epsilon sweep lo,hi,n for the oracle");
        cmd->add_flag("--p1-only", p1_only, "restrict rotation grids to p = 1");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "persistence orders and obstructions");
    CLI::App* verify = app.add_subcommand("verify", "residual scaling against the billiard map");
    CLI::App* correct = app.add_subcommand("correct", "emit a corrected deformation");
    add_common(analyze);
    add_common(verify);
    add_common(correct);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        caustica::RunConfig cfg = caustica::load_run_config_file(config_path);
        apply_overrides(cfg, max_order, eps_sweep, p1_only);
        if (analyze->parsed()) return caustica::cmd_analyze(cfg, out_dir, std::cout);
        if (verify->parsed()) return caustica::cmd_verify(cfg, out_dir, std::cout);
        return caustica::cmd_correct(cfg, cfg.max_order, out_dir, std::cout);
    } catch (const caustica::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const caustica::OracleError& e) {
        std::cerr << "oracle failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
