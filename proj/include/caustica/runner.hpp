#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "caustica/deformations.hpp"
#include "caustica/persistence.hpp"
#include "caustica/rotation.hpp"

namespace caustica {

struct OracleSettings {
    double eps_lo = 1e-5;
    double eps_hi = 1e-2;
    int eps_count = 7;
    int grid = 256;
};

struct RunConfig {
    DeformationSpec spec = DeformationSpec::fourier({});
    std::vector<RotationNumber> rotations;
    int max_order = kDefaultMaxOrder;
    Tolerances tol;
    OracleSettings oracle;
};

// Parses and validates a config document:
//   {"deformation": {...}, "rotation": {"p":..,"q":..} | {"q_range":[a,b]},
//    "max_order": int, "tolerances": {...}, "oracle": {...}}
// Unknown keys are rejected. A q_range expands to every reduced p/q < 1/2.
RunConfig load_run_config(const std::string& json_text);
RunConfig load_run_config_file(const std::string& path);

// Worker count for the rotation pool: CAUSTICA_THREADS caps it.
int worker_count(std::size_t jobs);

// Exit codes: 0 ok, 2 config error, 3 internal inconsistency, 4 oracle failure.
int cmd_analyze(const RunConfig& cfg, const std::string& out_dir, std::ostream& os);
int cmd_verify(const RunConfig& cfg, const std::string& out_dir, std::ostream& os);
int cmd_correct(const RunConfig& cfg, int target_order, const std::string& out_dir,
                std::ostream& os);

} // namespace caustica
