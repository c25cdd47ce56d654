#pragma once

#include <optional>
#include <string>

#include "entbound/lingauss.hpp"
#include "entbound/scalar_fpk.hpp"
#include "entbound/sde_sim.hpp"

namespace entbound {

// Tolerance knobs surfaced in config files; defaults match the library.
struct Tolerances {
    double hinf_rel = 1e-4;
    double quad_abs = 1e-6;
    double identity_rel = 1e-8;
    double bound_slack = 1e-8;
    double fpk_identity_rel = 1e-5;
    double fpk_bound_abs = 1e-6;
    double density_boundary = 1e-12;
    double reversible = 1e-9;
};

enum class SystemKind { Linear, Scalar };

// Parsed single-document JSON config. Linear configs carry matrices A/B/N;
// scalar configs carry polynomial coefficients f/g/h, a grid record, and an
// optional target_log_r polynomial for saturating-drift runs.
struct SystemConfig {
    SystemKind kind = SystemKind::Linear;

    Matrix A, B, N;

    Poly f, g, h;
    GridSpec grid;
    std::optional<Poly> target_log_r;

    std::optional<SimConfig> sim;
    std::optional<double> gamma;  // stealthiness threshold on the entropy rate
    Tolerances tolerances;
};

// Throws ParseError with the offending key in the message.
SystemConfig parse_config(const std::string& json_text);
SystemConfig load_config(const std::string& path);

// Round-trip serialization (parse -> serialize -> parse is stable).
std::string serialize_config(const SystemConfig& cfg);

}  // namespace entbound
