#pragma once

#include <string>

#include <json.hpp>

#include "entbound/config.hpp"

namespace entbound {

inline constexpr const char* kToolVersion = "0.1.0";

struct ReportOutcome {
    nlohmann::json doc;
    // 0 success, 1 invalid input/system, 2 runtime instability
    int exit_code = 0;
};

// Full analysis report for a parsed config: gates, analysis block, bound
// block, inequality checks, provenance. Soft gate failures (ellipticity,
// ||NF||_inf >= 1, K >= theta_star/2) keep exit code 0; an invalid system
// exits 1.
ReportOutcome analyze_report(const SystemConfig& cfg);

// Analysis report extended with the Monte Carlo section; override_* replace
// the config sim record when nonnegative.
ReportOutcome simulate_report(const SystemConfig& cfg, long override_seed = -1,
                              int override_trajectories = -1, long override_steps = -1);

// Scalar chain report (JSON part of cmd_fpk1d).
ReportOutcome fpk1d_report(const SystemConfig& cfg);

// Curve CSV: columns theta,K,eps,eps_asymptotic,flag with the marker row
// pinned at theta_K. Throws on scalar configs.
std::string curve_csv(const SystemConfig& cfg, int points);

// Density/psi CSV for scalar configs: x,p_star,p,r,psi.
std::string fpk1d_csv(const SystemConfig& cfg);

}  // namespace entbound
