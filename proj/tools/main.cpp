// entbound: entropy bounds for invariant-measure perturbations of SDEs
// driven by noise with an uncertain state-dependent drift.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "entbound/config.hpp"
#include "entbound/paper_example.hpp"
#include "entbound/report.hpp"

namespace {

using entbound::ReportOutcome;

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw entbound::ParseError("cannot open output file '" + out_path + "'");
    out << text;
}

int emit_report(const ReportOutcome& report, const std::string& out_path) {
    write_output(report.doc.dump(2), out_path);
    return report.exit_code;
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy bounds for invariant-measure perturbations in stochastic systems"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    long seed = -1;
    int trajectories = -1;
    long steps = -1;
    int curve_points = 256;
    double tol = -1.0;
    bool as_json = false;

    auto* analyze = app.add_subcommand("analyze", "full analysis report for a config");
    analyze->add_option("config", config_path)->required();
    analyze->add_option("--out", out_path, "write the JSON report to this path");

    auto* curve = app.add_subcommand("curve", "small-gain curve CSV for a linear config");
    curve->add_option("config", config_path)->required();
    curve->add_option("--points", curve_points, "grid size (default 256)");
    curve->add_option("--out", out_path, "write the CSV to this path");

    auto* simulate = app.add_subcommand("simulate", "analysis plus Monte Carlo cross-check");
    simulate->add_option("config", config_path)->required();
    simulate->add_option("--seed", seed, "override the simulation seed");
    simulate->add_option("--trajectories", trajectories, "override the trajectory count");
    simulate->add_option("--steps", steps, "override the per-trajectory sample steps");
    simulate->add_option("--out", out_path, "write the JSON report to this path");

    auto* paper = app.add_subcommand("paper-example",
                                     "reproduce the built-in 4-D Langevin benchmark");
    paper->add_flag("--json", as_json, "machine-readable report");
    paper->add_option("--tol", tol, "override every quantity tolerance");
    paper->add_option("--out", out_path, "write the report to this path");

    auto* fpk = app.add_subcommand("fpk1d", "1-D stationary density tables and entropy chain");
    fpk->add_option("config", config_path)->required();
    fpk->add_option("--out", out_path, "write the density CSV to this path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            return emit_report(entbound::analyze_report(entbound::load_config(config_path)),
                               out_path);
        }
        if (curve->parsed()) {
            const std::string csv =
                entbound::curve_csv(entbound::load_config(config_path), curve_points);
            write_output(csv, out_path);
            return 0;
        }
        if (simulate->parsed()) {
            return emit_report(
                entbound::simulate_report(entbound::load_config(config_path), seed,
                                          trajectories, steps),
                out_path);
        }
        if (fpk->parsed()) {
            const entbound::SystemConfig cfg = entbound::load_config(config_path);
            const ReportOutcome report = entbound::fpk1d_report(cfg);
            if (report.exit_code == 0 && !out_path.empty())
                write_output(entbound::fpk1d_csv(cfg), out_path);
            std::cout << report.doc.dump(2) << '\n';
            return report.exit_code;
        }
        if (paper->parsed()) {
            const entbound::BenchmarkReport report = entbound::run_benchmark(tol);
            if (as_json) {
                nlohmann::json doc;
                doc["tool_version"] = entbound::kToolVersion;
                doc["all_pass"] = report.all_pass;
                doc["theta_K"] = report.theta_K;
                nlohmann::json checks = nlohmann::json::array();
                for (const auto& c : report.checks)
                    checks.push_back({{"name", c.name},
                                      {"computed", c.computed},
                                      {"expected", c.expected},
                                      {"tolerance", c.tolerance},
                                      {"pass", c.pass}});
                doc["checks"] = std::move(checks);
                write_output(doc.dump(2), out_path);
            } else {
                std::string text;
                for (const auto& c : report.checks) {
                    text += c.name + ": computed " + fmt6(c.computed) + ", expected " +
                            fmt6(c.expected) + " +/- " + fmt6(c.tolerance) + "  " +
                            (c.pass ? "PASS" : "FAIL") + "\n";
                }
                write_output(text, out_path);
            }
            return report.all_pass ? 0 : 1;
        }
    } catch (const entbound::Unstable& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const entbound::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
