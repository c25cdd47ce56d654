#include "entbound/paper_example.hpp"

#include <cmath>

#include "entbound/cgf_bounds.hpp"

namespace entbound {

LangevinBenchmark langevin_benchmark() {
    LangevinBenchmark b;
    b.tau = 0.3463;
    b.R = Matrix{{1.7833, 0.5123, -0.1783, 0.1760},
                 {0.5123, 5.2275, -3.4186, -1.7825},
                 {-0.1783, -3.4186, 4.3321, 0.2209},
                 {0.1760, -1.7825, 0.2209, 1.4656}};
    b.N = Matrix{{-0.0291, 0.0520, -0.0007, -0.0424},
                 {-0.0807, 0.0783, 0.0474, -0.0066},
                 {0.0570, -0.0590, 0.0574, 0.0137},
                 {0.0091, 0.0333, 0.0425, 0.1638}};
    b.P_reference = Matrix{{0.3949, -0.5799, -0.3971, -0.7857},
                           {-0.5799, 1.6852, 1.1883, 2.1990},
                           {-0.3971, 1.1883, 0.9194, 1.5359},
                           {-0.7857, 2.1990, 1.5359, 3.1403}};
    return b;
}

LinearGaussianSystem benchmark_system() {
    const LangevinBenchmark b = langevin_benchmark();
    const double sigma = std::sqrt(2.0 * b.tau);
    return build_system(-b.R, sigma * Matrix::identity(4), b.N);
}

BenchmarkReport run_benchmark(double tol_override) {
    const LangevinBenchmark b = langevin_benchmark();
    const LinearGaussianSystem sys = benchmark_system();

    BenchmarkReport report;
    report.analysis = analyze(sys);
    const GaussianAnalysis& a = report.analysis;
    const GaussianCgf cgf = gaussian_cgf(sys);
    const BoundReport bound = kl_upper_bound(cgf, a.K);
    report.theta_K = bound.theta_K;

    const auto tol = [&](double def) { return tol_override > 0.0 ? tol_override : def; };
    const auto add = [&](const std::string& name, double computed, double expected, double t) {
        QuantityCheck c{name, computed, expected, t, std::abs(computed - expected) <= t};
        report.checks.push_back(c);
    };

    add("lambda_min_R", lambda_min(b.R), 0.1779, tol(1e-3));
    add("K", a.K, 2.8099, tol(1e-2));
    add("theta_star", a.theta_star, 9.1946, tol(1e-3));
    add("nf_hinf", a.nf_hinf, 0.7807, tol(1e-3));
    add("kl_exact", a.kl_exact, 0.4544, tol(1e-3));
    add("kl_bound", bound.kl_bound, 2.4894, tol(1e-3));
    add("P_entrywise", max_abs_diff(a.P, b.P_reference), 0.0, tol(1e-3));

    report.all_pass = true;
    for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
    return report;
}

}  // namespace entbound
