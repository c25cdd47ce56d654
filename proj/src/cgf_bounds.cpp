#include "entbound/cgf_bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "entbound/numkit.hpp"

namespace entbound {
namespace {

void require_in_domain(const CgfModel& model, double theta, const char* who) {
    if (!(theta >= 0.0) || theta >= model.theta_star())
        throw OutOfDomain(std::string(who) + ": theta outside [0, theta_star)");
}

}  // namespace

double nu(const CgfModel& model, double theta) {
    require_in_domain(model, theta, "nu");
    return theta * model.psi_prime(theta) - model.psi(theta);
}

double nu_k(const CgfModel& model, double K, double theta) {
    require_in_domain(model, theta, "nu_k");
    return (theta - 2.0 * K) * model.psi_prime(theta) - model.psi(theta);
}

double solve_theta_k(const CgfModel& model, double K) {
    if (model.degenerate()) throw Degenerate("solve_theta_k: psi is identically zero");
    if (!(K > 0.0)) throw OutOfDomain("solve_theta_k: K must be positive");
    const double ts = model.theta_star();
    if (std::isfinite(ts) && K >= 0.5 * ts)
        throw KTooLarge("solve_theta_k: K >= theta_star/2, bound unavailable");

    const auto f = [&](double th) { return nu_k(model, K, th); };
    const double lo = 2.0 * K * (1.0 + 1e-12);
    double hi;
    if (std::isfinite(ts)) {
        hi = ts - 1e-9 * (ts - 2.0 * K);
        // psi diverges at theta_star, so nu_K changes sign before hi; back
        // off geometrically if the evaluation overflows there.
        while (!std::isfinite(f(hi)) && hi > lo) hi = lo + 0.5 * (hi - lo);
    } else {
        hi = 4.0 * K;
        int growth = 0;
        while (f(hi) <= 0.0) {
            hi *= 2.0;
            if (++growth > 200)
                throw NoConvergence("solve_theta_k: no sign change found for unbounded theta_star");
        }
    }
    if (!(f(hi) > 0.0))
        throw NoConvergence("solve_theta_k: nu_K has no sign change in the bracket");
    const double theta = find_root_increasing(f, lo, hi, 0.0);
    return theta;
}

BoundReport kl_upper_bound(const CgfModel& model, double K) {
    BoundReport report;
    report.K = K;
    if (model.degenerate()) {
        // nu == 0: the bound collapses to zero without running the solver
        report.degenerate = true;
        report.theta_K = 0.0;
        report.kl_bound = 0.0;
        report.kl_bound_asymptotic = 0.0;
        report.l1_bound = 0.0;
        return report;
    }
    report.theta_K = solve_theta_k(model, K);
    report.kl_bound = nu(model, report.theta_K);
    report.kl_bound_asymptotic = asymptotic_bound(model, K);
    report.l1_bound = pinsker_l1(report.kl_bound);
    report.l1_trivial = report.l1_bound > 2.0;
    return report;
}

double asymptotic_bound(const CgfModel& model, double K) {
    const double p1 = model.psi_prime(0.0);
    const double p2 = model.psi_second(0.0);
    if (model.degenerate() || !(p1 > 0.0) || !(p2 > 0.0))
        throw Degenerate("asymptotic_bound: psi'(0) and psi''(0) must be positive");
    return 2.0 * p1 * K + 4.0 * std::sqrt(p1 * p2) * std::pow(K, 1.5);
}

double stealthy_bound(double K, double gamma) {
    if (gamma < 0.0) throw NegativeInput("stealthy_bound: gamma must be nonnegative");
    return 4.0 * K * gamma;
}

double pinsker_l1(double kl) {
    if (kl < 0.0) throw NegativeInput("pinsker_l1: relative entropy must be nonnegative");
    return std::sqrt(2.0 * kl);
}

std::vector<CurvePoint> small_gain_curve(const CgfModel& model,
                                         const std::vector<double>& theta_grid) {
    std::vector<CurvePoint> out;
    out.reserve(theta_grid.size());
    for (double th : theta_grid) {
        CurvePoint p;
        p.theta = th;
        p.eps_coord = nu(model, th);
        const double pp = model.psi_prime(th);
        p.K_coord = (pp > 0.0) ? p.eps_coord / (2.0 * pp) : 0.0;
        out.push_back(p);
    }
    return out;
}

std::vector<double> default_theta_grid(const CgfModel& model, int points) {
    const double ts = model.theta_star();
    if (!std::isfinite(ts))
        throw OutOfDomain("default_theta_grid: theta_star must be finite");
    const double top = ts * (1.0 - 1e-6);
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double u = static_cast<double>(i) / (points - 1);
        grid.push_back(top * std::sin(0.5 * std::numbers::pi * u));
    }
    return grid;
}

double phi_of_eps(const CgfModel& model, double eps) {
    if (eps < 0.0) throw NegativeInput("phi_of_eps: eps must be nonnegative");
    if (eps == 0.0) return model.psi_prime(0.0);
    if (model.degenerate())
        throw Degenerate("phi_of_eps: psi is identically zero");
    const double ts = model.theta_star();
    double hi;
    if (std::isfinite(ts)) {
        hi = ts * (1.0 - 1e-9);
        double nu_hi = nu(model, hi);
        while (!std::isfinite(nu_hi)) {
            hi *= (1.0 - 1e-6);
            nu_hi = nu(model, hi);
        }
        if (eps >= nu_hi)
            throw EpsBeyondRange("phi_of_eps: eps at or beyond the supremum of nu", nu_hi);
    } else {
        hi = 1.0;
        int growth = 0;
        while (nu(model, hi) < eps) {
            hi *= 2.0;
            if (++growth > 200)
                throw EpsBeyondRange("phi_of_eps: nu never reaches eps", nu(model, hi / 2.0));
        }
    }
    const auto f = [&](double th) { return nu(model, th) - eps; };
    const double theta = find_root_increasing(f, 0.0, hi, 1e-10);
    return model.psi_prime(theta);
}

}  // namespace entbound
