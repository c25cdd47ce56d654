#pragma once

#include <optional>
#include <vector>

#include "entbound/errors.hpp"

namespace entbound {

// Cumulant-generating function of the squared noise drift under the nominal
// invariant measure. psi(0) = 0; psi is strictly increasing and strictly
// convex on [0, theta_star) unless the model is degenerate (psi == 0).
// theta_star may be +infinity; consumers must branch on it.
class CgfModel {
public:
    virtual ~CgfModel() = default;
    virtual double psi(double theta) const = 0;
    virtual double psi_prime(double theta) const = 0;
    virtual double psi_second(double theta) const = 0;
    virtual double theta_star() const = 0;
    virtual bool degenerate() const { return false; }
};

struct BoundReport {
    double K = 0.0;
    double theta_K = 0.0;
    double kl_bound = 0.0;
    double kl_bound_asymptotic = 0.0;
    double l1_bound = 0.0;
    std::optional<double> gamma;
    std::optional<double> stealthy_bound;
    bool degenerate = false;
    // Pinsker gives at most sqrt(2 kl); above 2 it says nothing new about
    // the L1 distance.
    bool l1_trivial = false;
};

struct CurvePoint {
    double theta = 0.0;
    double K_coord = 0.0;
    double eps_coord = 0.0;
};

// Bregman divergence nu(theta) = theta psi'(theta) - psi(theta).
double nu(const CgfModel& model, double theta);

// nu_K(theta) = (theta - 2K) psi'(theta) - psi(theta); negative at 2K,
// strictly increasing on (2K, theta_star).
double nu_k(const CgfModel& model, double K, double theta);

// Unique root of nu_K in (2K, theta_star); requires K < theta_star/2.
double solve_theta_k(const CgfModel& model, double K);

// Relative entropy upper bound nu(theta_K) = 2K psi'(theta_K), with the
// two-term small-K asymptote and Pinsker L1 bound filled in.
BoundReport kl_upper_bound(const CgfModel& model, double K);

// 2 psi'(0) K + 4 sqrt(psi'(0) psi''(0)) K^{3/2}
double asymptotic_bound(const CgfModel& model, double K);

// 4 K gamma, for gamma-stealthy drifts.
double stealthy_bound(double K, double gamma);

// sqrt(2 kl); values above 2 carry no information (total variation <= 2).
double pinsker_l1(double kl);

std::vector<CurvePoint> small_gain_curve(const CgfModel& model,
                                         const std::vector<double>& theta_grid);

// Default grid for curve emission: cosine-spaced toward theta_star where
// nu steepens.
std::vector<double> default_theta_grid(const CgfModel& model, int points = 256);

// Phi(eps) = psi'(nu^{-1}(eps)); Phi(0) = psi'(0) by continuity.
double phi_of_eps(const CgfModel& model, double eps);

}  // namespace entbound
