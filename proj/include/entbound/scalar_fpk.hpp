#pragma once

#include <vector>

#include "entbound/errors.hpp"

namespace entbound {

// Real polynomial, coefficients in ascending degree.
struct Poly {
    std::vector<double> c;

    Poly() = default;
    Poly(std::initializer_list<double> coeffs) : c(coeffs) {}
    explicit Poly(std::vector<double> coeffs) : c(std::move(coeffs)) {}

    double operator()(double x) const;
    Poly derivative() const;
    Poly operator*(const Poly& other) const;
    Poly operator+(const Poly& other) const;
    int degree() const;  // -1 for the zero polynomial
    double leading_coefficient() const;
    bool is_zero() const;
};

struct GridSpec {
    double lo = -8.0;
    double hi = 8.0;
    int points = 4096;
};

// 1-D diffusion dX = f(X) dt + g(X) dW with noise drift h in dW.
// Confinement: f and f + g h have odd leading degree with negative leading
// coefficient; g^2 stays positive on the grid.
struct ScalarDiffusionModel {
    Poly f;
    Poly g;
    Poly h;
    GridSpec grid;
};

// Throws NotElliptic / NotNormalizable when the model invariants fail.
void validate_model(const ScalarDiffusionModel& model);

struct DensityTable {
    std::vector<double> x;
    std::vector<double> p;
    std::vector<double> logp;  // includes the normalization
    double normalization = 0.0;
};

// Stationary density of dX = (f + extra)(X) dt + g(X) dW on the grid:
// p(x) proportional to exp(int 2 (f+extra)/D) / D(x), D = g^2, normalized by
// the trapezoid rule. In one dimension the divergence-free stationary flux
// with decay at infinity vanishes identically, which gives this closed form.
// With auto_expand the extent grows until the boundary density falls below
// boundary_frac of the peak.
DensityTable stationary_density(const Poly& f, const Poly& g, const Poly& extra, GridSpec grid,
                                bool auto_expand = true, double boundary_frac = 1e-12);

// Same construction with the additional drift supplied as samples on the
// grid (used by the saturating-drift round trip).
DensityTable stationary_density_sampled(const Poly& f, const Poly& g,
                                        const std::vector<double>& extra_values,
                                        const GridSpec& grid);

// Nominal (h = 0) and perturbed (extra = g h) densities on one shared grid,
// expanded until both tails are below boundary_frac of their peaks.
std::pair<DensityTable, DensityTable> density_pair(const ScalarDiffusionModel& model,
                                                   double boundary_frac = 1e-12);

// r_i = p_i / p*_i and psi_i = g(x_i) d/dx ln r, with 4th-order central
// differences in the interior and 2nd-order one-sided at the boundary.
std::pair<std::vector<double>, std::vector<double>> log_ratio_and_psi(
    const DensityTable& p, const DensityTable& p_star, const Poly& g);

struct EntropyChain {
    double E_psi2 = 0.0;
    double E_h2 = 0.0;
    double identity_residual = 0.0;  // E(h psi - psi^2/2)
    double fisher = 0.0;             // E |d ln r|^2
    double kl = 0.0;                 // E ln r
    double lambda = 0.0;             // min of D on the grid
    double mu = 0.0;                 // -max of (ln p*)'' on the grid
    double K = 0.0;                  // 1/(lambda mu) when mu > 0
    bool mu_positive = false;        // log-concavity gate for the (bDbF) link
};

// Moments of the identity and Dirichlet bound: E|psi|^2, E|h|^2 and the
// identity residual, p-weighted trapezoid integrals.
EntropyChain dirichlet_check(const ScalarDiffusionModel& model);

// Full chain including Fisher and KL entropies and the ellipticity /
// log-concavity constants. The (bDbF) link is skipped (mu_positive = false)
// when ln p* is not strongly concave on the grid.
EntropyChain fisher_kl_check(const ScalarDiffusionModel& model);

// Noise drift values h = g (ln r)'/2 on the grid such that the perturbed
// stationary density equals target_r * p_star (after renormalizing the
// ratio against p_star). Attains equality in the Dirichlet bound.
std::vector<double> saturating_drift_1d(const ScalarDiffusionModel& nominal,
                                        const std::vector<double>& target_r);

// Moments for a noise drift given by samples on the grid.
EntropyChain entropy_moments(const DensityTable& p, const DensityTable& p_star, const Poly& g,
                             const std::vector<double>& h_values);

}  // namespace entbound
