#pragma once

#include <utility>
#include <vector>

#include "entbound/cgf_bounds.hpp"
#include "entbound/matrix.hpp"
#include "entbound/numkit.hpp"

namespace entbound {

// Linear SDE dX = A X dt + B dW with noise drift dW = N X dt + dV.
// A Hurwitz, A + BN Hurwitz, (A, B) controllable; D = B B^T.
struct LinearGaussianSystem {
    Matrix A;
    Matrix B;
    Matrix N;
    Matrix D;
    int n = 0;
    int m = 0;
};

// Validates the system invariants and fills in D.
LinearGaussianSystem build_system(const Matrix& A, const Matrix& B, const Matrix& N);

// SPD P* with A P* + P* A^T + D = 0.
Matrix nominal_covariance(const LinearGaussianSystem& sys);

// SPD P with (A + BN) P + P (A + BN)^T + D = 0.
Matrix perturbed_covariance(const LinearGaussianSystem& sys);

// Precision matrix difference Pi = P*^{-1} - P^{-1}.
Matrix precision_gap(const LinearGaussianSystem& sys);
Matrix precision_gap(const Matrix& p_star, const Matrix& p);

// (1/2)(Tr chi - ln det chi - n) with chi = P*^{-1} P, in nats.
double exact_kl(const LinearGaussianSystem& sys);
double exact_kl(const Matrix& p_star, const Matrix& p);

// <BN - D Pi / 2, Pi P>_F; vanishes identically for valid systems.
double dirichlet_identity_residual(const LinearGaussianSystem& sys);
double dirichlet_identity_residual(const Matrix& B, const Matrix& N, const Matrix& D,
                                   const Matrix& Pi, const Matrix& P);

// (lhs, rhs) = (||sqrt(D) Pi sqrt(P)||_F, 2 ||N sqrt(P)||_F); lhs <= rhs.
std::pair<double, double> dirichlet_bound_slack(const LinearGaussianSystem& sys);
std::pair<double, double> dirichlet_bound_slack(const Matrix& N, const Matrix& D,
                                                const Matrix& Pi, const Matrix& P);

struct EllipticityConstants {
    double lambda = 0.0;  // smallest eigenvalue of D
    double mu = 0.0;      // 1 / largest eigenvalue of P*
    double K = 0.0;       // 1 / (lambda mu), units of time
};

EllipticityConstants ellipticity_constants(const LinearGaussianSystem& sys);

// -n / (2 Tr A); K always dominates this value.
double k_lower_bound(const LinearGaussianSystem& sys);

struct FluxData {
    Matrix H;              // A + D P*^{-1} / 2
    Matrix mho;            // A P* + D / 2, antisymmetric by the nominal ALE
    double flux_residual;  // ||H P + P H^T||_F
};

FluxData hamiltonian_flux(const LinearGaussianSystem& sys);

// Noise drift N = B^T (P*^{-1} - target_P^{-1}) / 2 that moves the invariant
// covariance to target_P exactly. Requires the reversible structure H = 0
// and an invertible square B.
Matrix saturating_drift(const Matrix& A, const Matrix& B, const Matrix& target_P);

// CGF of |N x|^2 under the nominal Gaussian invariant measure:
// psi(theta) = -(1/2) sum_i ln(1 - 2 theta s_i) with s the eigenvalues of
// N P* N^T. theta_star = 1/(2 s_max), +infinity when N = 0 (degenerate).
class GaussianCgf final : public CgfModel {
public:
    GaussianCgf() = default;
    explicit GaussianCgf(std::vector<double> s_eigenvalues);

    double psi(double theta) const override;
    double psi_prime(double theta) const override;
    double psi_second(double theta) const override;
    double theta_star() const override { return theta_star_; }
    bool degenerate() const override { return degenerate_; }

    // eigenvalues of N P* N^T, nonincreasing
    const std::vector<double>& s() const { return s_; }

private:
    std::vector<double> s_;
    double theta_star_ = 0.0;
    bool degenerate_ = true;
};

GaussianCgf gaussian_cgf(const LinearGaussianSystem& sys);

// ||N F||_inf with F(s) = (sI - A)^{-1} B; below 1 the noise-drift
// representation of the relative entropy rate is admissible at stationarity.
double nf_hinf(const LinearGaussianSystem& sys, double rel_tol = 1e-4);

// Quadratic-exponential growth rate
// -(1/4 pi) \int ln det(I - N Sigma(w) N^T) dw, Sigma = F(iw) F(iw)^*.
double qef_rate(const LinearGaussianSystem& sys, double quad_tol = 1e-6);

// Full per-system report.
struct GaussianAnalysis {
    Matrix P_star;
    Matrix P;
    Matrix Pi;
    double lambda = 0.0;
    double mu = 0.0;
    double K = 0.0;
    double K_lower = 0.0;
    double kl_exact = 0.0;
    double identity_residual = 0.0;
    double bound_lhs = 0.0;
    double bound_rhs = 0.0;
    Matrix H;
    Matrix mho;
    double flux_residual = 0.0;
    double nf_hinf = 0.0;
    double theta_star = 0.0;  // +infinity when N = 0
};

GaussianAnalysis analyze(const LinearGaussianSystem& sys, double hinf_rel_tol = 1e-4);

}  // namespace entbound
