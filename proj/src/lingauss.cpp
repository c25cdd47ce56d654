#include "entbound/lingauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entbound {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

LinearGaussianSystem build_system(const Matrix& A, const Matrix& B, const Matrix& N) {
    if (!A.is_square()) throw DimensionMismatch("build_system: A must be square");
    const int n = A.rows();
    if (B.rows() != n) throw DimensionMismatch("build_system: B must have n rows");
    const int m = B.cols();
    if (N.rows() != m || N.cols() != n)
        throw DimensionMismatch("build_system: N must be m x n");
    A.ensure_finite("A");
    B.ensure_finite("B");
    N.ensure_finite("N");
    if (!is_hurwitz(A))
        throw NotHurwitzNominal("build_system: A is not Hurwitz");
    if (!is_hurwitz(A + B * N))
        throw NotHurwitzPerturbed("build_system: A + BN is not Hurwitz");
    if (!is_controllable(A, B))
        throw NotControllable("build_system: (A, B) is not controllable");
    LinearGaussianSystem sys;
    sys.A = A;
    sys.B = B;
    sys.N = N;
    sys.D = B * B.transpose();
    sys.n = n;
    sys.m = m;
    return sys;
}

Matrix nominal_covariance(const LinearGaussianSystem& sys) {
    return solve_lyapunov(sys.A, sys.D);
}

Matrix perturbed_covariance(const LinearGaussianSystem& sys) {
    return solve_lyapunov(sys.A + sys.B * sys.N, sys.D);
}

Matrix precision_gap(const Matrix& p_star, const Matrix& p) {
    return spd_inverse(p_star) - spd_inverse(p);
}

Matrix precision_gap(const LinearGaussianSystem& sys) {
    return precision_gap(nominal_covariance(sys), perturbed_covariance(sys));
}

double exact_kl(const Matrix& p_star, const Matrix& p) {
    const int n = p.rows();
    const double tr_chi = frobenius_inner(spd_inverse(p_star), p);
    const double logdet_chi = logdet_spd(p) - logdet_spd(p_star);
    return 0.5 * (tr_chi - logdet_chi - static_cast<double>(n));
}

double exact_kl(const LinearGaussianSystem& sys) {
    return exact_kl(nominal_covariance(sys), perturbed_covariance(sys));
}

double dirichlet_identity_residual(const Matrix& B, const Matrix& N, const Matrix& D,
                                   const Matrix& Pi, const Matrix& P) {
    return frobenius_inner(B * N - 0.5 * (D * Pi), Pi * P);
}

double dirichlet_identity_residual(const LinearGaussianSystem& sys) {
    const Matrix p_star = nominal_covariance(sys);
    const Matrix p = perturbed_covariance(sys);
    return dirichlet_identity_residual(sys.B, sys.N, sys.D, precision_gap(p_star, p), p);
}

std::pair<double, double> dirichlet_bound_slack(const Matrix& N, const Matrix& D,
                                                const Matrix& Pi, const Matrix& P) {
    const Matrix sqrt_d = sqrt_spd(D);
    const Matrix sqrt_p = sqrt_spd(P);
    const double lhs = (sqrt_d * Pi * sqrt_p).frobenius_norm();
    const double rhs = 2.0 * (N * sqrt_p).frobenius_norm();
    return {lhs, rhs};
}

std::pair<double, double> dirichlet_bound_slack(const LinearGaussianSystem& sys) {
    const Matrix p_star = nominal_covariance(sys);
    const Matrix p = perturbed_covariance(sys);
    return dirichlet_bound_slack(sys.N, sys.D, precision_gap(p_star, p), p);
}

EllipticityConstants ellipticity_constants(const LinearGaussianSystem& sys) {
    EllipticityConstants out;
    out.lambda = lambda_min(sys.D);
    if (!(out.lambda > 0.0))
        throw NotElliptic("ellipticity_constants: D = BB^T is not positive definite");
    const Matrix p_star = nominal_covariance(sys);
    out.mu = 1.0 / lambda_max(p_star);
    out.K = 1.0 / (out.lambda * out.mu);
    return out;
}

double k_lower_bound(const LinearGaussianSystem& sys) {
    return -static_cast<double>(sys.n) / (2.0 * sys.A.trace());
}

FluxData hamiltonian_flux(const LinearGaussianSystem& sys) {
    const Matrix p_star = nominal_covariance(sys);
    const Matrix p = perturbed_covariance(sys);
    FluxData out;
    out.H = sys.A + 0.5 * (sys.D * spd_inverse(p_star));
    out.mho = sys.A * p_star + 0.5 * sys.D;
    out.flux_residual = (out.H * p + p * out.H.transpose()).frobenius_norm();
    return out;
}

Matrix saturating_drift(const Matrix& A, const Matrix& B, const Matrix& target_P) {
    if (!B.is_square())
        throw NotInvertibleB("saturating_drift: B must be square and invertible");
    const Matrix D = B * B.transpose();
    const Matrix p_star = solve_lyapunov(A, D);
    const Matrix H = A + 0.5 * (D * spd_inverse(p_star));
    // the reversible structure is exactly H = 0; the flux H P + P H^T of the
    // nominal system vanishes identically and cannot serve as the gate
    if (H.frobenius_norm() > 1e-9 * (1.0 + A.frobenius_norm()))
        throw NotReversible("saturating_drift: nominal system is not reversible (H != 0)");
    try {
        (void)lu_solve(B, Matrix::identity(B.rows()));
    } catch (const SingularSystem&) {
        throw NotInvertibleB("saturating_drift: B is singular");
    }
    const Matrix target_inv = spd_inverse(target_P);  // NotSPD if target invalid
    return 0.5 * (B.transpose() * (spd_inverse(p_star) - target_inv));
}

GaussianCgf::GaussianCgf(std::vector<double> s_eigenvalues) : s_(std::move(s_eigenvalues)) {
    for (double& v : s_) v = std::max(v, 0.0);
    std::sort(s_.rbegin(), s_.rend());
    const double s_max = s_.empty() ? 0.0 : s_.front();
    // N P* N^T is PSD; an all-but-vanishing spectrum means N = 0 in practice
    degenerate_ = !(s_max > 1e-300);
    theta_star_ = degenerate_ ? kInf : 1.0 / (2.0 * s_max);
}

double GaussianCgf::psi(double theta) const {
    double acc = 0.0;
    for (double si : s_) acc += std::log1p(-2.0 * theta * si);
    return -0.5 * acc;
}

double GaussianCgf::psi_prime(double theta) const {
    double acc = 0.0;
    for (double si : s_) acc += si / (1.0 - 2.0 * theta * si);
    return acc;
}

double GaussianCgf::psi_second(double theta) const {
    double acc = 0.0;
    for (double si : s_) {
        const double d = 1.0 - 2.0 * theta * si;
        acc += 2.0 * si * si / (d * d);
    }
    return acc;
}

GaussianCgf gaussian_cgf(const LinearGaussianSystem& sys) {
    const Matrix p_star = nominal_covariance(sys);
    const Matrix npn = sys.N * p_star * sys.N.transpose();
    return GaussianCgf(sym_eig(npn).values);
}

double nf_hinf(const LinearGaussianSystem& sys, double rel_tol) {
    return hinf_norm(sys.A, sys.B, sys.N, rel_tol);
}

double qef_rate(const LinearGaussianSystem& sys, double quad_tol) {
    if (sys.N.max_abs() == 0.0) return 0.0;
    const double gain = nf_hinf(sys);
    if (gain >= 1.0)
        throw NotContractive("qef_rate: ||NF||_inf >= 1, the spectral integrand is singular");
    const auto integrand = [&](double omega) {
        // eigenvalues of the Hermitian matrix N Sigma(w) N^T = (NF)(NF)^*,
        // summed through log1p so the far tail keeps full precision
        const int n = sys.n;
        const int m = sys.m;
        Matrix big(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                big(i, j) = -sys.A(i, j);
                big(n + i, n + j) = -sys.A(i, j);
            }
            big(i, n + i) = -omega;
            big(n + i, i) = omega;
        }
        Matrix rhs(2 * n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) rhs(i, j) = sys.B(i, j);
        const Matrix sol = lu_solve(big, rhs);
        Matrix x(n, m), y(n, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) {
                x(i, j) = sol(i, j);
                y(i, j) = sol(n + i, j);
            }
        const Matrix u = sys.N * x;
        const Matrix v = sys.N * y;
        const Matrix s = u * u.transpose() + v * v.transpose();
        const Matrix w = v * u.transpose() - u * v.transpose();
        Matrix e(2 * m, 2 * m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                e(i, j) = s(i, j);
                e(m + i, m + j) = s(i, j);
                e(i, m + j) = -w(i, j);
                e(m + i, j) = w(i, j);
            }
        const SymEig eig = sym_eig(e);
        // realified spectrum repeats each eigenvalue twice; halve the sum
        double acc = 0.0;
        for (double ev : eig.values) acc += std::log1p(-std::min(ev, 1.0 - 1e-14));
        return -0.5 * acc;
    };
    const double integral = integrate_adaptive(integrand, -kInf, kInf, quad_tol);
    return integral / (4.0 * std::numbers::pi);
}

GaussianAnalysis analyze(const LinearGaussianSystem& sys, double hinf_rel_tol) {
    GaussianAnalysis a;
    a.P_star = nominal_covariance(sys);
    a.P = perturbed_covariance(sys);
    a.Pi = precision_gap(a.P_star, a.P);
    const EllipticityConstants ell = ellipticity_constants(sys);
    a.lambda = ell.lambda;
    a.mu = ell.mu;
    a.K = ell.K;
    a.K_lower = k_lower_bound(sys);
    a.kl_exact = exact_kl(a.P_star, a.P);
    a.identity_residual = dirichlet_identity_residual(sys.B, sys.N, sys.D, a.Pi, a.P);
    std::tie(a.bound_lhs, a.bound_rhs) = dirichlet_bound_slack(sys.N, sys.D, a.Pi, a.P);
    a.H = sys.A + 0.5 * (sys.D * spd_inverse(a.P_star));
    a.mho = sys.A * a.P_star + 0.5 * sys.D;
    a.flux_residual = (a.H * a.P + a.P * a.H.transpose()).frobenius_norm();
    a.nf_hinf = nf_hinf(sys, hinf_rel_tol);
    a.theta_star = gaussian_cgf(sys).theta_star();
    return a;
}

}  // namespace entbound
