#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "entbound/matrix.hpp"

namespace entbound {

// Symmetric eigendecomposition result. Eigenvalues nondecreasing, vectors
// orthonormal columns in matching order.
struct SymEig {
    std::vector<double> values;
    Matrix vectors;
};

// Cyclic Jacobi rotations; quadratic convergence, orders are small.
// Input must be symmetric to within 1e-12 relative asymmetry.
SymEig sym_eig(const Matrix& m);

double lambda_min(const Matrix& symmetric);
double lambda_max(const Matrix& symmetric);

// Principal SPD square root via eigendecomposition; eigenvalues that are
// negative from round-off get clipped at zero.
Matrix sqrt_spd(const Matrix& m);

// Eigenvalues of a general real square matrix: balance, Gaussian-elimination
// Hessenberg reduction, Francis double-shift QR. Order capped at 128.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

// true iff every eigenvalue of A has strictly negative real part.
bool is_hurwitz(const Matrix& a);

// Solves A P + P A^T + Q = 0 for symmetric Q via Kronecker vectorization
// (dense LU on the n^2 x n^2 system). Requires A Hurwitz.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

// Kalman rank test on [B, AB, ..., A^{n-1}B]; rank judged with singular
// value threshold n * eps_machine * sigma_max.
bool is_controllable(const Matrix& a, const Matrix& b);

// ln det of a symmetric positive definite matrix via Cholesky.
double logdet_spd(const Matrix& m);

// Cholesky factor L (lower, M = L L^T); throws NotSPD on nonpositive pivot.
Matrix cholesky(const Matrix& m);

// Inverse of an SPD matrix through its Cholesky factor.
Matrix spd_inverse(const Matrix& m);

// General dense solve A X = B with partial pivoting.
Matrix lu_solve(const Matrix& a, const Matrix& b);

// Largest singular value of C (i w I - A)^{-1} B at a single frequency,
// computed through a real 2n x 2n embedding of the complex solve.
double transfer_sigma_max(const Matrix& a, const Matrix& b, const Matrix& c, double omega);

// H-infinity norm of C (s I - A)^{-1} B to relative tolerance rel_tol:
// bisection on the Hamiltonian imaginary-axis eigenvalue test, bracketed by
// a frequency sweep, with a dense 4096-point sweep as fallback.
double hinf_norm(const Matrix& a, const Matrix& b, const Matrix& c, double rel_tol = 1e-4);

// Root of a continuous strictly increasing function with fn(lo) < 0 < fn(hi).
// Bisection with secant acceleration; stops when |fn(x)| <= tol or the
// bracket width falls below tol*(1+|x|) (always at machine width).
double find_root_increasing(const std::function<double(double)>& fn, double lo, double hi,
                            double tol);

// Adaptive Simpson quadrature with Richardson error control, absolute
// tolerance. Infinite endpoints are handled by the substitution w = tan(u).
double integrate_adaptive(const std::function<double(double)>& fn, double a, double b,
                          double tol);

}  // namespace entbound
