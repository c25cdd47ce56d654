#pragma once

// Test-only oracles and random model generators. Everything here is kept
// independent of the implementation paths it cross-checks: quadratures are
// assembled from Golub-Welsch nodes, sweeps are brute-force, and the random
// systems are built from raw eigenvalue shifts.

#include <cmath>
#include <numbers>
#include <vector>

#include "entbound/lingauss.hpp"
#include "entbound/numkit.hpp"
#include "entbound/rng.hpp"

namespace entbound::testing {

inline double spectral_abscissa(const Matrix& a) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& ev : eigenvalues(a)) mx = std::max(mx, ev.real());
    return mx;
}

inline Matrix random_matrix(RngStream& rng, int rows, int cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * next_normal(rng);
    return m;
}

inline Matrix random_spd(RngStream& rng, int n, double shift = 0.5) {
    const Matrix g = random_matrix(rng, n, n);
    Matrix s = g * g.transpose();
    for (int i = 0; i < n; ++i) s(i, i) += shift;
    return s;
}

inline Matrix random_hurwitz(RngStream& rng, int n) {
    Matrix a = random_matrix(rng, n, n);
    const double margin = 0.3 + 0.7 * next_uniform(rng);
    const double alpha = spectral_abscissa(a);
    for (int i = 0; i < n; ++i) a(i, i) -= alpha + margin;
    return a;
}

// Random controllable Hurwitz system with the noise gain shrunk until the
// perturbed matrix keeps at least half the nominal stability margin. Draws
// whose invariant covariances are conditioned worse than 1e6 are rejected:
// beyond that the floating-point residuals are dominated by conditioning,
// not by the identities under test.
inline LinearGaussianSystem random_valid_system(RngStream& rng, int max_n,
                                                bool square_b = false) {
    for (;;) {
        const int n = 1 + static_cast<int>(next_uniform(rng) * max_n) % max_n;
        const int m = square_b ? n : 1 + static_cast<int>(next_uniform(rng) * n) % n;
        const Matrix a = random_hurwitz(rng, n);
        Matrix b = random_matrix(rng, n, m);
        if (square_b)
            for (int i = 0; i < n; ++i) b(i, i) += 0.5;
        if (!is_controllable(a, b)) continue;
        Matrix nmat = random_matrix(rng, m, n, 0.5);
        const double nominal_margin = spectral_abscissa(a);  // negative
        bool ok = false;
        for (int shrink = 0; shrink < 60; ++shrink) {
            if (spectral_abscissa(a + b * nmat) <= 0.5 * nominal_margin) {
                ok = true;
                break;
            }
            nmat *= 0.5;
        }
        if (!ok) continue;
        const LinearGaussianSystem sys = build_system(a, b, nmat);
        const auto cond_spd = [](const Matrix& mat) {
            const SymEig e = sym_eig(mat);
            return e.values.back() / std::max(e.values.front(), 1e-300);
        };
        if (cond_spd(nominal_covariance(sys)) > 1e6 ||
            cond_spd(perturbed_covariance(sys)) > 1e6)
            continue;
        return sys;
    }
}

// Langevin family A = -R (SPD R), B = sigma I; reversible by construction.
struct LangevinSample {
    Matrix R;
    double sigma = 1.0;
    LinearGaussianSystem nominal;
};

inline LangevinSample random_langevin(RngStream& rng, int max_n) {
    const int n = 1 + static_cast<int>(next_uniform(rng) * max_n) % max_n;
    LangevinSample s;
    s.R = random_spd(rng, n, 0.4);
    s.sigma = 0.5 + 1.5 * next_uniform(rng);
    s.nominal = build_system(-s.R, s.sigma * Matrix::identity(n), Matrix::zero(n, n));
    return s;
}

// Gauss-Hermite rule for weight e^{-u^2} via the Golub-Welsch tridiagonal.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussHermite gauss_hermite(int n) {
    Matrix t(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(0.5 * k);
        t(k - 1, k) = b;
        t(k, k - 1) = b;
    }
    const SymEig e = sym_eig(t);
    GaussHermite gh;
    gh.nodes = e.values;
    gh.weights.resize(static_cast<std::size_t>(n));
    // Christoffel weights w_i = 1/sum_k p_k(x_i)^2 with the orthonormal
    // recurrence: the eigenvector route only gives absolute accuracy, which
    // is useless against exponentially growing integrands.
    for (int i = 0; i < n; ++i) {
        const double x = gh.nodes[static_cast<std::size_t>(i)];
        double pkm1 = 0.0;
        double pk = std::pow(std::numbers::pi, -0.25);
        double sum = pk * pk;
        for (int k = 0; k + 1 < n; ++k) {
            const double bk = std::sqrt(0.5 * k);
            const double bk1 = std::sqrt(0.5 * (k + 1));
            const double pk1 = (x * pk - bk * pkm1) / bk1;
            pkm1 = pk;
            pk = pk1;
            sum += pk * pk;
        }
        gh.weights[static_cast<std::size_t>(i)] = 1.0 / sum;
    }
    return gh;
}

// ln E*[exp(theta |N x|^2)] for x ~ N(0, P*) by tensor Gauss-Hermite
// quadrature in the Cholesky coordinates of P*; n <= 3.
inline double log_xi_quadrature(const Matrix& n_mat, const Matrix& p_star, double theta,
                                int nodes_per_dim = 120) {
    const int n = p_star.rows();
    const Matrix l = cholesky(p_star);
    const GaussHermite gh = gauss_hermite(nodes_per_dim);
    const double norm = std::pow(std::numbers::pi, -0.5 * n);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    double total = 0.0;
    const double sqrt2 = std::numbers::sqrt2;
    for (;;) {
        double w = 1.0;
        std::vector<double> z(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) {
            const int i = idx[static_cast<std::size_t>(d)];
            w *= gh.weights[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(d)] = sqrt2 * gh.nodes[static_cast<std::size_t>(i)];
        }
        // x = L z, |N x|^2
        double q = 0.0;
        for (int r = 0; r < n_mat.rows(); ++r) {
            double acc = 0.0;
            for (int c = 0; c < n; ++c) {
                double xc = 0.0;
                for (int k = 0; k <= c; ++k) xc += l(c, k) * z[static_cast<std::size_t>(k)];
                acc += n_mat(r, c) * xc;
            }
            q += acc * acc;
        }
        total += w * std::exp(theta * q);
        int d = 0;
        for (; d < n; ++d) {
            if (++idx[static_cast<std::size_t>(d)] < nodes_per_dim) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
        if (d == n) break;
    }
    return std::log(total * norm);
}

// KL between N(0,P) and N(0,P*) by tensor Gauss-Hermite over the P-Gaussian.
inline double kl_quadrature(const Matrix& p_star, const Matrix& p, int nodes_per_dim = 48) {
    const int n = p.rows();
    const Matrix l = cholesky(p);
    const Matrix p_inv = spd_inverse(p);
    const Matrix ps_inv = spd_inverse(p_star);
    const double logdet_term = 0.5 * (logdet_spd(p_star) - logdet_spd(p));
    const GaussHermite gh = gauss_hermite(nodes_per_dim);
    const double norm = std::pow(std::numbers::pi, -0.5 * n);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    double total = 0.0;
    for (;;) {
        double w = 1.0;
        std::vector<double> z(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) {
            const int i = idx[static_cast<std::size_t>(d)];
            w *= gh.weights[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(d)] = std::numbers::sqrt2 * gh.nodes[static_cast<std::size_t>(i)];
        }
        std::vector<double> x(static_cast<std::size_t>(n), 0.0);
        for (int c = 0; c < n; ++c)
            for (int k = 0; k <= c; ++k)
                x[static_cast<std::size_t>(c)] += l(c, k) * z[static_cast<std::size_t>(k)];
        double quad = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                quad += x[static_cast<std::size_t>(i)] *
                        (ps_inv(i, j) - p_inv(i, j)) * x[static_cast<std::size_t>(j)];
        total += w * (logdet_term + 0.5 * quad);
        int d = 0;
        for (; d < n; ++d) {
            if (++idx[static_cast<std::size_t>(d)] < nodes_per_dim) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
        if (d == n) break;
    }
    return total * norm;
}

// Brute-force lower bound for the H-infinity norm: dense log-spaced sweep.
inline double hinf_sweep(const Matrix& a, const Matrix& b, const Matrix& c, double wlo,
                         double whi, int points) {
    double best = transfer_sigma_max(a, b, c, 0.0);
    for (int i = 0; i < points; ++i) {
        const double w = wlo * std::pow(whi / wlo, static_cast<double>(i) / (points - 1));
        best = std::max(best, transfer_sigma_max(a, b, c, w));
    }
    return best;
}

}  // namespace entbound::testing
