#pragma once

#include <cstdint>
#include <vector>

#include "entbound/lingauss.hpp"
#include "entbound/matrix.hpp"
#include "entbound/rng.hpp"
#include "entbound/scalar_fpk.hpp"

namespace entbound {

// Euler-Maruyama Monte Carlo configuration. The explicit scheme needs
// dt * (stiffness proxy) <= 0.1; ergodic estimates need at least 10 time
// units of sampling and >= 20 batches for the batch-means errors.
struct SimConfig {
    double dt = 0.01;
    long burn_in_steps = -1;  // negative: defaults to 20% of the total run
    long sample_steps = 200000;
    int n_trajectories = 4;
    std::uint64_t seed = 1;
    int n_batches = 32;
    std::vector<double> x0;  // empty: start at the origin
};

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    long n_effective = 0;
};

struct SimResult {
    std::vector<double> mean;      // time-averaged state
    Matrix second_moment;          // time-averaged x x^T
    Matrix second_moment_stderr;   // batch-means errors, entrywise
    MomentEstimate e_h2;           // E |h|^2
    MomentEstimate e_psi2;         // E |psi|^2
    MomentEstimate identity;       // E (h^T psi - |psi|^2 / 2)
    long total_samples = 0;
    long n_cells = 0;              // trajectory x batch cells
};

// dt stability proxy: ||A + BN||_F for linear systems.
double stability_proxy(const LinearGaussianSystem& sys);
// max |f_h'| over the grid for scalar models.
double stability_proxy(const ScalarDiffusionModel& model);

// Throws on a config that violates the scheme-stability or ergodic-horizon
// invariants for the given proxy.
void validate_config(const SimConfig& cfg, double proxy);

// Single Euler-Maruyama path without ergodic bookkeeping; returns the final
// state. Used for deterministic decay checks and exposed for reuse.
std::vector<double> run_trajectory_linear(const LinearGaussianSystem& sys,
                                          std::vector<double> x, long steps, double dt,
                                          RngStream& stream);

// Full Monte Carlo pass for a linear system; Pi supplies the analytic map
// psi(x) = B^T Pi x. Throws Unstable when the state norm exceeds 1e8.
SimResult simulate_em(const LinearGaussianSystem& sys, const Matrix& Pi, const SimConfig& cfg);

// Full Monte Carlo pass for a 1-D model; psi is interpolated from the
// stationary-density tables on the model grid.
SimResult simulate_em(const ScalarDiffusionModel& model, const SimConfig& cfg);

struct ErgodicMoments {
    MomentEstimate e_h2;
    MomentEstimate e_psi2;
    MomentEstimate identity;
};

ErgodicMoments ergodic_moments(const LinearGaussianSystem& sys, const SimConfig& cfg);
ErgodicMoments ergodic_moments(const ScalarDiffusionModel& model, const SimConfig& cfg);

// Estimate of the noise relative entropy rate, (1/2) E |h|^2.
MomentEstimate relative_entropy_rate(const LinearGaussianSystem& sys, const SimConfig& cfg);
MomentEstimate relative_entropy_rate(const ScalarDiffusionModel& model, const SimConfig& cfg);

}  // namespace entbound
