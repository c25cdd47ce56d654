#include "entbound/sde_sim.hpp"

#include <algorithm>
#include <cmath>

namespace entbound {
namespace {

constexpr double kDivergenceGuard = 1e8;

long default_burn_in(const SimConfig& cfg) {
    if (cfg.burn_in_steps >= 0) return cfg.burn_in_steps;
    // 20% of the total run: burn = total/5 with total = burn + sample
    return cfg.sample_steps / 4;
}

// One (trajectory, batch) cell of running sums; merged in trajectory order
// so results are bit-reproducible regardless of scheduling.
struct Accumulator {
    std::vector<double> sum_x;
    std::vector<double> sum_xx;  // packed row-major n x n
    double sum_h2 = 0.0;
    double sum_psi2 = 0.0;
    double sum_id = 0.0;
    long count = 0;

    explicit Accumulator(int n)
        : sum_x(static_cast<std::size_t>(n), 0.0),
          sum_xx(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {}
};

MomentEstimate batch_means(const std::vector<double>& cell_means) {
    MomentEstimate est;
    est.n_effective = static_cast<long>(cell_means.size());
    double mean = 0.0;
    for (double v : cell_means) mean += v;
    mean /= static_cast<double>(cell_means.size());
    double var = 0.0;
    for (double v : cell_means) var += (v - mean) * (v - mean);
    var /= static_cast<double>(cell_means.size() - 1);
    est.value = mean;
    est.std_error = std::sqrt(var / static_cast<double>(cell_means.size()));
    return est;
}

SimResult reduce(const std::vector<Accumulator>& cells, int n) {
    SimResult res;
    res.n_cells = static_cast<long>(cells.size());
    res.mean.assign(static_cast<std::size_t>(n), 0.0);
    res.second_moment = Matrix(n, n);
    res.second_moment_stderr = Matrix(n, n);
    long total = 0;
    for (const auto& c : cells) total += c.count;
    res.total_samples = total;

    std::vector<double> work(cells.size());
    for (int i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < cells.size(); ++k)
            work[k] = cells[k].sum_x[static_cast<std::size_t>(i)] /
                      static_cast<double>(cells[k].count);
        res.mean[static_cast<std::size_t>(i)] = batch_means(work).value;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < cells.size(); ++k)
                work[k] = cells[k].sum_xx[static_cast<std::size_t>(i) * n + j] /
                          static_cast<double>(cells[k].count);
            const MomentEstimate est = batch_means(work);
            res.second_moment(i, j) = est.value;
            res.second_moment_stderr(i, j) = est.std_error;
        }
    for (std::size_t k = 0; k < cells.size(); ++k)
        work[k] = cells[k].sum_h2 / static_cast<double>(cells[k].count);
    res.e_h2 = batch_means(work);
    for (std::size_t k = 0; k < cells.size(); ++k)
        work[k] = cells[k].sum_psi2 / static_cast<double>(cells[k].count);
    res.e_psi2 = batch_means(work);
    for (std::size_t k = 0; k < cells.size(); ++k)
        work[k] = cells[k].sum_id / static_cast<double>(cells[k].count);
    res.identity = batch_means(work);
    return res;
}

double interp_clamped(const std::vector<double>& x, const std::vector<double>& y, double xi) {
    if (xi <= x.front()) return y.front();
    if (xi >= x.back()) return y.back();
    const double h = x[1] - x[0];
    const std::size_t idx = std::min(
        static_cast<std::size_t>((xi - x.front()) / h), x.size() - 2);
    const double t = (xi - x[idx]) / (x[idx + 1] - x[idx]);
    return (1.0 - t) * y[idx] + t * y[idx + 1];
}

}  // namespace

double stability_proxy(const LinearGaussianSystem& sys) {
    return (sys.A + sys.B * sys.N).frobenius_norm();
}

double stability_proxy(const ScalarDiffusionModel& model) {
    const Poly fh = model.f + model.g * model.h;
    const Poly dfh = fh.derivative();
    double mx = 0.0;
    for (int i = 0; i < model.grid.points; ++i) {
        const double x = model.grid.lo + (model.grid.hi - model.grid.lo) *
                                             static_cast<double>(i) / (model.grid.points - 1);
        mx = std::max(mx, std::abs(dfh(x)));
    }
    return mx;
}

void validate_config(const SimConfig& cfg, double proxy) {
    if (!(cfg.dt > 0.0)) throw Error("SimConfig: dt must be positive");
    if (cfg.n_trajectories < 1) throw Error("SimConfig: need at least one trajectory");
    if (cfg.n_batches < 20) throw Error("SimConfig: batch-means needs at least 20 batches");
    if (cfg.sample_steps < cfg.n_batches)
        throw Error("SimConfig: sample_steps below the batch count");
    if (cfg.dt * proxy > 0.1)
        throw Error("SimConfig: dt * stiffness proxy exceeds 0.1, explicit scheme unsafe");
    if (static_cast<double>(cfg.sample_steps) * cfg.dt < 10.0)
        throw Error("SimConfig: sampling horizon below 10 time units");
}

std::vector<double> run_trajectory_linear(const LinearGaussianSystem& sys,
                                          std::vector<double> x, long steps, double dt,
                                          RngStream& stream) {
    const int n = sys.n;
    const int m = sys.m;
    const Matrix M = sys.A + sys.B * sys.N;
    const double sqdt = std::sqrt(dt);
    std::vector<double> xi(static_cast<std::size_t>(m)), xnew(static_cast<std::size_t>(n));
    for (long k = 0; k < steps; ++k) {
        for (int j = 0; j < m; ++j) xi[static_cast<std::size_t>(j)] = next_normal(stream);
        for (int i = 0; i < n; ++i) {
            double drift = 0.0, noise = 0.0;
            for (int j = 0; j < n; ++j) drift += M(i, j) * x[static_cast<std::size_t>(j)];
            for (int j = 0; j < m; ++j) noise += sys.B(i, j) * xi[static_cast<std::size_t>(j)];
            xnew[static_cast<std::size_t>(i)] =
                x[static_cast<std::size_t>(i)] + drift * dt + noise * sqdt;
        }
        x = xnew;
        double norm2 = 0.0;
        for (double v : x) norm2 += v * v;
        if (norm2 > kDivergenceGuard * kDivergenceGuard)
            throw Unstable("run_trajectory_linear: state norm exceeded 1e8");
    }
    return x;
}

SimResult simulate_em(const LinearGaussianSystem& sys, const Matrix& Pi, const SimConfig& cfg) {
    validate_config(cfg, stability_proxy(sys));
    const int n = sys.n;
    const int m = sys.m;
    const Matrix M = sys.A + sys.B * sys.N;
    const Matrix G = sys.B.transpose() * Pi;  // psi(x) = B^T Pi x
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);
    const long burn = default_burn_in(cfg);
    const long per_batch = cfg.sample_steps / cfg.n_batches;
    std::vector<Accumulator> cells;
    cells.reserve(static_cast<std::size_t>(cfg.n_trajectories) * cfg.n_batches);

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<double> xi(static_cast<std::size_t>(m)), xnew(static_cast<std::size_t>(n));
    std::vector<double> h(static_cast<std::size_t>(m)), psi(static_cast<std::size_t>(m));

    for (int traj = 0; traj < cfg.n_trajectories; ++traj) {
        RngStream stream = gaussian_stream(cfg.seed, static_cast<std::uint64_t>(traj));
        if (cfg.x0.empty())
            std::fill(x.begin(), x.end(), 0.0);
        else {
            if (static_cast<int>(cfg.x0.size()) != n)
                throw DimensionMismatch("SimConfig: x0 length must match the state dimension");
            x = cfg.x0;
        }
        for (int b = -1; b < cfg.n_batches; ++b) {
            const long steps = (b < 0) ? burn : per_batch;
            Accumulator acc(n);
            for (long k = 0; k < steps; ++k) {
                for (int j = 0; j < m; ++j) xi[static_cast<std::size_t>(j)] = next_normal(stream);
                for (int i = 0; i < n; ++i) {
                    double drift = 0.0, noise = 0.0;
                    for (int j = 0; j < n; ++j) drift += M(i, j) * x[static_cast<std::size_t>(j)];
                    for (int j = 0; j < m; ++j)
                        noise += sys.B(i, j) * xi[static_cast<std::size_t>(j)];
                    xnew[static_cast<std::size_t>(i)] =
                        x[static_cast<std::size_t>(i)] + drift * dt + noise * sqdt;
                }
                x = xnew;
                double norm2 = 0.0;
                for (double v : x) norm2 += v * v;
                if (norm2 > kDivergenceGuard * kDivergenceGuard)
                    throw Unstable("simulate_em: state norm exceeded 1e8");
                if (b < 0) continue;
                for (int i = 0; i < m; ++i) {
                    double hv = 0.0, pv = 0.0;
                    for (int j = 0; j < n; ++j) {
                        hv += sys.N(i, j) * x[static_cast<std::size_t>(j)];
                        pv += G(i, j) * x[static_cast<std::size_t>(j)];
                    }
                    h[static_cast<std::size_t>(i)] = hv;
                    psi[static_cast<std::size_t>(i)] = pv;
                }
                double h2 = 0.0, psi2 = 0.0, hpsi = 0.0;
                for (int i = 0; i < m; ++i) {
                    h2 += h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
                    psi2 += psi[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(i)];
                    hpsi += h[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(i)];
                }
                acc.sum_h2 += h2;
                acc.sum_psi2 += psi2;
                acc.sum_id += hpsi - 0.5 * psi2;
                for (int i = 0; i < n; ++i) {
                    acc.sum_x[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
                    for (int j = 0; j < n; ++j)
                        acc.sum_xx[static_cast<std::size_t>(i) * n + j] +=
                            x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
                }
                ++acc.count;
            }
            if (b >= 0) cells.push_back(std::move(acc));
        }
    }
    return reduce(cells, n);
}

SimResult simulate_em(const ScalarDiffusionModel& model, const SimConfig& cfg) {
    validate_config(cfg, stability_proxy(model));
    const auto [p_star, p] = density_pair(model);
    const auto [r, psi_table] = log_ratio_and_psi(p, p_star, model.g);
    (void)r;
    const Poly fh = model.f + model.g * model.h;
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);
    const long burn = default_burn_in(cfg);
    const long per_batch = cfg.sample_steps / cfg.n_batches;
    std::vector<Accumulator> cells;
    cells.reserve(static_cast<std::size_t>(cfg.n_trajectories) * cfg.n_batches);

    for (int traj = 0; traj < cfg.n_trajectories; ++traj) {
        RngStream stream = gaussian_stream(cfg.seed, static_cast<std::uint64_t>(traj));
        double x = cfg.x0.empty() ? 0.0 : cfg.x0.front();
        for (int b = -1; b < cfg.n_batches; ++b) {
            const long steps = (b < 0) ? burn : per_batch;
            Accumulator acc(1);
            for (long k = 0; k < steps; ++k) {
                const double xi = next_normal(stream);
                x = x + fh(x) * dt + model.g(x) * sqdt * xi;
                if (std::abs(x) > kDivergenceGuard)
                    throw Unstable("simulate_em: state norm exceeded 1e8");
                if (b < 0) continue;
                const double hv = model.h(x);
                const double pv = interp_clamped(p.x, psi_table, x);
                acc.sum_h2 += hv * hv;
                acc.sum_psi2 += pv * pv;
                acc.sum_id += hv * pv - 0.5 * pv * pv;
                acc.sum_x[0] += x;
                acc.sum_xx[0] += x * x;
                ++acc.count;
            }
            if (b >= 0) cells.push_back(std::move(acc));
        }
    }
    return reduce(cells, 1);
}

ErgodicMoments ergodic_moments(const LinearGaussianSystem& sys, const SimConfig& cfg) {
    const Matrix pi = precision_gap(sys);
    const SimResult res = simulate_em(sys, pi, cfg);
    return {res.e_h2, res.e_psi2, res.identity};
}

ErgodicMoments ergodic_moments(const ScalarDiffusionModel& model, const SimConfig& cfg) {
    const SimResult res = simulate_em(model, cfg);
    return {res.e_h2, res.e_psi2, res.identity};
}

namespace {

MomentEstimate half(MomentEstimate est) {
    est.value *= 0.5;
    est.std_error *= 0.5;
    return est;
}

}  // namespace

MomentEstimate relative_entropy_rate(const LinearGaussianSystem& sys, const SimConfig& cfg) {
    return half(ergodic_moments(sys, cfg).e_h2);
}

MomentEstimate relative_entropy_rate(const ScalarDiffusionModel& model, const SimConfig& cfg) {
    return half(ergodic_moments(model, cfg).e_h2);
}

}  // namespace entbound
