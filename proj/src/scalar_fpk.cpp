#include "entbound/scalar_fpk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entbound {
namespace {

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return acc;
}

// d/dx of ln-values on a uniform grid: 4th-order central stencil inside,
// 2nd-order one-sided at the ends. psi enters the moments quadratically, so
// the differentiation has to stay smooth.
std::vector<double> grid_derivative(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double h = x[1] - x[0];
    std::vector<double> d(n, 0.0);
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    d[1] = (y[2] - y[0]) / (2.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h);
    d[n - 2] = (y[n - 1] - y[n - 3]) / (2.0 * h);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    return d;
}

std::vector<double> grid_second_derivative(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double h = x[1] - x[0];
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / (h * h);
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    return d;
}

// Cumulative integral on a uniform grid by the cubic-exact 4-point rule;
// the log-density needs pointwise accuracy, where a running trapezoid
// would cap the whole table at O(h^2).
std::vector<double> cumulative_integral(const std::vector<double>& x,
                                        const std::vector<double>& g) {
    const std::size_t n = x.size();
    const double h = x[1] - x[0];
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double inc;
        if (i == 0)
            inc = h / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]);
        else if (i + 2 >= n)
            inc = h / 24.0 * (g[n - 4] - 5.0 * g[n - 3] + 19.0 * g[n - 2] + 9.0 * g[n - 1]);
        else
            inc = h / 24.0 * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]);
        cum[i + 1] = cum[i] + inc;
    }
    return cum;
}

// Unnormalized log-density for drift values f_h sampled on the grid.
std::vector<double> log_density_raw(const std::vector<double>& x,
                                    const std::vector<double>& f_h, const Poly& g) {
    const std::size_t n = x.size();
    std::vector<double> integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double gv = g(x[i]);
        const double d = gv * gv;
        if (!(d > 0.0)) throw NotElliptic("stationary_density: g^2 vanishes on the grid");
        integrand[i] = 2.0 * f_h[i] / d;
    }
    std::vector<double> logp = cumulative_integral(x, integrand);
    for (std::size_t i = 0; i < n; ++i) {
        const double gv = g(x[i]);
        logp[i] -= std::log(gv * gv);
    }
    return logp;
}

DensityTable normalize(std::vector<double> x, std::vector<double> logp) {
    const double peak = *std::max_element(logp.begin(), logp.end());
    DensityTable t;
    t.x = std::move(x);
    t.p.resize(logp.size());
    for (std::size_t i = 0; i < logp.size(); ++i) t.p[i] = std::exp(logp[i] - peak);
    const double z = trapezoid(t.x, t.p);
    if (!(z > 0.0) || !std::isfinite(z))
        throw NotNormalizable("stationary_density: density does not normalize on the grid");
    for (double& v : t.p) v /= z;
    t.normalization = z * std::exp(peak);
    t.logp = std::move(logp);
    for (double& v : t.logp) v -= peak + std::log(z);
    return t;
}

bool tails_small(const DensityTable& t, double boundary_frac) {
    const double peak = *std::max_element(t.p.begin(), t.p.end());
    return t.p.front() <= boundary_frac * peak && t.p.back() <= boundary_frac * peak;
}

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> x(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        x[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return x;
}

void check_confinement(const Poly& drift, const char* label) {
    const int deg = drift.degree();
    if (deg < 1 || deg % 2 == 0 || drift.leading_coefficient() >= 0.0)
        throw NotNormalizable(std::string(label) +
                              ": drift must have odd leading degree with negative "
                              "leading coefficient");
}

}  // namespace

double Poly::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

Poly Poly::derivative() const {
    Poly d;
    if (c.size() <= 1) return d;
    d.c.resize(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i)
        d.c[i - 1] = static_cast<double>(i) * c[i];
    return d;
}

Poly Poly::operator*(const Poly& other) const {
    if (is_zero() || other.is_zero()) return Poly{};
    Poly out;
    out.c.assign(c.size() + other.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = 0; j < other.c.size(); ++j) out.c[i + j] += c[i] * other.c[j];
    return out;
}

Poly Poly::operator+(const Poly& other) const {
    Poly out;
    out.c.assign(std::max(c.size(), other.c.size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) out.c[i] += c[i];
    for (std::size_t i = 0; i < other.c.size(); ++i) out.c[i] += other.c[i];
    return out;
}

int Poly::degree() const {
    for (std::size_t i = c.size(); i-- > 0;)
        if (c[i] != 0.0) return static_cast<int>(i);
    return -1;
}

double Poly::leading_coefficient() const {
    const int d = degree();
    return d < 0 ? 0.0 : c[static_cast<std::size_t>(d)];
}

bool Poly::is_zero() const { return degree() < 0; }

void validate_model(const ScalarDiffusionModel& model) {
    if (model.grid.points < 64)
        throw Error("scalar model: grid must have at least 64 points");
    if (!(model.grid.lo < model.grid.hi))
        throw Error("scalar model: grid lo must be below hi");
    check_confinement(model.f, "scalar model (f)");
    check_confinement(model.f + model.g * model.h, "scalar model (f + g h)");
    const auto x = linspace(model.grid.lo, model.grid.hi, model.grid.points);
    double dmin = std::numeric_limits<double>::max(), dmax = 0.0;
    for (double xi : x) {
        const double gv = model.g(xi);
        dmin = std::min(dmin, gv * gv);
        dmax = std::max(dmax, gv * gv);
    }
    if (!(dmin > 1e-6 * dmax))
        throw NotElliptic("scalar model: g^2 must stay uniformly positive on the grid");
}

DensityTable stationary_density(const Poly& f, const Poly& g, const Poly& extra, GridSpec grid,
                                bool auto_expand, double boundary_frac) {
    const Poly drift = f + extra;
    check_confinement(drift, "stationary_density");
    for (int attempt = 0; attempt < 40; ++attempt) {
        const auto x = linspace(grid.lo, grid.hi, grid.points);
        std::vector<double> fh(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) fh[i] = drift(x[i]);
        DensityTable t = normalize(x, log_density_raw(x, fh, g));
        if (!auto_expand || tails_small(t, boundary_frac)) return t;
        const double span = grid.hi - grid.lo;
        grid.lo -= 0.25 * span;
        grid.hi += 0.25 * span;
    }
    throw NotNormalizable("stationary_density: tails never fell below the boundary threshold");
}

DensityTable stationary_density_sampled(const Poly& f, const Poly& g,
                                        const std::vector<double>& extra_values,
                                        const GridSpec& grid) {
    const auto x = linspace(grid.lo, grid.hi, grid.points);
    if (extra_values.size() != x.size())
        throw GridMismatch("stationary_density_sampled: extra drift length mismatch");
    std::vector<double> fh(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) fh[i] = f(x[i]) + extra_values[i];
    return normalize(x, log_density_raw(x, fh, g));
}

std::pair<DensityTable, DensityTable> density_pair(const ScalarDiffusionModel& model,
                                                   double boundary_frac) {
    validate_model(model);
    GridSpec grid = model.grid;
    const Poly extra = model.g * model.h;
    for (int attempt = 0; attempt < 40; ++attempt) {
        DensityTable p_star = stationary_density(model.f, model.g, Poly{}, grid, false);
        DensityTable p = stationary_density(model.f, model.g, extra, grid, false);
        if (tails_small(p_star, boundary_frac) && tails_small(p, boundary_frac))
            return {std::move(p_star), std::move(p)};
        const double span = grid.hi - grid.lo;
        grid.lo -= 0.25 * span;
        grid.hi += 0.25 * span;
    }
    throw NotNormalizable("density_pair: tails never fell below the boundary threshold");
}

std::pair<std::vector<double>, std::vector<double>> log_ratio_and_psi(
    const DensityTable& p, const DensityTable& p_star, const Poly& g) {
    if (p.x.size() != p_star.x.size() || p.x.front() != p_star.x.front() ||
        p.x.back() != p_star.x.back())
        throw GridMismatch("log_ratio_and_psi: densities live on different grids");
    const std::size_t n = p.x.size();
    std::vector<double> lnr(n);
    for (std::size_t i = 0; i < n; ++i) {
        // far tails may underflow in linear scale; the log table stays valid
        if (!std::isfinite(p.logp[i]) || !std::isfinite(p_star.logp[i]))
            throw NonPositiveDensity("log_ratio_and_psi: densities must be positive");
        lnr[i] = p.logp[i] - p_star.logp[i];
    }
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::exp(lnr[i]);
    std::vector<double> dlnr = grid_derivative(p.x, lnr);
    std::vector<double> psi(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = g(p.x[i]) * dlnr[i];
    return {std::move(r), std::move(psi)};
}

EntropyChain entropy_moments(const DensityTable& p, const DensityTable& p_star, const Poly& g,
                             const std::vector<double>& h_values) {
    if (h_values.size() != p.x.size())
        throw GridMismatch("entropy_moments: h sample length mismatch");
    const auto [r, psi] = log_ratio_and_psi(p, p_star, g);
    const std::size_t n = p.x.size();
    std::vector<double> w_psi2(n), w_h2(n), w_id(n);
    for (std::size_t i = 0; i < n; ++i) {
        w_psi2[i] = p.p[i] * psi[i] * psi[i];
        w_h2[i] = p.p[i] * h_values[i] * h_values[i];
        w_id[i] = p.p[i] * (h_values[i] * psi[i] - 0.5 * psi[i] * psi[i]);
    }
    EntropyChain chain;
    chain.E_psi2 = trapezoid(p.x, w_psi2);
    chain.E_h2 = trapezoid(p.x, w_h2);
    chain.identity_residual = trapezoid(p.x, w_id);
    return chain;
}

EntropyChain dirichlet_check(const ScalarDiffusionModel& model) {
    const auto [p_star, p] = density_pair(model);
    std::vector<double> h_values(p.x.size());
    for (std::size_t i = 0; i < p.x.size(); ++i) h_values[i] = model.h(p.x[i]);
    return entropy_moments(p, p_star, model.g, h_values);
}

EntropyChain fisher_kl_check(const ScalarDiffusionModel& model) {
    const auto [p_star, p] = density_pair(model);
    std::vector<double> h_values(p.x.size());
    for (std::size_t i = 0; i < p.x.size(); ++i) h_values[i] = model.h(p.x[i]);
    EntropyChain chain = entropy_moments(p, p_star, model.g, h_values);

    const std::size_t n = p.x.size();
    std::vector<double> lnr(n), lnp_star(n);
    for (std::size_t i = 0; i < n; ++i) {
        lnr[i] = p.logp[i] - p_star.logp[i];
        lnp_star[i] = p_star.logp[i];
    }
    const std::vector<double> dlnr = grid_derivative(p.x, lnr);
    std::vector<double> w_f(n), w_kl(n);
    for (std::size_t i = 0; i < n; ++i) {
        w_f[i] = p.p[i] * dlnr[i] * dlnr[i];
        w_kl[i] = p.p[i] * lnr[i];
    }
    chain.fisher = trapezoid(p.x, w_f);
    chain.kl = trapezoid(p.x, w_kl);

    double lambda = std::numeric_limits<double>::max();
    for (double xi : p.x) {
        const double gv = model.g(xi);
        lambda = std::min(lambda, gv * gv);
    }
    chain.lambda = lambda;
    const std::vector<double> d2 = grid_second_derivative(p.x, lnp_star);
    double max_curv = -std::numeric_limits<double>::max();
    // boundary second differences ride on the 1e-12 tail and are unreliable
    for (std::size_t i = 2; i + 2 < n; ++i) max_curv = std::max(max_curv, d2[i]);
    chain.mu = -max_curv;
    chain.mu_positive = chain.mu > 0.0;
    chain.K = chain.mu_positive ? 1.0 / (chain.lambda * chain.mu) : 0.0;
    return chain;
}

std::vector<double> saturating_drift_1d(const ScalarDiffusionModel& nominal,
                                        const std::vector<double>& target_r) {
    const DensityTable p_star = stationary_density(nominal.f, nominal.g, Poly{}, nominal.grid,
                                                   /*auto_expand=*/false);
    if (target_r.size() != p_star.x.size())
        throw GridMismatch("saturating_drift_1d: target ratio length mismatch");
    std::vector<double> lnr(target_r.size());
    for (std::size_t i = 0; i < target_r.size(); ++i) {
        if (!(target_r[i] > 0.0))
            throw NonPositiveRatio("saturating_drift_1d: target ratio must be positive");
        lnr[i] = std::log(target_r[i]);
    }
    // renormalization of r shifts ln r by a constant and drops out of h
    const std::vector<double> dlnr = grid_derivative(p_star.x, lnr);
    std::vector<double> h(target_r.size());
    for (std::size_t i = 0; i < target_r.size(); ++i)
        h[i] = 0.5 * nominal.g(p_star.x[i]) * dlnr[i];
    return h;
}

}  // namespace entbound
