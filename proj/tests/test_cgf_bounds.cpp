#include <doctest.h>

#include <cmath>
#include <limits>

#include "entbound/cgf_bounds.hpp"
#include "entbound/lingauss.hpp"
#include "entbound/paper_example.hpp"
#include "oracles.hpp"

using namespace entbound;
namespace tst = entbound::testing;

namespace {

GaussianCgf half_mode() { return GaussianCgf({0.5}); }

GaussianCgf benchmark_cgf() { return gaussian_cgf(benchmark_system()); }

// psi = theta^2: smooth, strictly convex, theta_star = +infinity
struct QuadraticCgf final : CgfModel {
    double psi(double th) const override { return th * th; }
    double psi_prime(double th) const override { return 2.0 * th; }
    double psi_second(double) const override { return 2.0; }
    double theta_star() const override { return std::numeric_limits<double>::infinity(); }
};

// psi with finite psi' at the domain edge: nu stays bounded
struct BoundedCgf final : CgfModel {
    double psi(double th) const override { return th * th; }
    double psi_prime(double th) const override { return 2.0 * th; }
    double psi_second(double) const override { return 2.0; }
    double theta_star() const override { return 1.0; }
};

}  // namespace

TEST_CASE("nu closed forms") {
    const GaussianCgf g = half_mode();
    CHECK(nu(g, 0.0) == 0.0);
    // s = 1/2, theta = 1/2: psi' = 1, psi = ln(2)/2
    CHECK(nu(g, 0.5) == doctest::Approx(0.5 - 0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(nu(g, 1.5), OutOfDomain);
    CHECK_THROWS_AS(nu(g, -0.1), OutOfDomain);
}

TEST_CASE("nu is strictly increasing for random Gaussian models") {
    RngStream rng = gaussian_stream(71, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> s;
        const int modes = 1 + trial % 4;
        for (int i = 0; i < modes; ++i) s.push_back(0.05 + 2.0 * next_uniform(rng));
        const GaussianCgf g(s);
        double prev = -1.0;
        for (int i = 0; i < 200; ++i) {
            const double th = g.theta_star() * (1.0 - 1e-6) * i / 199.0;
            const double v = nu(g, th);
            if (i > 0) CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("nu_k closed forms") {
    const GaussianCgf g = half_mode();
    const double K = 0.1;
    CHECK(nu_k(g, K, 2.0 * K) == doctest::Approx(-g.psi(2.0 * K)).epsilon(1e-12));
    CHECK(nu_k(g, K, 0.0) == doctest::Approx(-2.0 * K * g.psi_prime(0.0)).epsilon(1e-12));
    CHECK(nu_k(g, K, 0.5) == doctest::Approx(0.3 - 0.5 * std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("solve_theta_k") {
    const GaussianCgf g = half_mode();
    SUBCASE("small-K limit") {
        const double th = solve_theta_k(g, 1e-6);
        CHECK(th > 2e-6);
        CHECK(th < 1e-2);
    }
    SUBCASE("root with sign bracket") {
        const double K = 0.1;
        const double th = solve_theta_k(g, K);
        CHECK(th > 2.0 * K);
        CHECK(th < g.theta_star());
        CHECK(nu_k(g, K, th - 1e-6) < 0.0);
        CHECK(nu_k(g, K, th + 1e-6) > 0.0);
        CHECK(std::abs(nu_k(g, K, th)) <= 1e-10 * (1.0 + g.psi_prime(th)));
    }
    SUBCASE("benchmark root lands inside (2K, theta*)") {
        const GaussianCgf bc = benchmark_cgf();
        const double K = ellipticity_constants(benchmark_system()).K;
        const double th = solve_theta_k(bc, K);
        CHECK(th > 2.0 * K);
        CHECK(th < bc.theta_star());
        CHECK(std::abs(nu(bc, th) - 2.4894) < 2e-2);
    }
    SUBCASE("unbounded theta_star uses the geometric bracket") {
        // psi = theta^2: nu_K root at exactly 4K
        const QuadraticCgf q;
        CHECK(solve_theta_k(q, 0.3) == doctest::Approx(1.2).epsilon(1e-9));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(solve_theta_k(g, 0.5 * g.theta_star()), KTooLarge);
        CHECK_THROWS_AS(solve_theta_k(GaussianCgf({0.0}), 0.1), Degenerate);
    }
}

TEST_CASE("kl_upper_bound") {
    const GaussianCgf bc = benchmark_cgf();
    const double K = ellipticity_constants(benchmark_system()).K;
    const BoundReport rep = kl_upper_bound(bc, K);
    CHECK(std::abs(rep.kl_bound - 2.4894) < 2e-2);
    CHECK(rep.kl_bound ==
          doctest::Approx(2.0 * K * bc.psi_prime(rep.theta_K)).epsilon(1e-8));
    CHECK(rep.l1_bound == doctest::Approx(std::sqrt(2.0 * rep.kl_bound)).epsilon(1e-12));
    CHECK(rep.l1_trivial);

    // monotone in K
    const GaussianCgf g = half_mode();
    double prev = 0.0;
    for (double k : {0.01, 0.05, 0.1, 0.2, 0.3, 0.4}) {
        const double b = kl_upper_bound(g, k).kl_bound;
        CHECK(b >= prev);
        prev = b;
    }

    // degenerate input short-circuits
    const BoundReport dz = kl_upper_bound(GaussianCgf({0.0}), 1.0);
    CHECK(dz.degenerate);
    CHECK(dz.kl_bound == 0.0);
}

TEST_CASE("asymptotic bound") {
    const GaussianCgf g = half_mode();
    CHECK(asymptotic_bound(g, 0.0) == 0.0);
    // s = 1/2: psi'(0) = 1/2, psi''(0) = 1/2, asymptote K + 2 K^{3/2}
    for (double k : {1e-3, 1e-2, 0.1})
        CHECK(asymptotic_bound(g, k) ==
              doctest::Approx(k + 2.0 * std::pow(k, 1.5)).epsilon(1e-12));

    // remainder (exact - asymptote)/K^{3/2} bounded and decreasing on the benchmark
    const GaussianCgf bc = benchmark_cgf();
    double prev_ratio = std::numeric_limits<double>::max();
    for (double k : {1e-2, 1e-3, 1e-4}) {
        const double exact = kl_upper_bound(bc, k).kl_bound;
        const double asy = asymptotic_bound(bc, k);
        const double ratio = std::abs(exact - asy) / std::pow(k, 1.5);
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
    }
    CHECK_THROWS_AS(asymptotic_bound(GaussianCgf({0.0}), 0.1), Degenerate);
}

TEST_CASE("asymptotics converge to the two-term coefficient") {
    const GaussianCgf bc = benchmark_cgf();
    const double limit = 4.0 * std::sqrt(bc.psi_prime(0.0) * bc.psi_second(0.0));
    double prev_dev = std::numeric_limits<double>::max();
    for (double k : {1e-3, 1e-4, 1e-5}) {
        const double exact = kl_upper_bound(bc, k).kl_bound;
        const double ratio = (exact - 2.0 * bc.psi_prime(0.0) * k) / std::pow(k, 1.5);
        const double dev = std::abs(ratio - limit) / limit;
        CHECK(dev < prev_dev);
        prev_dev = dev;
    }
    CHECK(prev_dev <= 0.05);
}

TEST_CASE("stealthy bound and Pinsker") {
    CHECK(stealthy_bound(1.0, 0.0) == 0.0);
    CHECK(stealthy_bound(1.0, 0.25) == doctest::Approx(1.0));
    CHECK_THROWS_AS(stealthy_bound(1.0, -0.1), NegativeInput);

    CHECK(pinsker_l1(0.0) == 0.0);
    CHECK(pinsker_l1(0.4544) == doctest::Approx(std::sqrt(0.9088)).epsilon(1e-12));
    CHECK(pinsker_l1(2.4894) == doctest::Approx(std::sqrt(4.9788)).epsilon(1e-12));
    CHECK(pinsker_l1(2.4894) > 2.0);
    CHECK_THROWS_AS(pinsker_l1(-1e-9), NegativeInput);
}

TEST_CASE("small gain curve") {
    const GaussianCgf g = half_mode();
    const auto grid = default_theta_grid(g, 100);
    const auto pts = small_gain_curve(g, grid);
    CHECK(pts.front().K_coord == 0.0);
    CHECK(pts.front().eps_coord == 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].K_coord >= pts[i - 1].K_coord);
        CHECK(pts[i].eps_coord >= pts[i - 1].eps_coord);
    }

    // the point (K, nu(theta_K)) lies on the curve by construction
    const GaussianCgf bc = benchmark_cgf();
    const double K = ellipticity_constants(benchmark_system()).K;
    const double thK = solve_theta_k(bc, K);
    const auto single = small_gain_curve(bc, {thK});
    CHECK(single.front().K_coord == doctest::Approx(K).epsilon(1e-8));
    CHECK(single.front().eps_coord ==
          doctest::Approx(kl_upper_bound(bc, K).kl_bound).epsilon(1e-10));
}

TEST_CASE("phi_of_eps") {
    const GaussianCgf g = half_mode();
    CHECK(phi_of_eps(g, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    const double eps = nu(g, 0.5);
    CHECK(phi_of_eps(g, eps) == doctest::Approx(1.0).epsilon(1e-8));
    // nondecreasing over a grid
    double prev = 0.0;
    for (int i = 0; i <= 30; ++i) {
        const double e = 0.02 * i;
        const double v = phi_of_eps(g, e);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK_THROWS_AS(phi_of_eps(BoundedCgf{}, 2.0), EpsBeyondRange);
    try {
        phi_of_eps(BoundedCgf{}, 2.0);
    } catch (const EpsBeyondRange& e) {
        CHECK(e.nu_supremum <= 1.0 + 1e-6);
    }
}

TEST_CASE("fixed point of the variational bound") {
    // sup{eps : eps <= 2K Phi(eps)} recovered by scanning phi_of_eps
    const GaussianCgf g = half_mode();
    for (double K : {0.05, 0.1, 0.2}) {
        const double bound = kl_upper_bound(g, K).kl_bound;
        double lo = 1e-12, hi = 1.5 * bound + 1e-6;
        // rho(eps) = 2K Phi(eps) - eps changes sign at the fixed point
        const auto rho = [&](double e) { return 2.0 * K * phi_of_eps(g, e) - e; };
        REQUIRE(rho(lo) > 0.0);
        REQUIRE(rho(hi) < 0.0);
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (rho(mid) > 0.0 ? lo : hi) = mid;
        }
        CHECK(std::abs(0.5 * (lo + hi) - bound) <= 1e-6);
    }
}

TEST_CASE("CGF convexity matches finite differences") {
    const GaussianCgf bc = benchmark_cgf();
    const double ts = bc.theta_star();
    for (double frac : {0.2, 0.5, 0.8}) {
        const double th = frac * ts;
        const double dd = 1e-5 * ts;
        const double fd2 = (bc.psi(th + dd) - 2.0 * bc.psi(th) + bc.psi(th - dd)) / (dd * dd);
        CHECK(std::abs(fd2 - bc.psi_second(th)) <= 1e-4 * (1.0 + std::abs(fd2)));
    }
}
