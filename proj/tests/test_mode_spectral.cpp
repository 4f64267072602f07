#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "revlab/mode_spectral.hpp"
#include "revlab/plan_cache.hpp"
#include "revlab/rng.hpp"
#include "revlab/stats.hpp"
#include "revlab/tridiag.hpp"

using namespace revlab;
using cd = std::complex<double>;

TEST_CASE("mode potential: flat plateau, exact ends, degenerate center") {
    auto cyl = Profile::cylindrical();
    for (double r = -1.9; r < 1.95; r += 0.37)
        CHECK(mode_potential(cyl, 0, r) == 0.0);
    for (double r : {4.5, 6.0, 9.0})
        CHECK(mode_potential(cyl, 3, r) == doctest::Approx((9.0 - 0.25) / (r * r)).epsilon(1e-14));
    auto deg = Profile::degenerate(2);
    CHECK(mode_potential(deg, 0, 0.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("mode operators require d = 2 and enough grid points") {
    Manifold m3(Profile::cylindrical(), 3, 4.0, 5.0);
    CHECK_THROWS(build_mode_operator(m3, 0, 2.0, 1000));
    Manifold m2 = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    CHECK_THROWS(build_mode_operator(m2, 0, 2.0, 100));
}

TEST_CASE("flat-interval Dirichlet eigenvalues and grid convergence") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    const auto op1 = build_mode_operator(m, 0, 2.0, 4000);
    const auto b1 = dirichlet_eigensystem_in_range(op1, 0.0, 1500.0);
    double worst = 0.0;
    for (int j = 1; j <= 40; ++j) {
        const double exact = std::pow(j * M_PI / 4.0, 2);
        worst = std::max(worst, std::abs(b1.values[j - 1] - exact) / exact);
    }
    CHECK(worst < 1e-4);

    // second-order convergence: error ratio ~ 4 under grid doubling
    const auto op2 = build_mode_operator(m, 0, 2.0, 8001);
    const auto b2 = dirichlet_eigensystem_in_range(op2, 0.0, 300.0);
    double ratio_lo = 10.0, ratio_hi = 0.0;
    for (int j = 5; j <= 20; ++j) {
        const double exact = std::pow(j * M_PI / 4.0, 2);
        const double e1 = std::abs(b1.values[j - 1] - exact);
        const double e2 = std::abs(b2.values[j - 1] - exact);
        const double ratio = e1 / e2;
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
    }
    CHECK(ratio_lo > 3.7);
    CHECK(ratio_hi < 4.3);
}

TEST_CASE("eigenbasis residual and orthonormality") {
    Manifold m(Profile::neck(1.0), 2, 2.0, 2.2);
    const auto op = build_mode_operator(m, 2, 2.2, 2000);
    const auto b = dirichlet_eigensystem_in_range(op, 0.0, 400.0);
    REQUIRE(b.values.size() >= 5);
    for (std::size_t j = 0; j < 5; ++j) {
        Eigen::VectorXd v = b.vectors.col(static_cast<Eigen::Index>(j));
        Eigen::VectorXd pv(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            double acc = op.diag[static_cast<std::size_t>(i)] * v[i];
            if (i > 0) acc += op.offdiag[static_cast<std::size_t>(i - 1)] * v[i - 1];
            if (i + 1 < v.size()) acc += op.offdiag[static_cast<std::size_t>(i)] * v[i + 1];
            pv[i] = acc;
        }
        CHECK((pv - b.values[j] * v).norm() / v.norm() <= 1e-8 * std::max(1.0, b.values[j]));
        CHECK(v.squaredNorm() * op.grid.dr == doctest::Approx(1.0).epsilon(1e-10));
        for (std::size_t l = 0; l < j; ++l)
            CHECK(std::abs(b.vectors.col(static_cast<Eigen::Index>(l)).dot(v)) * op.grid.dr <
                  1e-10);
    }
}

TEST_CASE("symmetric profile: eigenvectors alternate parity") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    const auto op = build_mode_operator(m, 0, 2.0, 801);
    const auto b = dirichlet_eigensystem_in_range(op, 0.0, 200.0);
    const auto n = static_cast<Eigen::Index>(op.grid.n_interior);
    for (std::size_t j = 0; j < std::min<std::size_t>(b.values.size(), 10); ++j) {
        // parity of the j-th mode: even for j=0,2,..., odd for j=1,3,...
        double sym = 0.0, anti = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = b.vectors(i, static_cast<Eigen::Index>(j));
            const double bb = b.vectors(n - 1 - i, static_cast<Eigen::Index>(j));
            sym += std::abs(a - bb);
            anti += std::abs(a + bb);
        }
        if (j % 2 == 0)
            CHECK(sym < 1e-7 * anti);
        else
            CHECK(anti < 1e-7 * sym);
    }
}

TEST_CASE("1D Weyl count oracle: #{mu <= s^2}/s -> |B|/pi") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    const auto op = build_mode_operator(m, 0, 2.0, 6000);
    const double s = 50.0;
    const auto count = eigenvalue_count_below(op, s * s);
    CHECK(static_cast<double>(count) / s == doctest::Approx(4.0 / M_PI).epsilon(0.05));
}

TEST_CASE("frequency window: hand-computed example at R=25") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    const auto n = static_cast<std::size_t>(4.0 * 10.0 * 25.0 * 1.1);
    const auto wb = frequency_window(m, 25.0, 0.1, n, 0);
    std::size_t k0 = 0;
    std::size_t j_lo = 1000, j_hi = 0;
    for (const auto& e : wb.entries) {
        CHECK(e.lambda >= 22.5);
        CHECK(e.lambda <= 27.5);
        if (e.k == 0) {
            ++k0;
            j_lo = std::min(j_lo, e.j);
            j_hi = std::max(j_hi, e.j);
        }
    }
    CHECK(k0 == 7);
    CHECK(j_lo == 29);
    CHECK(j_hi == 35);
}

TEST_CASE("empty window throws") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    CHECK_THROWS(frequency_window(m, 25.0, 1e-9, 2000, 0));
}

TEST_CASE("N_R grows like R^2") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    std::vector<double> lr, ln;
    for (double R : {25.0, 50.0, 100.0}) {
        const auto n = static_cast<std::size_t>(std::ceil(4.0 * 10.0 * R * 1.1));
        const auto wb = frequency_window(m, R, 0.1, n, 0);
        lr.push_back(std::log(R));
        ln.push_back(std::log(static_cast<double>(wb.dimension)));
    }
    const auto fit = ols_linear(lr, ln);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("unitary equivalence of the half-density and divergence forms") {
    // Richardson-extrapolated eigenvalues of both discretizations agree to 1e-6
    auto p = Profile::neck(1.0);
    Manifold m = Manifold::with_b_radius(p, 2, 2.0);
    const int k = 3;
    const double L = 2.0;

    auto divergence_eigs = [&](std::size_t n) {
        const double dr = 2.0 * L / static_cast<double>(n + 1);
        std::vector<double> diag(n), off(n - 1);
        auto alpha = [&](double r) { return p.eval(r).value; };
        for (std::size_t i = 0; i < n; ++i) {
            const double r = -L + dr * static_cast<double>(i + 1);
            const double am = alpha(r - 0.5 * dr), ap = alpha(r + 0.5 * dr), ai = alpha(r);
            diag[i] = (am + ap) / (ai * dr * dr) + k * k / (ai * ai);
            if (i + 1 < n) off[i] = -ap / (std::sqrt(ai * alpha(r + dr)) * dr * dr);
        }
        return tridiag_eigs_in_range(diag, off, 0.0, 900.0, false).values;
    };
    auto half_density_eigs = [&](std::size_t n) {
        const auto op = build_mode_operator(m, k, L, n);
        return tridiag_eigs_in_range(op.diag, op.offdiag, 0.0, 900.0, false).values;
    };

    const std::size_t n1 = 4000, n2 = 2 * n1 + 1;
    const auto h1 = half_density_eigs(n1), h2 = half_density_eigs(n2);
    const auto d1 = divergence_eigs(n1), d2 = divergence_eigs(n2);
    REQUIRE(h1.size() >= 50);
    REQUIRE(d1.size() >= 50);
    double worst = 0.0;
    for (std::size_t j = 0; j < 50; ++j) {
        const double he = (4.0 * h2[j] - h1[j]) / 3.0;
        const double de = (4.0 * d2[j] - d1[j]) / 3.0;
        worst = std::max(worst, std::abs(he - de) / std::abs(de));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("propagator plan: unitarity, group law, HS identity at t=0") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    PlanOptions opts;
    opts.flat_cutoff = true;  // psi = indicator of B: t=0 algebra is exact
    const double R = 25.0;
    const auto plan = build_propagator_plan(m, R, 0.1, 2.0, opts);
    REQUIRE(plan.dimension > 0);

    // coefficient-level unitarity and group law of the phase evolution
    auto& mode = plan.modes.front();
    std::vector<cd> c(mode.mu.size());
    Rng rng(5);
    double norm0 = 0.0;
    for (auto& v : c) {
        v = cd(rng.normal(), rng.normal());
        norm0 += std::norm(v);
    }
    auto c1 = c;
    half_wave_apply(mode, c1, 1.25, plan.t_valid);
    double norm1 = 0.0;
    for (auto& v : c1) norm1 += std::norm(v);
    CHECK(std::abs(norm1 - norm0) / norm0 < 1e-12);

    auto c2 = c1;
    half_wave_apply(mode, c2, 0.5, plan.t_valid);  // U(0.5) U(1.25)
    auto c3 = c;
    half_wave_apply(mode, c3, 1.75, plan.t_valid);  // U(1.75)
    double diff = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) diff += std::norm(c2[i] - c3[i]);
    CHECK(std::sqrt(diff / norm0) < 1e-12);

    CHECK_THROWS(half_wave_apply(mode, c, plan.t_valid + 1.0, plan.t_valid));

    // || psi U(0) psi Pi ||_HS^2 = N_R for the indicator cutoff
    const auto hs0 = hs_norm_cutoff_propagator(plan, 0.0);
    CHECK(hs0.hs_squared ==
          doctest::Approx(static_cast<double>(plan.dimension)).epsilon(1e-6));
    CHECK(hs0.normalized == doctest::Approx(1.0).epsilon(1e-6));

    // t = 0 norm of a unit coefficient vector is 1
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(
        static_cast<Eigen::Index>(plan.coefficient_count()));
    a[0] = 1.0;
    CHECK(embed_and_measure(plan, a, 0.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS(embed_and_measure(plan, a, plan.t_valid + 1.0));
}

TEST_CASE("free half-wave evolution matches the continuum Fourier oracle") {
    // alpha = 1 everywhere: k=0 mode operator is the free -d^2/dr^2
    // (spectral-only test profile; the nominal end radius is never exercised)
    auto flat = Profile::custom([](double) -> ProfileJet { return {1.0, 0.0, 0.0}; }, 0.1,
                                "flat_line");
    Manifold m = Manifold::with_b_radius(flat, 2, 5.0);
    const double L = 6.0;
    const std::size_t n = 2400;
    const auto op = build_mode_operator(m, 0, L, n);
    const auto basis = dirichlet_eigensystem(op);

    const double w0 = 10.0, sigma = 0.7;
    Eigen::VectorXcd u0(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double r = op.grid.point(i);
        u0[static_cast<Eigen::Index>(i)] =
            std::exp(-r * r / (2 * sigma * sigma)) * std::cos(w0 * r);
    }

    // continuum: u(t,r) = (1/2pi) int e^{i r xi - i t |xi|} u0_hat(xi) dxi with
    // u0_hat known in closed form for the Gaussian wave packet
    auto oracle = [&](double t, double r) -> cd {
        const double lo = -w0 - 14.0 / sigma, hi = w0 + 14.0 / sigma;
        const int nq = 6000;
        cd acc = 0.0;
        const double dxi = (hi - lo) / nq;
        for (int q = 0; q <= nq; ++q) {
            const double xi = lo + q * dxi;
            const double gg = 0.5 * (std::exp(-0.5 * sigma * sigma * (xi - w0) * (xi - w0)) +
                                     std::exp(-0.5 * sigma * sigma * (xi + w0) * (xi + w0)));
            const double uhat = std::sqrt(2.0 * M_PI) * sigma * gg;
            const double wgt = (q == 0 || q == nq) ? 0.5 : 1.0;
            acc += wgt * uhat * std::exp(cd(0.0, r * xi - t * std::abs(xi)));
        }
        return acc * dxi / (2.0 * M_PI);
    };

    for (double t : {0.5, 1.0}) {
        const auto ut = evolve_grid_function(basis, u0, t);
        double err2 = 0.0, ref2 = 0.0;
        for (std::size_t i = 0; i < n; i += 3) {
            const double r = op.grid.point(i);
            const cd ex = oracle(t, r);
            err2 += std::norm(ut[static_cast<Eigen::Index>(i)] - ex);
            ref2 += std::norm(ex);
        }
        CHECK(std::sqrt(err2 / ref2) < 1e-3);
    }
}

TEST_CASE("finite propagation speed") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    const double L = 8.0;
    const std::size_t n = 3200;
    const auto op = build_mode_operator(m, 0, L, n);
    const auto basis = dirichlet_eigensystem(op);
    Eigen::VectorXcd u0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double r = op.grid.point(i);
        if (std::abs(r) < 1.0)
            u0[static_cast<Eigen::Index>(i)] = bump_cutoff(r, 1.0) * std::cos(12.0 * r);
    }
    const double norm0 = std::sqrt(u0.squaredNorm() * op.grid.dr);
    for (double t : {1.0, 3.0}) {
        const auto ut = evolve_grid_function(basis, u0, t);
        double outside2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = op.grid.point(i);
            if (std::abs(r) >= 2.0 + t)
                outside2 += std::norm(ut[static_cast<Eigen::Index>(i)]) * op.grid.dr;
        }
        CHECK(std::sqrt(outside2) / norm0 <= 1e-6);
    }
}

TEST_CASE("energy localization: capture defect small and decreasing in R") {
    Manifold m(Profile::neck(1.0), 2, 2.0, 2.2);
    PlanOptions opts;
    opts.capture_rel_width = 0.25;  // the energy-window nesting for eps' = 0.1
    const auto p50 = build_propagator_plan(m, 50.0, 0.1, 2.0, opts);
    const auto p80 = build_propagator_plan(m, 80.0, 0.1, 2.0, opts);
    CHECK(max_capture_defect(p50) <= 1e-3);
    CHECK(max_capture_defect(p80) <= max_capture_defect(p50));
}

TEST_CASE("plan cache round trip is bit-exact") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 2.0);
    PlanOptions opts;
    opts.cache_dir = "/tmp/revlab_test_cache";
    const auto plan = build_propagator_plan(m, 20.0, 0.1, 1.5, opts);
    const auto again = build_propagator_plan(m, 20.0, 0.1, 1.5, opts);
    REQUIRE(plan.modes.size() == again.modes.size());
    CHECK(plan.dimension == again.dimension);
    for (std::size_t i = 0; i < plan.modes.size(); ++i) {
        CHECK(plan.modes[i].mu == again.modes[i].mu);
        REQUIRE(plan.modes[i].embed.size() == again.modes[i].embed.size());
        CHECK((plan.modes[i].embed - again.modes[i].embed).cwiseAbs().maxCoeff() == 0.0);
        CHECK((plan.modes[i].gram - again.modes[i].gram).cwiseAbs().maxCoeff() == 0.0);
    }
}
