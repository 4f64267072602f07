#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <functional>

#include "revlab/ode.hpp"
#include "revlab/rng.hpp"
#include "revlab/stats.hpp"
#include "revlab/trapped_volume.hpp"

using namespace revlab;

namespace {
VolumeCurve synthetic_curve(const std::vector<double>& t,
                            const std::function<double(double)>& f) {
    VolumeCurve c;
    c.t = t;
    c.n_samples = 1000000;
    for (double x : t) {
        c.v.push_back(f(x));
        c.ci.push_back(1e-6 * f(x));
        c.hits.push_back(1);
    }
    c.total_mass = f(t.front());
    return c;
}
}  // namespace

TEST_CASE("fit_power_law recovers exact synthetic power laws") {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, 0.5 + 2.5 * i / 40.0));
    auto c1 = synthetic_curve(grid, [](double t) { return 3.0 / t; });
    const auto f1 = fit_power_law(c1, grid.front(), grid.back());
    CHECK(f1.value == doctest::Approx(-1.0).epsilon(1e-6));

    auto c2 = synthetic_curve(
        grid, [](double t) { return std::pow(t, -3.0) * (1.0 + 0.1 * std::sin(std::log(t))); });
    const auto f2 = fit_power_law(c2, grid.front(), grid.back());
    CHECK(f2.value == doctest::Approx(-3.0).epsilon(0.05 / 3.0));
}

TEST_CASE("fit_escape_rate: exact exponential and model selection") {
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(1.0 + 0.5 * i);
    auto ce = synthetic_curve(grid, [](double t) { return std::exp(-2.0 * t); });
    const auto fe = fit_escape_rate(ce, grid.front(), grid.back());
    CHECK(fe.model == DecayModel::Exponential);
    CHECK(fe.gamma == doctest::Approx(2.0).epsilon(1e-6));

    auto cp = synthetic_curve(grid, [](double t) { return 5.0 * std::pow(t, -1.0); });
    const auto fp = fit_escape_rate(cp, grid.front(), grid.back());
    CHECK(fp.model == DecayModel::PowerLaw);
    CHECK(fp.gamma == 0.0);
}

TEST_CASE("cylindrical curve: V(0) mass, monotonicity within CI, slope") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 3.0);
    std::vector<double> grid = {0.0};
    for (int i = 0; i <= 12; ++i) grid.push_back(10.0 * std::pow(100.0, i / 12.0));
    const auto c = estimate_volume_curve(m, grid, 100000, 7, 0);

    // V(0) equals the total mass over B
    CHECK(c.v[0] == doctest::Approx(liouville_total_mass(m)));
    CHECK(c.total_mass == doctest::Approx(sphere_volume(1) * sphere_volume(1) *
                                          liouville_radial_mass(m, -3, 3)));

    // monotone within CI slack
    for (std::size_t i = 0; i + 1 < c.t.size(); ++i)
        for (std::size_t j = i + 1; j < c.t.size(); ++j)
            CHECK(c.v[j] <= c.v[i] + c.ci[i] + c.ci[j]);

    const auto pf = fit_power_law(c, 10.0, 1000.0);
    CHECK(pf.value == doctest::Approx(-1.05).epsilon(0.18 / 1.05));

    // escape-rate classifier picks the power law (gamma = 0)
    const auto rf = fit_escape_rate(c, 10.0, 1000.0);
    CHECK(rf.model == DecayModel::PowerLaw);
    CHECK(rf.gamma == 0.0);
}

TEST_CASE("volume curve is reproducible and worker-count independent") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 3.0);
    std::vector<double> grid = {0.0, 1.0, 5.0, 25.0};
    const auto a = estimate_volume_curve(m, grid, 20000, 123, 1);
    const auto b = estimate_volume_curve(m, grid, 20000, 123, 2);
    const auto c = estimate_volume_curve(m, grid, 20000, 123, 0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(a.hits[i] == b.hits[i]);
        CHECK(a.hits[i] == c.hits[i]);
        CHECK(a.v[i] == b.v[i]);
    }
}

TEST_CASE("B-independence: larger B delays, never shrinks, the volume") {
    // V_{B'}(t + 2T) <= V_B(t) + CI slack for some small shift T
    auto p = Profile::cylindrical();
    Manifold small_b = Manifold::with_b_radius(p, 2, 3.0);
    Manifold big_b = Manifold::with_b_radius(p, 2, 4.5);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(5.0 + 2.5 * i);
    const auto vs = estimate_volume_curve(small_b, grid, 150000, 9, 0);
    const auto vb = estimate_volume_curve(big_b, grid, 150000, 10, 0);

    bool found_shift = false;
    for (double T : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        bool ok = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t_shifted = grid[i] + 2.0 * T;
            if (t_shifted > grid.back()) break;
            double vbig;
            try {
                vbig = interpolate_volume(vb, t_shifted);
            } catch (...) {
                continue;
            }
            if (vbig > interpolate_volume(vs, grid[i]) + 3.0 * (vs.ci[i] + vb.ci[i])) {
                ok = false;
                break;
            }
        }
        if (ok) {
            found_shift = true;
            break;
        }
    }
    CHECK(found_shift);
}

TEST_CASE("lower bound when K is nonempty: V >= c exp(-2(d-1) Lambda t)") {
    Manifold m(Profile::neck(1.0), 2, 2.0, 2.2);
    std::vector<double> grid;
    for (double t = 1.0; t <= 10.01; t += 1.0) grid.push_back(t);
    const auto c = estimate_volume_curve(m, grid, 300000, 19, 0);
    const auto lf = estimate_lambda_max(m, 10.0, 300000, 21, 0);
    // fit c0 on the first point, then check the bound along the window
    const double rate = 2.0 * (m.dim() - 1) * lf.lambda;
    const double c0 = c.v.front() / std::exp(-rate * grid.front());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (c.v[i] <= 0) continue;
        CHECK(c.v[i] + c.ci[i] >= 0.5 * c0 * std::exp(-rate * grid[i]));
    }
}

TEST_CASE("reduced sampler equals full-coordinate brute force") {
    // full (r, theta, rho, eta) integration with uniform S*M sampling
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 3.0);
    const double t = 50.0;
    const std::size_t n = 100000;
    const LiouvilleSampler sampler(m);

    std::size_t reduced_hits = 0, full_hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(77, i);
        const auto s = sampler.draw(rng);
        const double exit = forward_exit_time(m.profile(), m.r1(), s, t);
        if (!(exit <= t)) ++reduced_hits;
    }
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(77, i);  // same substreams -> same (r, angle) draws
        const auto s = sampler.draw(rng);
        // full coordinates: theta uniform (dropped), eta = +-sqrt(p0),
        // integrate (r, rho, theta) with theta' = eta / alpha^2
        struct Full {
            const Profile* p;
            double eta;
            void operator()(const std::array<double, 3>& y, std::array<double, 3>& dy) const {
                const auto j = p->eval(y[0]);
                dy[0] = y[1];
                dy[1] = j.d1 * eta * eta / (j.value * j.value * j.value);
                dy[2] = eta / (j.value * j.value);
            }
        };
        Rng aux(78, i);
        const double eta = (aux.uniform() < 0.5 ? -1.0 : 1.0) * std::sqrt(s.p0);
        Full rhs{&m.profile(), eta};
        StepControl ctl;
        auto stepper = make_dopri5<double, 3>(rhs, ctl);
        stepper.start({s.r, s.rho, aux.uniform(0, 2 * M_PI)}, 0.0);
        stepper.solve_to(t);
        if (std::abs(stepper.state()[0]) <= m.r1()) ++full_hits;
    }
    const auto wr = wilson_interval(reduced_hits, n);
    const auto wf = wilson_interval(full_hits, n);
    // joint CI overlap
    CHECK(wr.lo <= wf.hi + 1e-12);
    CHECK(wf.lo <= wr.hi + 1e-12);
}

TEST_CASE("cylinder sandwich: slow strip is trapped; midpoints have small rho") {
    auto p = Profile::cylindrical();
    const double r1 = 3.0;
    for (double t : {20.0, 60.0}) {
        // every sampled point of {|r|<=1, |rho|<=1/t} lies in T(t)
        Rng rng(31);
        for (int i = 0; i < 200; ++i) {
            const auto s = state_on_sphere(p, rng.uniform(-1.0, 1.0),
                                           rng.uniform(-1.0 / t, 1.0 / t));
            const double exit = forward_exit_time(p, r1, s, t);
            CHECK(!(exit <= t));
        }
        // midpoints of 2t-trapped trajectories satisfy |rho| <= 4/t + tol
        Manifold m = Manifold::with_b_radius(p, 2, r1);
        const LiouvilleSampler sampler(m);
        int found = 0;
        for (std::size_t i = 0; i < 200000 && found < 150; ++i) {
            Rng rng2(33, i);
            const auto s = sampler.draw(rng2);
            const double exit = forward_exit_time(p, r1, s, 2.0 * t);
            if (exit <= 2.0 * t) continue;
            ++found;
            const auto mid = flow(p, s, t);
            CHECK(std::abs(mid.rho) <= 4.0 / t + 1e-6);
        }
        CHECK(found >= 100);
    }
}

TEST_CASE("degenerate island scalings (Lemma-style exponents)") {
    Manifold m = Manifold::with_b_radius(Profile::degenerate(2), 2, 0.3);
    const auto isl = island_scaling(m, {10, 20, 40, 80, 160, 300}, 0.3);
    CHECK(isl.exponent_r == doctest::Approx(-1.0).epsilon(0.2));
    CHECK(isl.exponent_rho == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("ehrenfest time") {
    CHECK(ehrenfest_time(std::exp(2.0), 1.0) == doctest::Approx(1.0));
    CHECK(ehrenfest_time(std::exp(4.0), 2.0) == doctest::Approx(1.0));
    CHECK(ehrenfest_time(1.0 + 1e-9, 1.0) == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
    CHECK_THROWS(ehrenfest_time(10.0, 0.0));
    CHECK_THROWS(ehrenfest_time(0.5, 1.0));
}

TEST_CASE("weyl exponent m(beta, gamma)") {
    CHECK(weyl_exponent_m(2, 0.1, 0.5, 1.0) == doctest::Approx(0.6));
    CHECK(weyl_exponent_m(2, 0.3, 0.5, 1.0) == doctest::Approx(0.75));
    for (double beta : {0.0, 0.2, 0.7, 2.0})
        CHECK(weyl_exponent_m(2, beta, 0.0, 1.0) == doctest::Approx(1.0));
    // continuity at the knee beta = gamma/2
    const double gamma = 0.8, lam = 1.3;
    CHECK(weyl_exponent_m(3, gamma / 2 - 1e-12, gamma, lam) ==
          doctest::Approx(weyl_exponent_m(3, gamma / 2 + 1e-12, gamma, lam)).epsilon(1e-9));
    CHECK_THROWS(weyl_exponent_m(2, 0.1, 0.5, 0.0));
}

TEST_CASE("weyl exponent m'(beta, delta)") {
    CHECK(weyl_exponent_mprime(2, 0.0, 0.5) == doctest::Approx(0.0));
    CHECK(weyl_exponent_mprime(2, 0.25, 0.5) == doctest::Approx(0.5));
    CHECK(weyl_exponent_mprime(2, 50.0, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("exponent curve invariants: monotone in gamma, constant past knee") {
    std::vector<double> betas;
    for (int i = 0; i <= 50; ++i) betas.push_back(i * 0.02);
    const auto c1 = exponent_curve(2, 0.4, 1.0, 0.5, betas);
    const auto c2 = exponent_curve(2, 0.8, 1.0, 0.5, betas);
    for (std::size_t i = 0; i < betas.size(); ++i) CHECK(c2.m[i] <= c1.m[i] + 1e-12);
    for (std::size_t i = 0; i < betas.size(); ++i)
        if (betas[i] >= 0.2)
            CHECK(c1.m[i] == doctest::Approx(c1.m.back()));
}

TEST_CASE("weyl_bound_rhs: flat curve selects the first branch") {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.1 + i * 0.5);
    const double v0 = 2.5;
    auto flat = synthetic_curve(grid, [&](double) { return v0; });
    const double R = 100.0;
    const double val = weyl_bound_rhs(2, R, 1.0, 0.1, flat, 0.5);
    CHECK(val == doctest::Approx(R * v0));
}

TEST_CASE("weyl_bound_rhs matches the m-exponent on synthetic exponential curves") {
    // V = exp(-gamma t): log(value)/log R -> d-1 + (m - (d-1)) as R grows
    const double gamma = 0.8, lam = 1.0;
    std::vector<double> grid;
    for (int i = 0; i <= 400; ++i) grid.push_back(0.05 + i * 0.05);
    auto ve = synthetic_curve(grid, [&](double t) { return std::exp(-gamma * t); });
    for (double beta : {0.1, 0.3, 0.6}) {
        const double R1 = 1e4, R2 = 1e6;
        const double s = std::log(weyl_bound_rhs(2, R2, beta, 0.0, ve, lam) /
                                  weyl_bound_rhs(2, R1, beta, 0.0, ve, lam)) /
                         std::log(R2 / R1);
        CHECK(s == doctest::Approx(weyl_exponent_m(2, beta, gamma, lam)).epsilon(0.02));
    }
}

TEST_CASE("decay envelope branches and knee continuity") {
    const double R = std::exp(10.0);
    CHECK(decay_envelope(5.0, R, 1.0, 1.0, 0.0, 0.3) == doctest::Approx(std::exp(-2.5)));
    CHECK(decay_envelope(20.0, R, 1.0, 1.0, 0.0, 0.3) == doctest::Approx(std::exp(-5.0)));
    const double te2 = 2.0 * ehrenfest_time(R, 1.0);
    CHECK(decay_envelope(te2 - 1e-9, R, 1.0, 1.0, 0.0, 0.3) ==
          doctest::Approx(decay_envelope(te2 + 1e-9, R, 1.0, 1.0, 0.0, 0.3)).epsilon(1e-6));
    CHECK_THROWS(decay_envelope(0.1, R, 1.0, 1.0, 0.0, 1.0));
}

TEST_CASE("estimate_volume_curve input validation") {
    Manifold m = Manifold::with_b_radius(Profile::cylindrical(), 2, 3.0);
    CHECK_THROWS(estimate_volume_curve(m, {}, 10000, 1));
    CHECK_THROWS(estimate_volume_curve(m, {0.0, 1.0}, 10, 1));
    CHECK_THROWS(estimate_volume_curve(m, {1.0, 0.5}, 10000, 1));
}
