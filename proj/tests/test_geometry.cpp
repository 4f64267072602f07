#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "revlab/geometry.hpp"

using namespace revlab;

TEST_CASE("cylindrical profile: plateau and Euclidean branch") {
    auto p = Profile::cylindrical();
    CHECK(p.eval(1.0).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.eval(1.0).d1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(p.eval(5.0).value == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(p.eval(5.0).d1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.eval(-5.0).d1 == doctest::Approx(-1.0).epsilon(1e-14));
    // exact closed-form branch beyond C, not a blend
    for (double r = 4.0; r < 9.0; r += 0.37) {
        CHECK(p.eval(r).value == r);
        CHECK(p.eval(r).d2 == 0.0);
    }
}

TEST_CASE("degenerate profile cap: 1 + r^{2n}/2") {
    auto p = Profile::degenerate(2);
    CHECK(p.eval(0.1).value == doctest::Approx(1.00005).epsilon(1e-9));
    CHECK(p.eval(0.0).value == doctest::Approx(1.0));
    CHECK(p.eval(1.0).value == doctest::Approx(1.5).epsilon(1e-12));
    auto p3 = Profile::degenerate(3);
    CHECK(p3.eval(0.5).value == doctest::Approx(1.0 + std::pow(0.5, 6) / 2.0).epsilon(1e-12));
    CHECK_THROWS(Profile::degenerate(1));
}

TEST_CASE("neck profile: quadratic cap") {
    auto p = Profile::neck(1.0);
    CHECK(p.eval(0.0).value == doctest::Approx(1.0));
    CHECK(p.eval(0.0).d1 == doctest::Approx(0.0));
    CHECK(p.eval(0.0).d2 == doctest::Approx(1.0));
    auto p2 = Profile::neck(2.0);
    CHECK(p2.eval(0.0).d2 == doctest::Approx(2.0));
    CHECK(p2.eval(0.3).value == doctest::Approx(1.0 + 0.09).epsilon(1e-12));
}

TEST_CASE("validation passes across built-in families and parameter sweeps") {
    auto check_all = [](const Manifold& m) {
        const auto report = validate_profile(m);
        CHECK(report.entries.size() == 4);
        for (const auto& e : report.entries) {
            INFO(m.describe(), " ", e.name, " residual=", e.residual, " witness=", e.witness_r);
            CHECK(e.pass);
        }
    };
    check_all(Manifold(Profile::cylindrical(), 2, 4.0, 5.0));
    for (int n : {2, 3, 4}) check_all(Manifold(Profile::degenerate(n), 2, 4.0, 5.0));
    for (double a : {0.5, 1.0, 2.0}) check_all(Manifold(Profile::neck(a), 2, 2.0, 2.2));
    check_all(Manifold(Profile::degenerate(2), 3, 4.0, 6.0));
}

TEST_CASE("sign-condition violation is caught with a witness") {
    // alpha = 1 - r^2 near 0 (decreasing for r > 0), patched to |r| outside
    auto bad = Profile::custom(
        [](double r) -> ProfileJet {
            const double x = std::abs(r);
            if (x < 0.3) return {1.0 - r * r, -2.0 * r, -2.0};
            return {x, r < 0 ? -1.0 : 1.0, 0.0};
        },
        1.0, "decreasing_bump");
    const auto report = validate_profile(Manifold::with_b_radius(bad, 2, 2.0));
    bool sign_failed = false;
    for (const auto& e : report.entries) {
        if (e.name == "sign_condition") {
            sign_failed = !e.pass;
            CHECK(std::abs(e.witness_r) > 0.0);
            CHECK(std::abs(e.witness_r) <= 0.31);
        }
    }
    CHECK(sign_failed);
}

TEST_CASE("manifold invariants") {
    auto p = Profile::cylindrical();
    CHECK_THROWS(Manifold(p, 2, 3.0, 5.0));   // r0 < C
    CHECK_THROWS(Manifold(p, 2, 4.0, 4.0));   // r1 == r0
    CHECK_THROWS(Manifold(p, 1, 4.0, 5.0));   // d < 2
    CHECK_THROWS(Manifold::with_b_radius(p, 2, 1.0));  // B inside trapping region
    CHECK_NOTHROW(Manifold::with_b_radius(p, 2, 3.0));
}

TEST_CASE("critical set per family") {
    auto cyl = critical_set(Profile::cylindrical(), -4.0, 4.0);
    REQUIRE(cyl.size() == 1);
    CHECK(cyl[0].lo == doctest::Approx(-2.0).epsilon(1e-3));
    CHECK(cyl[0].hi == doctest::Approx(2.0).epsilon(1e-3));

    auto deg = critical_set(Profile::degenerate(2), -4.0, 4.0);
    REQUIRE(deg.size() == 1);
    CHECK(std::abs(deg[0].lo) < 2e-2);
    CHECK(deg[0].hi - deg[0].lo < 4e-2);  // degenerate pinch at 0

    auto nk = critical_set(Profile::neck(1.0), -2.0, 2.0);
    REQUIRE(nk.size() == 1);
    CHECK(std::abs(nk[0].lo) < 2e-4);
    CHECK(std::abs(nk[0].hi) < 2e-4);
}

TEST_CASE("critical set symmetry under r -> -r") {
    for (auto p : {Profile::cylindrical(), Profile::degenerate(3), Profile::neck(0.5)}) {
        auto c = critical_set(p, -4.5, 4.5);
        for (const auto& iv : c) {
            CHECK(iv.lo == doctest::Approx(-iv.hi).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("liouville weight examples") {
    Manifold m2(Profile::cylindrical(), 2, 4.0, 6.0);
    CHECK(liouville_weight(m2, 1.0) == doctest::Approx(1.0));
    CHECK(liouville_weight(m2, 5.0) == doctest::Approx(5.0));
    Manifold m3(Profile::degenerate(2), 3, 4.0, 6.0);
    CHECK(liouville_weight(m3, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("liouville weight matches the metric volume quadrature oracle") {
    // Riemannian volume of {|r| <= s} from 2D quadrature of sqrt(det g) for
    // d = 2, against the weight-route integral times Vol(S^1).
    Manifold m(Profile::degenerate(2), 2, 4.0, 6.0);
    const double s = 3.0;
    const int nr = 4000, nth = 16;
    double vol2d = 0.0;
    for (int i = 0; i < nr; ++i) {
        const double r = -s + 2.0 * s * (i + 0.5) / nr;
        const auto j = m.profile().eval(r);
        // metric matrix diag(1, alpha^2): sqrt(det) = alpha
        const double sqrtdet = std::sqrt(1.0 * j.value * j.value);
        for (int q = 0; q < nth; ++q) vol2d += sqrtdet * (2.0 * s / nr) * (2.0 * M_PI / nth);
    }
    const double via_weight = liouville_radial_mass(m, -s, s) * sphere_volume(1);
    CHECK(vol2d == doctest::Approx(via_weight).epsilon(1e-8));
}

TEST_CASE("total Liouville mass formula (d=2 and d=3)") {
    Manifold m2(Profile::cylindrical(), 2, 4.0, 5.0);
    const double expect2 = sphere_volume(1) * sphere_volume(1) * liouville_radial_mass(m2, -5, 5);
    CHECK(liouville_total_mass(m2) == doctest::Approx(expect2));
    CHECK(sphere_volume(1) == doctest::Approx(2.0 * M_PI));
    CHECK(sphere_volume(2) == doctest::Approx(4.0 * M_PI));
}
