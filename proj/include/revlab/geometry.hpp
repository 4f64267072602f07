#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "revlab/poly.hpp"

namespace revlab {

// Value and first two derivatives of the warp profile at a point.
struct ProfileJet {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// Radius profile alpha(r) of a surface of revolution with Euclidean ends:
// alpha(r) = |r| exactly for |r| >= end_radius().  Immutable and cheap to copy.
class Profile {
public:
    // alpha = 1 on [-2,2], blended into |r| on [2,4].
    static Profile cylindrical();
    // alpha = 1 + r^{2n}/2 on [-1,1] (n >= 2), blended into |r| on [1,4].
    static Profile degenerate(int n);
    // alpha = 1 + a r^2/2 on [-1/2,1/2] (a > 0), blended into |r| on [1/2,2].
    // Carries a single nondegenerate hyperbolic trapped orbit at r = 0 with
    // expansion rate sqrt(a).
    static Profile neck(double a);
    // Arbitrary evaluator for tests; the caller vouches for the end condition.
    static Profile custom(std::function<ProfileJet(double)> jet, double end_radius,
                          std::string name);

    ProfileJet eval(double r) const;
    double operator()(double r) const { return eval(r).value; }

    double end_radius() const;     // C: alpha(r) = |r| for |r| >= C
    double trapping_radius() const;  // sup |r| over the built-in critical set
    const std::string& family() const;
    std::uint64_t hash() const;

    struct Impl;

private:
    explicit Profile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

// M = R_r x S^{d-1} with metric dr^2 + alpha(r)^2 g0.  B = {|r| <= r1}.
class Manifold {
public:
    // Strict constructor: r1 > r0 >= end radius C.
    Manifold(Profile profile, int dim, double r0, double r1);
    // B chosen inside the blend region (r1 may be below C, but must still
    // enclose the trapping region).  r0 is pinned to C.
    static Manifold with_b_radius(Profile profile, int dim, double r1);

    const Profile& profile() const { return profile_; }
    int dim() const { return dim_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }

    std::string describe() const;

private:
    Manifold() = default;
    Profile profile_ = Profile::cylindrical();
    int dim_ = 2;
    double r0_ = 0.0;
    double r1_ = 0.0;
};

struct ValidationEntry {
    std::string name;
    bool pass = false;
    double witness_r = 0.0;  // worst sampled point
    double residual = 0.0;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

// Checks positivity, the Euclidean end condition, the sign condition
// (+-alpha' >= 0 for +-r >= 0) and C^2 consistency of the evaluator on dense
// sample grids.  Failures are report entries, never exceptions.
ValidationReport validate_profile(const Manifold& m);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// Maximal closed intervals (to grid resolution) inside [lo, hi] where
// |alpha'| <= tol.  The trapped set is {r in these intervals, rho = 0}.
std::vector<Interval> critical_set(const Profile& p, double lo, double hi,
                                   double tol = 1e-10, double step = 1e-4);

// Radial Liouville density alpha(r)^{d-1}.
double liouville_weight(const Manifold& m, double r);

// Exact integral of alpha(r)^{d-1} over [a, b] (Gauss-Legendre on subintervals).
double liouville_radial_mass(const Manifold& m, double a, double b);

// Total Liouville volume of S*M over B: Vol(S^{d-1})^2 * int alpha^{d-1} dr.
double liouville_total_mass(const Manifold& m);

// Volume of the unit (d-1)-sphere.
double sphere_volume(int dim_minus_1);

}  // namespace revlab
