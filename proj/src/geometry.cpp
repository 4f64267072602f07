#include "revlab/geometry.hpp"

#include <cmath>
#include <sstream>

#include "revlab/errors.hpp"
#include "revlab/rng.hpp"

namespace revlab {

namespace {

// One polynomial segment of the profile on [lo, hi], parametrized by
// x = (r - lo)/(hi - lo):  alpha(r) = a(x), alpha' = a'(x)/w, alpha'' = a''(x)/w^2.
struct Segment {
    double lo, hi;
    Poly a, da, dda;  // da/dda are d/dx derivatives of a
};

Segment make_segment(double lo, double hi, Poly a) {
    Poly da = a.derivative();
    Poly dda = da.derivative();
    return Segment{lo, hi, std::move(a), std::move(da), std::move(dda)};
}

}  // namespace

struct Profile::Impl {
    std::string family;
    double end_radius = 0.0;
    double trapping_radius = 0.0;
    std::vector<Segment> segments;  // covering [0, end_radius], sorted
    std::function<ProfileJet(double)> custom;
    std::uint64_t hash = 0;

    ProfileJet eval(double r) const {
        const double s = r < 0.0 ? -1.0 : 1.0;
        const double x = std::abs(r);
        if (!segments.empty() || !custom) {
            if (x >= end_radius) return {x, s, 0.0};
            for (const auto& seg : segments) {
                if (x <= seg.hi || &seg == &segments.back()) {
                    const double w = seg.hi - seg.lo;
                    const double u = (x - seg.lo) / w;
                    return {seg.a(u), s * seg.da(u) / w, seg.dda(u) / (w * w)};
                }
            }
        }
        ProfileJet j = custom(r);
        return j;
    }
};

namespace {

// Monotone C^2 blend of a left branch into the Euclidean branch alpha = r on
// [rL, rR].  The derivative is prescribed in three closed-form polynomial
// segments: a fast smoothstep window from the left slope down to a constant c,
// the constant plateau, and a smoothstep ramp up to slope 1.  c is solved from
// the integral constraint alpha(rR) = rR; c > 0 guarantees the sign condition
// r alpha' > 0 on the open blend.
//
// left_slope(r) must be a polynomial in r, nonnegative on [rL, rR], matching
// alpha' of the left branch to second order at rL.
std::vector<Segment> monotone_blend(double rL, double vL, const Poly& left_slope, double rR) {
    const Poly S = smoothstep_quintic();
    const double rise = rR - vL;
    const double width = rR - rL;
    const double d2 = std::min(1.0, width / 4.0);

    double d1 = std::min(1.0, width / 3.0);
    double c = -1.0;
    for (int tries = 0; tries < 60; ++tries) {
        // Q = int_{rL}^{rL+d1} left_slope * (1 - S) dr, exactly.
        Poly p1 = left_slope.compose_affine(rL, d1);  // in x on [0,1]
        Poly q = p1 * (Poly::constant(1.0) - S);
        const double Q = q.integral01() * d1;
        const double denom = width - 0.5 * d1 - 0.5 * d2;
        c = (rise - Q - 0.5 * d2) / denom;
        if (c >= 0.05) break;
        d1 *= 0.5;
        c = -1.0;
    }
    if (c <= 0.0)
        throw NumericalError("profile blend: no admissible plateau slope (sign condition)");

    const double k1 = rL + d1;
    const double k2 = rR - d2;

    Poly p1 = left_slope.compose_affine(rL, d1);
    Poly da1 = p1 * (Poly::constant(1.0) - S) + S * c;        // alpha' on seg1, in x
    Poly a1 = da1.antiderivative() * d1 + Poly::constant(vL); // alpha on seg1

    const double v1 = a1(1.0);
    Poly a2{v1, c * (k2 - k1)};  // constant slope plateau

    const double v2 = a2(1.0);
    Poly da3 = Poly::constant(c) + S * (1.0 - c);
    Poly a3 = da3.antiderivative() * d2 + Poly::constant(v2);

    std::vector<Segment> segs;
    segs.push_back(make_segment(rL, k1, std::move(a1)));
    segs.push_back(make_segment(k1, k2, std::move(a2)));
    segs.push_back(make_segment(k2, rR, std::move(a3)));
    return segs;
}

std::shared_ptr<const Profile::Impl> build_impl(std::string family, double end_radius,
                                                double trapping_radius,
                                                std::vector<Segment> segments) {
    auto impl = std::make_shared<Profile::Impl>();
    impl->family = std::move(family);
    impl->end_radius = end_radius;
    impl->trapping_radius = trapping_radius;
    impl->segments = std::move(segments);
    impl->hash = fnv1a_str(impl->family);
    impl->hash = fnv1a(&impl->end_radius, sizeof(double), impl->hash);
    for (const auto& s : impl->segments)
        impl->hash = fnv1a(s.a.coeffs().data(), s.a.coeffs().size() * sizeof(double), impl->hash);
    return impl;
}

}  // namespace

Profile Profile::cylindrical() {
    std::vector<Segment> segs;
    segs.push_back(make_segment(0.0, 2.0, Poly::constant(1.0)));
    auto blend = monotone_blend(2.0, 1.0, Poly::constant(0.0), 4.0);
    for (auto& s : blend) segs.push_back(std::move(s));
    return Profile(build_impl("cylindrical", 4.0, 2.0, std::move(segs)));
}

Profile Profile::degenerate(int n) {
    if (n < 2) throw ConfigError("degenerate profile requires n >= 2");
    const auto un = static_cast<std::size_t>(n);
    // cap: 1 + r^{2n}/2 on [0, 1]
    Poly cap = Poly::constant(1.0) + Poly::monomial(2 * un, 0.5);
    Poly cap_slope = cap.derivative();  // n r^{2n-1}
    std::vector<Segment> segs;
    segs.push_back(make_segment(0.0, 1.0, cap.compose_affine(0.0, 1.0)));
    auto blend = monotone_blend(1.0, cap(1.0), cap_slope, 4.0);
    for (auto& s : blend) segs.push_back(std::move(s));
    return Profile(build_impl("degenerate(" + std::to_string(n) + ")", 4.0, 0.0, std::move(segs)));
}

Profile Profile::neck(double a) {
    if (!(a > 0.0)) throw ConfigError("neck profile requires a > 0");
    Poly cap = Poly::constant(1.0) + Poly::monomial(2, 0.5 * a);
    Poly cap_slope = cap.derivative();  // a r
    const double rL = 0.5;
    std::vector<Segment> segs;
    segs.push_back(make_segment(0.0, rL, cap.compose_affine(0.0, rL)));
    auto blend = monotone_blend(rL, cap(rL), cap_slope, 2.0);
    for (auto& s : blend) segs.push_back(std::move(s));
    std::ostringstream name;
    name << "neck(" << a << ")";
    return Profile(build_impl(name.str(), 2.0, 0.0, std::move(segs)));
}

Profile Profile::custom(std::function<ProfileJet(double)> jet, double end_radius,
                        std::string name) {
    auto impl = std::make_shared<Impl>();
    impl->family = "custom:" + name;
    impl->end_radius = end_radius;
    impl->trapping_radius = end_radius;  // unknown; conservative
    impl->custom = std::move(jet);
    impl->hash = fnv1a_str(impl->family);
    return Profile(std::move(impl));
}

ProfileJet Profile::eval(double r) const { return impl_->eval(r); }
double Profile::end_radius() const { return impl_->end_radius; }
double Profile::trapping_radius() const { return impl_->trapping_radius; }
const std::string& Profile::family() const { return impl_->family; }
std::uint64_t Profile::hash() const { return impl_->hash; }

Manifold::Manifold(Profile profile, int dim, double r0, double r1)
    : profile_(std::move(profile)), dim_(dim), r0_(r0), r1_(r1) {
    if (dim < 2) throw ConfigError("manifold: d >= 2 required");
    const double C = profile_.end_radius();
    if (!(C > 0.0)) throw ConfigError("manifold: end radius must be positive");
    if (!(r0 >= C)) throw ConfigError("manifold: r0 >= end radius required");
    if (!(r1 > r0)) throw ConfigError("manifold: r1 > r0 required");
}

Manifold Manifold::with_b_radius(Profile profile, int dim, double r1) {
    if (dim < 2) throw ConfigError("manifold: d >= 2 required");
    if (!(r1 >= profile.trapping_radius()))
        throw ConfigError("manifold: B must contain the trapping region");
    Manifold m;
    m.profile_ = std::move(profile);
    m.dim_ = dim;
    m.r0_ = m.profile_.end_radius();
    m.r1_ = r1;
    return m;
}

std::string Manifold::describe() const {
    std::ostringstream os;
    os << profile_.family() << " d=" << dim_ << " r0=" << r0_ << " r1=" << r1_;
    return os.str();
}

ValidationReport validate_profile(const Manifold& m) {
    const Profile& p = m.profile();
    const double C = p.end_radius();
    ValidationReport report;

    auto run_check = [&](const std::string& name, double lo, double hi, int samples,
                         auto&& residual_fn, double tol) {
        ValidationEntry e;
        e.name = name;
        e.pass = true;
        for (int i = 0; i <= samples; ++i) {
            const double r = lo + (hi - lo) * static_cast<double>(i) / samples;
            const double res = residual_fn(r);
            if (res > e.residual) {
                e.residual = res;
                e.witness_r = r;
            }
        }
        e.pass = e.residual <= tol;
        report.entries.push_back(e);
    };

    run_check("positivity", -C - 2.0, C + 2.0, 4096,
              [&](double r) { return std::max(0.0, 1e-12 - p.eval(r).value); }, 0.0);

    run_check("euclidean_end", C, C + 6.0, 2048,
              [&](double r) {
                  const auto j = p.eval(r);
                  const auto jm = p.eval(-r);
                  double res = std::abs(j.value - r) + std::abs(j.d1 - 1.0) + std::abs(j.d2);
                  res += std::abs(jm.value - r) + std::abs(jm.d1 + 1.0) + std::abs(jm.d2);
                  return res;
              },
              1e-12);

    run_check("sign_condition", 0.0, C + 2.0, 8192,
              [&](double r) {
                  const double fwd = std::max(0.0, -p.eval(r).d1);
                  const double bwd = std::max(0.0, p.eval(-r).d1);
                  return std::max(fwd, bwd);
              },
              1e-12);

    // C^2 consistency: central differences of alpha reproduce alpha', and of
    // alpha' reproduce alpha'', with O(step^2) error.  The alpha'' probe uses
    // a smaller step because the blend's fourth derivative is large near the
    // segment knots.
    run_check("c2_consistency", -C - 1.5, C + 1.5, 3000,
              [&](double r) {
                  const double h1 = 1e-4;
                  const auto j = p.eval(r);
                  const double fd1 =
                      (p.eval(r + h1).value - p.eval(r - h1).value) / (2.0 * h1);
                  const double h2 = 4e-6;
                  const double fd2 = (p.eval(r + h2).d1 - p.eval(r - h2).d1) / (2.0 * h2);
                  // normalized residual: 1.0 = at tolerance
                  return std::max(std::abs(fd1 - j.d1) / 5e-5, std::abs(fd2 - j.d2) / 2e-4);
              },
              1.0);

    return report;
}

std::vector<Interval> critical_set(const Profile& p, double lo, double hi, double tol,
                                   double step) {
    std::vector<Interval> out;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    bool inside = false;
    double start = 0.0, last = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const bool crit = std::abs(p.eval(r).d1) <= tol;
        if (crit && !inside) {
            inside = true;
            start = r;
        }
        if (crit) last = r;
        if (!crit && inside) {
            inside = false;
            out.push_back({start, last});
        }
    }
    if (inside) out.push_back({start, last});
    return out;
}

double liouville_weight(const Manifold& m, double r) {
    return std::pow(m.profile().eval(r).value, m.dim() - 1);
}

namespace {
// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGLx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                            0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                            0.9445750230732326, 0.9894009349916499};
constexpr double kGLw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                            0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                            0.0622535239386479, 0.0271524594117541};

template <class F>
double gauss16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i) {
        s += kGLw[i] * (f(mid + half * kGLx[i]) + f(mid - half * kGLx[i]));
    }
    return s * half;
}
}  // namespace

double liouville_radial_mass(const Manifold& m, double a, double b) {
    // Subdivide so that segment boundaries and +-C never sit inside a panel.
    const int panels_per_unit = 8;
    const int n = std::max(16, static_cast<int>((b - a) * panels_per_unit));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x0 = a + (b - a) * i / n;
        const double x1 = a + (b - a) * (i + 1) / n;
        total += gauss16([&](double r) { return liouville_weight(m, r); }, x0, x1);
    }
    return total;
}

double sphere_volume(int dim_minus_1) {
    const double d = dim_minus_1 + 1;
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

double liouville_total_mass(const Manifold& m) {
    const double sd = sphere_volume(m.dim() - 1);
    return sd * sd * liouville_radial_mass(m, -m.r1(), m.r1());
}

}  // namespace revlab
