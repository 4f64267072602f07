#include "revlab/resonances.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>

#include "revlab/errors.hpp"
#include "revlab/mode_spectral.hpp"
#include "revlab/ode.hpp"
#include "revlab/parallel.hpp"
#include "revlab/poly.hpp"
#include "revlab/rng.hpp"
#include "revlab/special_functions.hpp"

namespace revlab {

namespace {
using cd = std::complex<double>;
const cd kI{0.0, 1.0};
}  // namespace

void ScalingProfile::eval(double s, double& f, double& fp) const {
    static const Poly S = smoothstep_quintic();
    static const Poly dS = S.derivative();
    const double t = std::tan(theta);
    if (s <= r_start) {
        f = 0.0;
        fp = 0.0;
    } else if (s >= 2.0 * r_start) {
        f = s * t;
        fp = t;
    } else {
        const double x = (s - r_start) / r_start;
        f = s * t * S(x);
        fp = t * (S(x) + s * dS(x) / r_start);
    }
}

void ScalingProfile::eval_signed(double r, double& g, double& gp) const {
    double f, fp;
    eval(std::abs(r), f, fp);
    g = r < 0.0 ? -f : f;
    gp = fp;  // even in r
}

ScalingProfile make_scaling_profile(double theta, double r1) {
    if (!(theta >= 0.0 && theta < 0.25 * M_PI))
        throw ConfigError("scaling: theta in [0, pi/4) required");
    ScalingProfile s;
    s.theta = theta;
    s.r_start = r1;
    return s;
}

ComplexScaledOperator build_scaled_operator(const Manifold& m, int k,
                                            const ScalingProfile& scaling, double half_length,
                                            std::size_t n) {
    const double C = m.profile().end_radius();
    if (scaling.r_start < C)
        throw ConfigError(
            "build_scaled_operator: scaling must start in the exact Euclidean region "
            "(r1 >= end radius)");
    if (half_length <= 2.0 * scaling.r_start)
        throw ConfigError("build_scaled_operator: domain must contain the scaling ramp");

    ComplexScaledOperator op;
    op.k = k;
    op.theta = scaling.theta;
    op.half_length = half_length;
    op.n = n;
    op.dr = 2.0 * half_length / static_cast<double>(n + 1);
    op.diag.resize(n);
    op.offdiag.resize(n - 1);

    auto gamma_prime = [&](double r) {
        double g, gp;
        scaling.eval_signed(r, g, gp);
        return cd(1.0, gp);
    };
    auto potential = [&](double r) -> cd {
        double g, gp;
        scaling.eval_signed(r, g, gp);
        if (g == 0.0) return cd(mode_potential(m.profile(), k, r), 0.0);
        const cd z(r, g);
        const double kk = static_cast<double>(k) * static_cast<double>(k);
        return (kk - 0.25) / (z * z);
    };

    const double inv2 = 1.0 / (op.dr * op.dr);
    auto point = [&](std::size_t i) {
        return -half_length + op.dr * static_cast<double>(i + 1);
    };
    std::vector<cd> w(n), ahalf(n + 1);
    for (std::size_t i = 0; i < n; ++i) w[i] = gamma_prime(point(i));
    for (std::size_t i = 0; i <= n; ++i) {
        const double mid = -half_length + op.dr * (static_cast<double>(i) + 0.5);
        ahalf[i] = 1.0 / gamma_prime(mid);
    }
    for (std::size_t i = 0; i < n; ++i) {
        op.diag[i] = (ahalf[i] + ahalf[i + 1]) / w[i] * inv2 + potential(point(i));
        if (i + 1 < n)
            op.offdiag[i] = -ahalf[i + 1] / std::sqrt(w[i] * w[i + 1]) * inv2;
    }
    return op;
}

namespace {

// Tridiagonal apply: y = T x.
void tri_apply(const ComplexScaledOperator& op, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    const auto n = static_cast<Eigen::Index>(op.n);
    y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        cd v = op.diag[static_cast<std::size_t>(i)] * x[i];
        if (i > 0) v += op.offdiag[static_cast<std::size_t>(i - 1)] * x[i - 1];
        if (i + 1 < n) v += op.offdiag[static_cast<std::size_t>(i)] * x[i + 1];
        y[i] = v;
    }
}

// LU factorization of (T - sigma I) via LAPACK zgttrf, reused across solves.
struct ShiftedSolver {
    std::vector<cd> dl, d, du, du2;
    std::vector<lapack_int> ipiv;
    lapack_int n = 0;

    ShiftedSolver(const ComplexScaledOperator& op, cd sigma) {
        n = static_cast<lapack_int>(op.n);
        d.assign(op.diag.begin(), op.diag.end());
        for (auto& v : d) v -= sigma;
        dl.assign(op.offdiag.begin(), op.offdiag.end());
        du.assign(op.offdiag.begin(), op.offdiag.end());
        du2.resize(static_cast<std::size_t>(std::max<lapack_int>(0, n - 2)));
        ipiv.resize(static_cast<std::size_t>(n));
        const lapack_int info = LAPACKE_zgttrf(n, dl.data(), d.data(), du.data(), du2.data(),
                                               ipiv.data());
        if (info != 0) throw NumericalError("zgttrf failed, info=" + std::to_string(info));
    }

    void solve(Eigen::VectorXcd& b) const {
        const lapack_int info =
            LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl.data(), d.data(), du.data(),
                           du2.data(), ipiv.data(), b.data(), n);
        if (info != 0) throw NumericalError("zgttrs failed, info=" + std::to_string(info));
    }
};

struct RitzPair {
    cd lambda;     // eigenvalue of T (omega^2 plane)
    double residual = 0.0;
    Eigen::VectorXcd vector;
};

// Shift-invert Arnoldi around sigma; returns Ritz pairs with small residual.
std::vector<RitzPair> shift_invert_eigs(const ComplexScaledOperator& op, cd sigma,
                                        int krylov_dim, double residual_tol) {
    const auto n = static_cast<Eigen::Index>(op.n);
    const int m = std::min<int>(krylov_dim, static_cast<int>(op.n) - 2);
    ShiftedSolver solver(op, sigma);

    Eigen::MatrixXcd V(n, m + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);

    // deterministic start vector
    Rng rng(0xabcdef12u ^ static_cast<std::uint64_t>(op.k),
            static_cast<std::uint64_t>(std::llround(1e3 * std::abs(sigma))));
    Eigen::VectorXcd v0(n);
    for (Eigen::Index i = 0; i < n; ++i) v0[i] = cd(rng.normal(), rng.normal());
    V.col(0) = v0 / v0.norm();

    int built = 0;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd w = V.col(j);
        solver.solve(w);
        for (int reorth = 0; reorth < 2; ++reorth) {
            for (int i = 0; i <= j; ++i) {
                const cd h = V.col(i).dot(w);
                w -= h * V.col(i);
                if (reorth == 0) H(i, j) += h;
            }
        }
        const double nw = w.norm();
        H(j + 1, j) = nw;
        built = j + 1;
        if (nw < 1e-12) break;
        V.col(j + 1) = w / nw;
    }

    const Eigen::MatrixXcd Hs = H.topLeftCorner(built, built);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Hs);

    std::vector<RitzPair> out;
    for (Eigen::Index q = 0; q < es.eigenvalues().size(); ++q) {
        const cd theta = es.eigenvalues()[q];
        if (std::abs(theta) < 1e-14) continue;
        RitzPair pair;
        pair.lambda = sigma + 1.0 / theta;
        pair.vector = V.leftCols(built) * es.eigenvectors().col(q);
        pair.vector /= pair.vector.norm();
        Eigen::VectorXcd Tv;
        tri_apply(op, pair.vector, Tv);
        pair.residual = (Tv - pair.lambda * pair.vector).norm() / std::abs(pair.lambda);
        if (pair.residual <= residual_tol) out.push_back(std::move(pair));
    }
    return out;
}

void dedupe(std::vector<RitzPair>& pairs, double tol) {
    std::sort(pairs.begin(), pairs.end(), [](const RitzPair& a, const RitzPair& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    std::vector<RitzPair> keep;
    for (auto& p : pairs) {
        bool dup = false;
        for (const auto& kpt : keep)
            if (std::abs(kpt.lambda - p.lambda) < tol * std::max(1.0, std::abs(p.lambda))) {
                dup = true;
                break;
            }
        if (!dup) keep.push_back(std::move(p));
    }
    pairs = std::move(keep);
}

std::vector<RitzPair> box_eigenvalues(const ComplexScaledOperator& op, const ResonanceBox& box,
                                      double inflate) {
    const double w = box.re_hi - box.re_lo;
    const int nre = std::max(2, static_cast<int>(std::ceil(w / 0.25)) + 1);
    std::vector<RitzPair> all;
    for (int i = 0; i < nre; ++i) {
        const double re = box.re_lo + (w * i) / (nre - 1);
        for (double frac : {0.25, 0.75}) {
            const cd omega(re, box.im_lo * frac);
            auto pairs = shift_invert_eigs(op, omega * omega, 60, 1e-9);
            for (auto& p : pairs) all.push_back(std::move(p));
        }
    }
    // keep omegas near the inflated box
    const double mre = inflate * (box.re_hi - box.re_lo);
    const double mim = inflate * std::abs(box.im_lo) + 0.05;
    std::vector<RitzPair> kept;
    for (auto& p : all) {
        cd omega = std::sqrt(p.lambda);
        if (omega.real() < 0.0) omega = -omega;
        if (omega.real() < box.re_lo - mre || omega.real() > box.re_hi + mre) continue;
        if (omega.imag() < box.im_lo - mim || omega.imag() > 0.5 * mim) continue;
        kept.push_back(std::move(p));
    }
    dedupe(kept, 1e-8);
    return kept;
}

}  // namespace

ResonanceSet compute_mode_resonances(const Manifold& m, int k, const ScalingProfile& scaling,
                                     const ResonanceBox& box, double half_length,
                                     std::size_t n_coarse, bool refine_grid) {
    if (box.im_lo > 0.0) throw ConfigError("resonance box: im_lo <= 0 required");
    // trust region: the rotated continuous spectrum sits near arg(omega) = -theta
    if (std::abs(box.im_lo) > box.re_lo * std::tan(0.8 * scaling.theta))
        throw ConfigError("resonance box: beta exceeds the trust region for this theta");

    const auto op2 = build_scaled_operator(
        m, k, scaling, half_length, refine_grid ? 2 * n_coarse + 1 : n_coarse);
    auto fine = box_eigenvalues(op2, box, 0.2);
    std::vector<RitzPair> coarse;
    if (refine_grid) {
        const auto op1 = build_scaled_operator(m, k, scaling, half_length, n_coarse);
        coarse = box_eigenvalues(op1, box, 0.2);
    }

    ResonanceSet out;
    for (const auto& pf : fine) {
        Resonance r;
        r.k = k;
        r.theta = scaling.theta;
        r.residual = pf.residual;
        cd lambda = pf.lambda;
        if (refine_grid) {
            const RitzPair* best = nullptr;
            double bestd = 1e300;
            for (const auto& pc : coarse) {
                const double dist = std::abs(pc.lambda - pf.lambda);
                if (dist < bestd) {
                    bestd = dist;
                    best = &pc;
                }
            }
            const double scale = std::max(1.0, std::abs(pf.lambda));
            if (best == nullptr || bestd > 0.02 * scale) {
                cd omega = std::sqrt(pf.lambda);
                if (omega.real() < 0.0) omega = -omega;
                r.omega = omega;
                out.flagged.push_back(r);  // unconverged under refinement
                continue;
            }
            lambda = (4.0 * pf.lambda - best->lambda) / 3.0;
        }
        cd omega = std::sqrt(lambda);
        if (omega.real() < 0.0) omega = -omega;
        r.omega = omega;

        const bool in_box = omega.real() >= box.re_lo && omega.real() <= box.re_hi &&
                            omega.imag() >= box.im_lo && omega.imag() <= 1e-8;
        const bool trusted =
            std::abs(std::arg(omega)) < 0.8 * scaling.theta && omega.imag() <= 1e-8;
        if (in_box && trusted)
            out.resonances.push_back(r);
        else
            out.flagged.push_back(r);
    }

    // multiplicity flag for clusters within one mode
    for (std::size_t i = 0; i < out.resonances.size(); ++i) {
        int mult = 1;
        for (std::size_t j = 0; j < out.resonances.size(); ++j)
            if (i != j && std::abs(out.resonances[i].omega - out.resonances[j].omega) < 1e-7)
                ++mult;
        out.resonances[i].multiplicity = mult;
    }
    return out;
}

std::complex<double> shooting_determinant(const Manifold& m, int k, std::complex<double> omega) {
    const Profile& p = m.profile();
    const double C = p.end_radius();
    const double rb = C + 1.0;
    if (std::abs(omega) * C < 2.0)
        throw ConfigError("shooting: |omega| C >= 2 required for stable Hankel data");
    if (std::abs(omega.imag()) > 0.5 * std::abs(omega.real()))
        throw ConfigError("shooting: |Im omega| <= Re omega / 2 required");

    // Outgoing data v = sqrt(omega r) H^(1)_k(omega r) at r = rb
    const cd z = omega * rb;
    const cd h = hankel1(k, z);
    const cd hp = hankel1_derivative(k, z);
    const cd sq = std::sqrt(omega * rb);
    const cd val = sq * h;
    const cd der = omega * (0.5 * h / sq + sq * hp);

    // The ODE is autonomous in our Dopri5 only through state; integrate the
    // radial coordinate as a third (real) component packed into complex.
    struct Rhs {
        const Profile* profile;
        int k;
        cd omega2;
        void operator()(const std::array<cd, 3>& y, std::array<cd, 3>& dy) const {
            const double r = y[2].real();
            dy[0] = y[1];
            dy[1] = (mode_potential(*profile, k, r) - omega2) * y[0];
            dy[2] = 1.0;
        }
    };
    Rhs rhs{&p, k, omega * omega};
    StepControl ctl;
    ctl.rtol = 1e-12;
    ctl.atol = 1e-14;

    // right solution integrated from rb to 0 (param s = rb - r)
    struct RhsRight {
        Rhs inner;
        void operator()(const std::array<cd, 3>& y, std::array<cd, 3>& dy) const {
            std::array<cd, 3> tmp;
            inner(y, tmp);
            dy[0] = -tmp[0];
            dy[1] = -tmp[1];
            dy[2] = -1.0;
        }
    };
    auto right = make_dopri5<cd, 3>(RhsRight{rhs}, ctl);
    right.start({val, der, cd(rb, 0.0)}, 0.0);
    right.solve_to(rb);
    const cd vR = right.state()[0], dR = right.state()[1];

    // left solution integrated from -rb to 0: v(r) = sqrt(omega |r|) H_k(omega |r|),
    // d/dr flips sign
    auto left = make_dopri5<cd, 3>(rhs, ctl);
    left.start({val, -der, cd(-rb, 0.0)}, 0.0);
    left.solve_to(rb);
    const cd vL = left.state()[0], dL = left.state()[1];

    return vL * dR - dL * vR;
}

std::optional<std::complex<double>> refine_resonance_shooting(const Manifold& m, int k,
                                                              std::complex<double> seed,
                                                              double tol) {
    cd z0 = seed;
    cd z1 = seed + cd(1e-5, 1e-6) * std::max(1.0, std::abs(seed));
    cd d0, d1;
    try {
        d0 = shooting_determinant(m, k, z0);
        d1 = shooting_determinant(m, k, z1);
    } catch (const ConfigError&) {
        return std::nullopt;
    }
    for (int it = 0; it < 60; ++it) {
        if (d1 == d0) return std::nullopt;
        const cd z2 = z1 - d1 * (z1 - z0) / (d1 - d0);
        if (std::abs(z2 - seed) > 0.5 * std::max(1.0, std::abs(seed))) return std::nullopt;
        if (std::abs(z2 - z1) <= tol * std::max(1.0, std::abs(z2))) return z2;
        z0 = z1;
        d0 = d1;
        z1 = z2;
        try {
            d1 = shooting_determinant(m, k, z1);
        } catch (const ConfigError&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

int resonance_mode_limit(const Manifold& m, double R) {
    double alpha_max = 0.0;
    for (int i = 0; i <= 2048; ++i) {
        const double r = -m.r1() + 2.0 * m.r1() * i / 2048.0;
        alpha_max = std::max(alpha_max, m.profile().eval(r).value);
    }
    return static_cast<int>(std::ceil((R + 1.0) * alpha_max));
}

ResonanceCount count_resonances(const Manifold& m, double R, double beta,
                                const ScalingProfile& scaling, int mode_limit,
                                double half_length, std::size_t n_coarse, int workers) {
    ResonanceBox box{R, R + 1.0, -beta};
    std::vector<std::vector<Resonance>> per_mode(static_cast<std::size_t>(mode_limit) + 1);
    parallel_for_chunks(static_cast<std::size_t>(mode_limit) + 1, workers, 1,
                        [&](std::size_t begin, std::size_t end) {
                            for (std::size_t k = begin; k < end; ++k) {
                                auto rs = compute_mode_resonances(m, static_cast<int>(k), scaling,
                                                                  box, half_length, n_coarse,
                                                                  /*refine_grid=*/false);
                                per_mode[k] = std::move(rs.resonances);
                            }
                        });
    ResonanceCount out;
    for (std::size_t k = 0; k < per_mode.size(); ++k) {
        for (auto& r : per_mode[k]) {
            r.multiplicity = (k == 0) ? 1 : 2;
            out.count += static_cast<std::size_t>(r.multiplicity);
            out.resonances.push_back(r);
        }
    }
    return out;
}

}  // namespace revlab
