#include "revlab/mode_spectral.hpp"

#include <cmath>
#include <mutex>

#include "revlab/errors.hpp"
#include "revlab/parallel.hpp"
#include "revlab/plan_cache.hpp"
#include "revlab/tridiag.hpp"

namespace revlab {

double mode_potential(const Profile& p, int k, double r) {
    const auto j = p.eval(r);
    const double ratio1 = j.d1 / j.value;
    return static_cast<double>(k) * static_cast<double>(k) / (j.value * j.value) +
           0.5 * j.d2 / j.value - 0.25 * ratio1 * ratio1;
}

ModeOperator build_mode_operator(const Manifold& m, int k, double domain_half_length,
                                 std::size_t n_grid) {
    if (m.dim() != 2) throw ConfigError("mode operators require d = 2");
    if (n_grid < 200) throw ConfigError("build_mode_operator: n_grid >= 200");
    ModeOperator op;
    op.k = k;
    op.grid.half_length = domain_half_length;
    op.grid.n_interior = n_grid;
    op.grid.dr = 2.0 * domain_half_length / static_cast<double>(n_grid + 1);
    op.potential.resize(n_grid);
    op.diag.resize(n_grid);
    op.offdiag.assign(n_grid - 1, -1.0 / (op.grid.dr * op.grid.dr));
    const double inv2 = 1.0 / (op.grid.dr * op.grid.dr);
    for (std::size_t i = 0; i < n_grid; ++i) {
        op.potential[i] = mode_potential(m.profile(), k, op.grid.point(i));
        op.diag[i] = 2.0 * inv2 + op.potential[i];
    }
    return op;
}

namespace {
EigenBasis basis_from(const ModeOperator& op, TridiagEigs eigs) {
    EigenBasis b;
    b.k = op.k;
    b.grid = op.grid;
    b.values = std::move(eigs.values);
    b.index_offset = eigs.index_offset;
    if (eigs.vectors.size() > 0) {
        // LAPACK normalizes to unit 2-norm; rescale to the dr inner product
        b.vectors = eigs.vectors / std::sqrt(op.grid.dr);
    }
    return b;
}
}  // namespace

EigenBasis dirichlet_eigensystem(const ModeOperator& op) {
    return basis_from(op, tridiag_eigs_all(op.diag, op.offdiag, true));
}

EigenBasis dirichlet_eigensystem_in_range(const ModeOperator& op, double mu_lo, double mu_hi) {
    return basis_from(op, tridiag_eigs_in_range(op.diag, op.offdiag, mu_lo, mu_hi, true));
}

std::size_t eigenvalue_count_below(const ModeOperator& op, double x) {
    return tridiag_count_below(op.diag, op.offdiag, x);
}

int window_mode_limit(const Manifold& m, double R, double eps_prime) {
    double alpha_max = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        const double r = -m.r1() + 2.0 * m.r1() * i / 4096.0;
        alpha_max = std::max(alpha_max, m.profile().eval(r).value);
    }
    return static_cast<int>(std::ceil(R * (1.0 + eps_prime) * alpha_max));
}

WindowedBasis frequency_window(const Manifold& m, double R, double eps_prime,
                               std::size_t n_grid_per_mode, int workers) {
    if (m.dim() != 2) throw ConfigError("frequency_window: d = 2 only");
    WindowedBasis out;
    out.R = R;
    out.eps_prime = eps_prime;
    const double lo = R * (1.0 - eps_prime), hi = R * (1.0 + eps_prime);
    const int kmax = window_mode_limit(m, R, eps_prime);

    std::vector<std::vector<WindowEntry>> per_mode(static_cast<std::size_t>(kmax) + 1);
    parallel_for_chunks(static_cast<std::size_t>(kmax) + 1, workers, 1,
                        [&](std::size_t begin, std::size_t end) {
                            for (std::size_t k = begin; k < end; ++k) {
                                const auto op = build_mode_operator(
                                    m, static_cast<int>(k), m.r1(), n_grid_per_mode);
                                const auto eigs = tridiag_eigs_in_range(
                                    op.diag, op.offdiag, lo * lo, hi * hi, false);
                                auto& dst = per_mode[k];
                                for (std::size_t j = 0; j < eigs.values.size(); ++j) {
                                    WindowEntry e;
                                    e.k = static_cast<int>(k);
                                    e.j = eigs.index_offset + j + 1;
                                    e.lambda = std::sqrt(eigs.values[j]);
                                    dst.push_back(e);
                                }
                            }
                        });
    for (const auto& v : per_mode)
        for (const auto& e : v) {
            out.entries.push_back(e);
            out.dimension += (e.k == 0) ? 1 : 2;
        }
    if (out.entries.empty()) throw NumericalError("frequency_window: empty window");
    return out;
}

double bump_cutoff(double r, double r_psi) {
    const double x = r / r_psi;
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

std::size_t PropagatorPlan::coefficient_count() const {
    std::size_t n = 0;
    for (const auto& mode : modes)
        n += static_cast<std::size_t>(mode.multiplicity) * mode.window_lambda.size();
    return n;
}

PropagatorPlan build_propagator_plan(const Manifold& m, double R, double eps_prime,
                                     double t_max, const PlanOptions& opts) {
    if (m.dim() != 2) throw ConfigError("build_propagator_plan: d = 2 only");
    PropagatorPlan plan;
    plan.R = R;
    plan.eps_prime = eps_prime;
    plan.capture_rel_width = opts.capture_rel_width;
    plan.r1 = m.r1();
    plan.r_psi = 0.8 * m.r1();

    // grid: dr <= 1/(ppif * R(1+eps')), with r1 and L on the lattice
    const double dr_target = 1.0 / (static_cast<double>(opts.points_per_inverse_frequency) *
                                    R * (1.0 + eps_prime));
    const auto per_unit = static_cast<std::size_t>(std::ceil(1.0 / dr_target));
    plan.dr = 1.0 / static_cast<double>(per_unit);

    // B-domain grid must nest in the big grid; snap r1 to the lattice
    const auto r1_units = static_cast<std::size_t>(
        std::llround(m.r1() * static_cast<double>(per_unit)));
    plan.r1 = static_cast<double>(r1_units) * plan.dr;
    if (std::abs(plan.r1 - m.r1()) > 0.6 * plan.dr)
        throw NumericalError("propagator plan: r1 lattice snap failed");
    plan.r_psi = 0.8 * plan.r1;
    const std::size_t nB = 2 * r1_units - 1;

    const double L_raw = plan.r1 + 0.5 * t_max + 1.0;
    const auto L_units = static_cast<std::size_t>(std::ceil(L_raw * static_cast<double>(per_unit)));
    plan.half_length = static_cast<double>(L_units) * plan.dr;
    plan.n_grid = 2 * L_units - 1;
    plan.t_valid = 2.0 * (plan.half_length - plan.r1) - opts.margin;
    if (plan.t_valid < t_max)
        throw NumericalError("propagator plan: t_valid < requested t_max");

    if (!opts.cache_dir.empty()) {
        PropagatorPlan cached;
        if (plan_cache_load(opts.cache_dir, m, plan, cached)) return cached;
    }

    const double lo = R * (1.0 - eps_prime), hi = R * (1.0 + eps_prime);
    const double mu_cap_lo = R * R * (1.0 - opts.capture_rel_width);
    const double mu_cap_hi = R * R * (1.0 + opts.capture_rel_width);
    const int kmax = window_mode_limit(m, R, eps_prime);

    // psi on the big grid
    if (opts.flat_cutoff) plan.r_psi = m.r1();
    Eigen::VectorXd psi(static_cast<Eigen::Index>(plan.n_grid));
    for (std::size_t i = 0; i < plan.n_grid; ++i) {
        const double r = -plan.half_length + plan.dr * static_cast<double>(i + 1);
        psi[static_cast<Eigen::Index>(i)] =
            opts.flat_cutoff ? (std::abs(r) < m.r1() ? 1.0 : 0.0) : bump_cutoff(r, plan.r_psi);
    }

    std::vector<PlanMode> modes(static_cast<std::size_t>(kmax) + 1);
    parallel_for_chunks(static_cast<std::size_t>(kmax) + 1, opts.workers, 1,
                        [&](std::size_t begin, std::size_t end) {
        for (std::size_t ks = begin; ks < end; ++ks) {
            const int k = static_cast<int>(ks);
            // window entries of this mode on the B domain
            const auto opB = build_mode_operator(m, k, plan.r1, nB);
            const auto eigsB = tridiag_eigs_in_range(opB.diag, opB.offdiag, lo * lo, hi * hi, true);
            if (eigsB.values.empty()) continue;

            PlanMode pm;
            pm.k = k;
            pm.multiplicity = (k == 0) ? 1 : 2;
            for (std::size_t j = 0; j < eigsB.values.size(); ++j) {
                pm.window_lambda.push_back(std::sqrt(eigsB.values[j]));
                pm.window_j.push_back(eigsB.index_offset + j + 1);
            }

            // captured big-domain eigenpairs
            const auto opL = build_mode_operator(m, k, plan.half_length, plan.n_grid);
            auto eigsL = tridiag_eigs_in_range(opL.diag, opL.offdiag, mu_cap_lo, mu_cap_hi, true);
            if (eigsL.values.empty())
                throw NumericalError("propagator plan: empty capture band for mode " +
                                     std::to_string(k));
            pm.mu = eigsL.values;
            Eigen::MatrixXd big = eigsL.vectors / std::sqrt(plan.dr);  // dr-orthonormal

            // psi * zero-extension of each B eigenvector onto the big grid
            const auto mcount = static_cast<Eigen::Index>(eigsB.values.size());
            const Eigen::Index off = static_cast<Eigen::Index>(L_units - r1_units);
            Eigen::MatrixXd embedded = Eigen::MatrixXd::Zero(
                static_cast<Eigen::Index>(plan.n_grid), mcount);
            Eigen::MatrixXd eb = eigsB.vectors / std::sqrt(plan.dr);  // dr-orthonormal on B grid
            for (Eigen::Index c = 0; c < mcount; ++c)
                embedded.block(off, c, static_cast<Eigen::Index>(nB), 1) = eb.col(c);
            // apply the cutoff
            embedded.array().colwise() *= psi.array();

            // M = Phi^T (psi u) dr ; G = (psi Phi)^T (psi Phi) dr
            pm.embed.noalias() = big.transpose() * embedded;
            pm.embed *= plan.dr;
            Eigen::MatrixXd psiPhi = big;
            psiPhi.array().colwise() *= psi.array();
            pm.gram.noalias() = psiPhi.transpose() * psiPhi;
            pm.gram *= plan.dr;

            // capture defect per window element: 1 - ||M e||^2_G-ish relative
            // to the full ||psi u||^2 on the grid
            for (Eigen::Index c = 0; c < mcount; ++c) {
                const double full = embedded.col(c).squaredNorm() * plan.dr;
                const double captured = pm.embed.col(c).squaredNorm();
                pm.capture_defect.push_back(full > 0 ? std::max(0.0, 1.0 - captured / full)
                                                     : 0.0);
            }
            modes[ks] = std::move(pm);
        }
    });

    for (auto& pm : modes) {
        if (pm.window_lambda.empty()) continue;
        plan.dimension += static_cast<std::size_t>(pm.multiplicity) * pm.window_lambda.size();
        plan.modes.push_back(std::move(pm));
    }
    if (plan.modes.empty()) throw NumericalError("propagator plan: empty window");
    for (auto& pm : plan.modes) pm.finalize();

    if (!opts.cache_dir.empty()) plan_cache_store(opts.cache_dir, m, plan);
    return plan;
}

void PlanMode::finalize() {
    omega.resize(static_cast<Eigen::Index>(mu.size()));
    for (std::size_t j = 0; j < mu.size(); ++j)
        omega[static_cast<Eigen::Index>(j)] = std::sqrt(std::max(0.0, mu[j]));
    hs_kernel.noalias() = embed * embed.transpose();
    hs_kernel.array() *= gram.array();
}

void half_wave_apply(const PlanMode& mode, std::vector<std::complex<double>>& coeffs,
                     double t, double t_valid) {
    if (t < 0.0 || t > t_valid)
        throw NumericalError("half_wave_apply: t outside [0, T_valid]");
    if (coeffs.size() != mode.mu.size())
        throw ConfigError("half_wave_apply: coefficient size mismatch");
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const double omega = std::sqrt(mode.mu[j]);
        coeffs[j] *= std::exp(std::complex<double>(0.0, -t * omega));
    }
}

namespace {
// || psi U(t) psi u ||^2 contribution of one mode block (coefficients a over
// the mode's window entries).  Real-split arithmetic: G is real symmetric.
double mode_norm_squared(const PlanMode& mode, const Eigen::VectorXcd& a, double t) {
    const Eigen::VectorXd ar = a.real();
    const Eigen::VectorXd ai = a.imag();
    Eigen::VectorXd br = mode.embed * ar;
    Eigen::VectorXd bi = mode.embed * ai;
    for (Eigen::Index j = 0; j < br.size(); ++j) {
        const double c = std::cos(mode.omega[j] * t), s = std::sin(mode.omega[j] * t);
        const double nr = c * br[j] + s * bi[j];
        const double ni = c * bi[j] - s * br[j];
        br[j] = nr;
        bi[j] = ni;
    }
    return br.dot(mode.gram * br) + bi.dot(mode.gram * bi);
}
}  // namespace

double embed_and_measure(const PropagatorPlan& plan, const Eigen::VectorXcd& coefficients,
                         double t) {
    if (t < 0.0 || t > plan.t_valid)
        throw NumericalError("embed_and_measure: t outside [0, T_valid]");
    if (static_cast<std::size_t>(coefficients.size()) != plan.coefficient_count())
        throw ConfigError("embed_and_measure: coefficient size mismatch");
    double total = 0.0;
    Eigen::Index pos = 0;
    for (const auto& mode : plan.modes) {
        const auto mcount = static_cast<Eigen::Index>(mode.window_lambda.size());
        for (int copy = 0; copy < mode.multiplicity; ++copy) {
            total += mode_norm_squared(mode, coefficients.segment(pos, mcount), t);
            pos += mcount;
        }
    }
    return std::sqrt(std::max(0.0, total));
}

HsNorm hs_norm_cutoff_propagator(const PropagatorPlan& plan, double t) {
    if (t < 0.0 || t > plan.t_valid)
        throw NumericalError("hs_norm: t outside [0, T_valid]");
    // sum_c || psi U psi e_c ||^2 = sum_{jl} G_jl (M M^T)_jl cos((w_j - w_l) t)
    //                             = c^T P c + s^T P s,  P = G .* (M M^T)
    double hs2 = 0.0;
    for (const auto& mode : plan.modes) {
        const Eigen::VectorXd c = (mode.omega * t).array().cos();
        const Eigen::VectorXd s = (mode.omega * t).array().sin();
        const double mode_sum = c.dot(mode.hs_kernel * c) + s.dot(mode.hs_kernel * s);
        hs2 += mode.multiplicity * mode_sum;
    }
    HsNorm out;
    out.hs_squared = hs2;
    out.normalized = hs2 / static_cast<double>(plan.dimension);
    return out;
}

double max_capture_defect(const PropagatorPlan& plan) {
    double worst = 0.0;
    for (const auto& mode : plan.modes)
        for (double d : mode.capture_defect) worst = std::max(worst, d);
    return worst;
}

Eigen::VectorXcd evolve_grid_function(const EigenBasis& basis, const Eigen::VectorXcd& u,
                                      double t) {
    const Eigen::VectorXcd coeff =
        basis.vectors.cast<std::complex<double>>().transpose() * u * basis.grid.dr;
    Eigen::VectorXcd phased = coeff;
    for (Eigen::Index j = 0; j < phased.size(); ++j) {
        const double omega = std::sqrt(std::max(0.0, basis.values[static_cast<std::size_t>(j)]));
        phased[j] *= std::exp(std::complex<double>(0.0, -t * omega));
    }
    return basis.vectors.cast<std::complex<double>>() * phased;
}

}  // namespace revlab
