#include "revlab/random_decay.hpp"

#include <cmath>
#include <memory>
#include <mutex>

#include "revlab/errors.hpp"
#include "revlab/parallel.hpp"
#include "revlab/rng.hpp"
#include "revlab/stats.hpp"

namespace revlab {

Eigen::VectorXcd sample_sphere(std::size_t n, std::uint64_t seed, std::uint64_t trial) {
    if (n < 1) throw ConfigError("sample_sphere: n >= 1");
    Rng rng(seed, 0x5decab1eull ^ trial);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = rng.complex_normal();
    v /= v.norm();
    return v;
}

DecayCurve decay_experiment(const PropagatorPlan& plan, const std::vector<double>& t_grid,
                            std::size_t n_trials, std::uint64_t seed, int workers) {
    for (double t : t_grid)
        if (t < 0.0 || t > plan.t_valid)
            throw NumericalError("decay_experiment: grid time outside [0, T_valid]");
    DecayCurve out;
    out.t = t_grid;
    out.R = plan.R;
    out.n_trials = n_trials;
    out.seed = seed;
    const std::size_t n_coeff = plan.coefficient_count();
    out.norms.resize(static_cast<Eigen::Index>(n_trials), static_cast<Eigen::Index>(t_grid.size()));

    parallel_for_chunks(n_trials, workers, 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t trial = begin; trial < end; ++trial) {
            const Eigen::VectorXcd a = sample_sphere(n_coeff, seed, trial);
            for (std::size_t j = 0; j < t_grid.size(); ++j) {
                out.norms(static_cast<Eigen::Index>(trial), static_cast<Eigen::Index>(j)) =
                    embed_and_measure(plan, a, t_grid[j]);
            }
        }
    });

    for (std::size_t j = 0; j < t_grid.size(); ++j) {
        std::vector<double> col(n_trials);
        for (std::size_t i = 0; i < n_trials; ++i)
            col[i] = out.norms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out.q50.push_back(quantile(col, 0.50));
        out.q90.push_back(quantile(col, 0.90));
        out.q99.push_back(quantile(col, 0.99));
    }
    return out;
}

std::vector<EnvelopeRow> envelope_check(const DecayCurve& decay, const VolumeCurve& volume,
                                        double eps, double lambda_eff,
                                        const std::vector<double>& m_grid) {
    const double te = ehrenfest_time(decay.R, lambda_eff);
    std::vector<double> env(decay.t.size());
    for (std::size_t j = 0; j < decay.t.size(); ++j)
        env[j] = std::sqrt(
            interpolate_volume(volume, (1.0 - eps) * std::min(decay.t[j], 2.0 * te)));

    std::vector<EnvelopeRow> rows;
    for (double m : m_grid) {
        std::size_t ok = 0;
        for (Eigen::Index i = 0; i < decay.norms.rows(); ++i) {
            bool all = true;
            for (std::size_t j = 0; j < decay.t.size(); ++j) {
                if (decay.norms(i, static_cast<Eigen::Index>(j)) > m * env[j]) {
                    all = false;
                    break;
                }
            }
            if (all) ++ok;
        }
        rows.push_back({m, static_cast<double>(ok) / static_cast<double>(decay.norms.rows())});
    }
    return rows;
}

OperatorSpec make_identity_operator(std::size_t n) {
    OperatorSpec op;
    op.name = "identity";
    op.dim = n;
    op.hs_norm = std::sqrt(static_cast<double>(n));
    op.apply_norm = [](const Eigen::VectorXcd& u) { return u.norm(); };
    return op;
}

OperatorSpec make_rank_one_projector(std::size_t n) {
    OperatorSpec op;
    op.name = "rank_one_projector";
    op.dim = n;
    op.hs_norm = 1.0;
    op.apply_norm = [](const Eigen::VectorXcd& u) { return std::abs(u[0]); };
    return op;
}

OperatorSpec make_diagonal_operator(std::vector<double> diagonal) {
    OperatorSpec op;
    op.name = "diagonal";
    op.dim = diagonal.size();
    double hs2 = 0.0;
    for (double d : diagonal) hs2 += d * d;
    op.hs_norm = std::sqrt(hs2);
    auto diag = std::make_shared<std::vector<double>>(std::move(diagonal));
    op.apply_norm = [diag](const Eigen::VectorXcd& u) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double d = (*diag)[static_cast<std::size_t>(i)];
            s += d * d * std::norm(u[i]);
        }
        return std::sqrt(s);
    };
    return op;
}

OperatorSpec make_propagator_operator(const PropagatorPlan& plan, double t) {
    OperatorSpec op;
    op.name = "psi_U_psi";
    op.dim = plan.coefficient_count();
    op.hs_norm = std::sqrt(hs_norm_cutoff_propagator(plan, t).hs_squared);
    op.apply_norm = [&plan, t](const Eigen::VectorXcd& u) {
        return embed_and_measure(plan, u, t);
    };
    return op;
}

ConcentrationReport concentration_test(const OperatorSpec& op, const std::vector<double>& m_grid,
                                       std::size_t n_trials, std::uint64_t seed, int workers) {
    ConcentrationReport rep;
    rep.operator_name = op.name;
    rep.dim = op.dim;
    rep.hs_norm = op.hs_norm;
    rep.n_trials = n_trials;
    const double scale = op.hs_norm / std::sqrt(static_cast<double>(op.dim));

    std::vector<std::size_t> exceed(m_grid.size(), 0);
    std::mutex merge;
    parallel_for_chunks(n_trials, workers, 256, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> local(m_grid.size(), 0);
        for (std::size_t trial = begin; trial < end; ++trial) {
            const auto u = sample_sphere(op.dim, seed, trial);
            const double v = op.apply_norm(u);
            for (std::size_t q = 0; q < m_grid.size(); ++q)
                if (v > m_grid[q] * scale) ++local[q];
        }
        std::lock_guard<std::mutex> lock(merge);
        for (std::size_t q = 0; q < m_grid.size(); ++q) exceed[q] += local[q];
    });

    for (std::size_t q = 0; q < m_grid.size(); ++q) {
        ConcentrationRow row;
        row.m = m_grid[q];
        const auto w = wilson_interval(exceed[q], n_trials);
        row.empirical = static_cast<double>(exceed[q]) / static_cast<double>(n_trials);
        row.wilson_half = w.half_width;
        row.bound = 2.0 * std::exp(-row.m * row.m / 16.0);
        row.pass = row.empirical <= row.bound + w.half_width;
        rep.rows.push_back(row);
    }
    return rep;
}

MeanIdentityReport mean_identity_check(const OperatorSpec& op, std::size_t n_trials,
                                       std::uint64_t seed, int workers) {
    std::vector<double> vals(n_trials);
    parallel_for_chunks(n_trials, workers, 256, [&](std::size_t begin, std::size_t end) {
        for (std::size_t trial = begin; trial < end; ++trial) {
            const auto u = sample_sphere(op.dim, seed, trial);
            const double v = op.apply_norm(u);
            vals[trial] = v * v;
        }
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(n_trials);
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max<std::size_t>(1, n_trials - 1);

    MeanIdentityReport rep;
    rep.operator_name = op.name;
    rep.empirical_mean = mean;
    rep.exact = op.hs_norm * op.hs_norm / static_cast<double>(op.dim);
    rep.stderr_ = std::sqrt(var / static_cast<double>(n_trials));
    rep.pass = std::abs(mean - rep.exact) <= 3.0 * rep.stderr_ + 1e-15;
    return rep;
}

}  // namespace revlab
